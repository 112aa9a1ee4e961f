#pragma once

#include "fusedcs/model.hpp"

namespace fusedcs {

// A shrinkage level: a penalty weight divided by its augmentation constant.
class ShrinkageThreshold
{
public:
    // Throws ValidationError on negative or non-finite input.
    explicit ShrinkageThreshold(double tau);

    double value() const noexcept { return tau_; }

private:
    double tau_;
};

// sign(v_j) * (|v_j| - tau)_+, element-wise. Prox of tau*||.||_1.
Vector soft_threshold(const Eigen::Ref<const Vector>& v, ShrinkageThreshold tau);

// (1 - tau/||v||_2)_+ * v. Prox of tau*||.||_2.
Vector block_shrink(const Eigen::Ref<const Vector>& v, ShrinkageThreshold tau);

// Prox of tau_e*||.||_1 + tau_g*||.||_2: soft threshold, then block shrink.
Vector sparse_group_shrink(const Eigen::Ref<const Vector>& v, ShrinkageThreshold tau_e, ShrinkageThreshold tau_g);

} // namespace fusedcs
