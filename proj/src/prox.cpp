#include "fusedcs/prox.hpp"

#include <cmath>

namespace fusedcs {

ShrinkageThreshold::ShrinkageThreshold(double tau) : tau_(tau)
{
    if (!(std::isfinite(tau) && tau >= 0.0))
        throw ValidationError("tau", "shrinkage threshold must be finite and non-negative");
}

Vector soft_threshold(const Eigen::Ref<const Vector>& v, ShrinkageThreshold tau)
{
    const double t = tau.value();
    return v.unaryExpr([t](double a) {
        const double mag = std::abs(a) - t;
        return mag > 0.0 ? std::copysign(mag, a) : 0.0;
    });
}

Vector block_shrink(const Eigen::Ref<const Vector>& v, ShrinkageThreshold tau)
{
    const double norm = v.norm();
    if (norm <= tau.value())
        return Vector::Zero(v.size());
    return (1.0 - tau.value() / norm) * v;
}

Vector sparse_group_shrink(const Eigen::Ref<const Vector>& v, ShrinkageThreshold tau_e, ShrinkageThreshold tau_g)
{
    return block_shrink(soft_threshold(v, tau_e), tau_g);
}

} // namespace fusedcs
