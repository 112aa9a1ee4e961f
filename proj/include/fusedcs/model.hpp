#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "fusedcs/error.hpp"

namespace fusedcs {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Throws InvalidDimension unless x has at least two entries, all finite.
void validate_signal(const Vector& x);

/**
 * Upper-bidiagonal N x N difference matrix:
 *   [D]_{j,j} = -1, [D]_{j,j+1} = 1 for j < N-1, and [D]_{N-1,N-1} = 1.
 *
 * The last row keeps x_{N-1}, which makes D invertible; consequently
 * ||Dx||_1 = fusion_penalty(x) + |x_{N-1}|.
 */
class DifferenceOperator
{
public:
    explicit DifferenceOperator(std::size_t n);

    std::size_t size() const noexcept { return n_; }
    std::size_t nonzeros() const noexcept { return 2 * n_ - 1; }

    Vector apply(const Vector& x) const;
    Vector apply_transpose(const Vector& z) const;
    // Solves Dx = z by back substitution.
    Vector solve(const Vector& z) const;

    Matrix dense() const;
    // D^T D, tridiagonal with diagonal [1, 2, ..., 2].
    Matrix gram() const;

private:
    std::size_t n_;
};

DifferenceOperator build_difference_operator(std::size_t n);

// Sum over j=1..N-1 of |x_j - x_{j-1}|, unweighted.
double fusion_penalty(const Vector& x);

// Disjoint contiguous groups of equal size.
class GroupPartition
{
public:
    GroupPartition(std::size_t n, std::size_t groups);

    std::size_t size() const noexcept { return n_; }
    std::size_t num_groups() const noexcept { return groups_; }
    std::size_t group_size() const noexcept { return n_ / groups_; }
    std::size_t group_begin(std::size_t i) const noexcept { return i * group_size(); }

private:
    std::size_t n_;
    std::size_t groups_;
};

GroupPartition build_partition(std::size_t n, std::size_t groups);

/**
 * Overlapping groups of fixed size. Group i covers
 * [i*stride, i*stride + group_size) with stride = group_size - overlap, and
 * the last group ends exactly at n-1.
 *
 * The "stacked" space concatenates the groups, so it has
 * num_groups() * group_size() entries; gather() is W x and scatter_add() is W^T u.
 */
class LatentGroupLayout
{
public:
    LatentGroupLayout(std::size_t n, std::size_t group_size, std::size_t overlap);

    std::size_t size() const noexcept { return n_; }
    std::size_t group_size() const noexcept { return group_size_; }
    std::size_t overlap() const noexcept { return overlap_; }
    std::size_t stride() const noexcept { return group_size_ - overlap_; }
    std::size_t num_groups() const noexcept { return groups_; }
    std::size_t stacked_size() const noexcept { return groups_ * group_size_; }
    std::size_t group_begin(std::size_t i) const noexcept { return i * stride(); }

    // Number of groups containing each index; the diagonal of W^T W.
    const Vector& membership_counts() const noexcept { return counts_; }

    Vector gather(const Vector& x) const;
    Vector scatter_add(const Vector& stacked) const;

private:
    std::size_t n_;
    std::size_t group_size_;
    std::size_t overlap_;
    std::size_t groups_;
    Vector counts_;
};

LatentGroupLayout build_latent_layout(std::size_t n, std::size_t group_size, std::size_t overlap);

struct PenaltyConfig
{
    double lambda_e = 0.0; // element-wise l1
    double lambda_g = 0.0; // group l2
    double lambda_f = 0.0; // fusion

    void validate() const;
    friend bool operator==(const PenaltyConfig&, const PenaltyConfig&) = default;
};

// Gauss-Seidel feeds the fresh x into the u/z updates; Jacobi uses the previous x.
enum class UpdateOrder { GaussSeidel, Jacobi };

struct AdmmConfig
{
    double c_u = 2.0;
    double c_z = 2.0;
    std::size_t max_iter = 150;
    double tol = 1e-3;
    UpdateOrder order = UpdateOrder::GaussSeidel;

    void validate() const;
};

// How the fusion term enters an objective value.
enum class FusionForm {
    Pairwise,  // sum_{j>=1} |x_j - x_{j-1}|
    Operator,  // ||Dx||_1, includes |x_{N-1}|
};

double sgf_objective(const Vector& x, const Vector& y, const Matrix& phi, const GroupPartition& partition,
                     const PenaltyConfig& penalties, FusionForm fusion = FusionForm::Pairwise);

double lgf_objective(const Vector& x, const Vector& y, const Matrix& phi, const LatentGroupLayout& layout,
                     const PenaltyConfig& penalties, FusionForm fusion = FusionForm::Operator);

double mse(const Vector& x_true, const Vector& x_hat);

} // namespace fusedcs
