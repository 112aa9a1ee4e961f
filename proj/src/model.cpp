#include "fusedcs/model.hpp"

#include <cmath>
#include <string>

namespace fusedcs {

namespace {

void require_length(const Vector& v, std::size_t n, const char* what)
{
    if (static_cast<std::size_t>(v.size()) != n)
        throw InvalidDimension(std::string(what) + " has length " + std::to_string(v.size()) + ", expected " +
                               std::to_string(n));
}

bool finite_nonnegative(double v) { return std::isfinite(v) && v >= 0.0; }

} // namespace

void validate_signal(const Vector& x)
{
    if (x.size() < 2)
        throw InvalidDimension("signal length must be at least 2, got " + std::to_string(x.size()));
    if (!x.allFinite())
        throw InvalidDimension("signal has non-finite entries");
}

DifferenceOperator::DifferenceOperator(std::size_t n) : n_(n)
{
    if (n < 2)
        throw InvalidDimension("difference operator needs n >= 2, got " + std::to_string(n));
}

Vector DifferenceOperator::apply(const Vector& x) const
{
    require_length(x, n_, "x");
    const auto n = static_cast<Eigen::Index>(n_);
    Vector out(n);
    out.head(n - 1) = x.tail(n - 1) - x.head(n - 1);
    out(n - 1) = x(n - 1);
    return out;
}

Vector DifferenceOperator::apply_transpose(const Vector& z) const
{
    require_length(z, n_, "z");
    const auto n = static_cast<Eigen::Index>(n_);
    // (D^T z)_0 = -z_0, (D^T z)_j = z_{j-1} - z_j for 0 < j < n-1, (D^T z)_{n-1} = z_{n-2} + z_{n-1}
    Vector out(n);
    out(0) = -z(0);
    for (Eigen::Index j = 1; j < n - 1; ++j)
        out(j) = z(j - 1) - z(j);
    out(n - 1) = z(n - 2) + z(n - 1);
    return out;
}

Vector DifferenceOperator::solve(const Vector& z) const
{
    require_length(z, n_, "z");
    const auto n = static_cast<Eigen::Index>(n_);
    Vector x(n);
    x(n - 1) = z(n - 1);
    for (Eigen::Index j = n - 2; j >= 0; --j)
        x(j) = x(j + 1) - z(j);
    return x;
}

Matrix DifferenceOperator::dense() const
{
    const auto n = static_cast<Eigen::Index>(n_);
    Matrix d = Matrix::Zero(n, n);
    for (Eigen::Index j = 0; j < n - 1; ++j) {
        d(j, j) = -1.0;
        d(j, j + 1) = 1.0;
    }
    d(n - 1, n - 1) = 1.0;
    return d;
}

Matrix DifferenceOperator::gram() const
{
    const auto n = static_cast<Eigen::Index>(n_);
    Matrix g = Matrix::Zero(n, n);
    g(0, 0) = 1.0;
    for (Eigen::Index j = 1; j < n; ++j) {
        g(j, j) = 2.0;
        g(j, j - 1) = -1.0;
        g(j - 1, j) = -1.0;
    }
    return g;
}

DifferenceOperator build_difference_operator(std::size_t n) { return DifferenceOperator(n); }

double fusion_penalty(const Vector& x)
{
    if (x.size() < 2)
        throw InvalidDimension("fusion penalty needs at least two entries");
    const auto n = x.size();
    return (x.tail(n - 1) - x.head(n - 1)).cwiseAbs().sum();
}

GroupPartition::GroupPartition(std::size_t n, std::size_t groups) : n_(n), groups_(groups)
{
    if (n == 0 || groups == 0)
        throw InvalidPartition("partition needs n > 0 and at least one group");
    if (n % groups != 0)
        throw InvalidPartition(std::to_string(groups) + " groups do not divide n = " + std::to_string(n));
}

GroupPartition build_partition(std::size_t n, std::size_t groups) { return GroupPartition(n, groups); }

LatentGroupLayout::LatentGroupLayout(std::size_t n, std::size_t group_size, std::size_t overlap)
    : n_(n), group_size_(group_size), overlap_(overlap), groups_(0)
{
    if (group_size < 2 || group_size > n)
        throw InvalidLayout("group size " + std::to_string(group_size) + " must lie in [2, n = " +
                            std::to_string(n) + "]");
    if (overlap < 1 || overlap >= group_size)
        throw InvalidLayout("overlap " + std::to_string(overlap) + " must lie in [1, group_size - 1]");
    const std::size_t s = group_size - overlap;
    if ((n - group_size) % s != 0)
        throw InvalidLayout("stride " + std::to_string(s) + " does not divide n - group_size = " +
                            std::to_string(n - group_size) + "; the last group would not end at n - 1");
    groups_ = (n - group_size) / s + 1;

    counts_ = Vector::Zero(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < groups_; ++i)
        counts_.segment(static_cast<Eigen::Index>(group_begin(i)), static_cast<Eigen::Index>(group_size_)).array() +=
            1.0;
    if (counts_.minCoeff() < 1.0)
        throw InvalidLayout("layout leaves indices uncovered");
}

Vector LatentGroupLayout::gather(const Vector& x) const
{
    require_length(x, n_, "x");
    const auto len = static_cast<Eigen::Index>(group_size_);
    Vector out(static_cast<Eigen::Index>(stacked_size()));
    for (std::size_t i = 0; i < groups_; ++i)
        out.segment(static_cast<Eigen::Index>(i) * len, len) =
            x.segment(static_cast<Eigen::Index>(group_begin(i)), len);
    return out;
}

Vector LatentGroupLayout::scatter_add(const Vector& stacked) const
{
    require_length(stacked, stacked_size(), "stacked vector");
    const auto len = static_cast<Eigen::Index>(group_size_);
    Vector out = Vector::Zero(static_cast<Eigen::Index>(n_));
    for (std::size_t i = 0; i < groups_; ++i)
        out.segment(static_cast<Eigen::Index>(group_begin(i)), len) +=
            stacked.segment(static_cast<Eigen::Index>(i) * len, len);
    return out;
}

LatentGroupLayout build_latent_layout(std::size_t n, std::size_t group_size, std::size_t overlap)
{
    return LatentGroupLayout(n, group_size, overlap);
}

void PenaltyConfig::validate() const
{
    if (!finite_nonnegative(lambda_e))
        throw ValidationError("lambda_e", "must be finite and non-negative");
    if (!finite_nonnegative(lambda_g))
        throw ValidationError("lambda_g", "must be finite and non-negative");
    if (!finite_nonnegative(lambda_f))
        throw ValidationError("lambda_f", "must be finite and non-negative");
}

void AdmmConfig::validate() const
{
    if (!(std::isfinite(c_u) && c_u > 0.0))
        throw ValidationError("c_u", "must be finite and positive");
    if (!(std::isfinite(c_z) && c_z > 0.0))
        throw ValidationError("c_z", "must be finite and positive");
    if (max_iter == 0)
        throw ValidationError("max_iter", "must be positive");
    if (!(std::isfinite(tol) && tol > 0.0))
        throw ValidationError("tol", "must be finite and positive");
}

namespace {

void check_problem(const Vector& x, const Vector& y, const Matrix& phi, std::size_t n)
{
    require_length(x, n, "x");
    if (static_cast<std::size_t>(phi.cols()) != n)
        throw InvalidDimension("measurement matrix has " + std::to_string(phi.cols()) + " columns, expected " +
                               std::to_string(n));
    require_length(y, static_cast<std::size_t>(phi.rows()), "y");
}

double fusion_term(const Vector& x, FusionForm fusion)
{
    const double pairwise = fusion_penalty(x);
    return fusion == FusionForm::Pairwise ? pairwise : pairwise + std::abs(x(x.size() - 1));
}

} // namespace

double sgf_objective(const Vector& x, const Vector& y, const Matrix& phi, const GroupPartition& partition,
                     const PenaltyConfig& penalties, FusionForm fusion)
{
    check_problem(x, y, phi, partition.size());
    const auto len = static_cast<Eigen::Index>(partition.group_size());
    double groups = 0.0;
    for (std::size_t i = 0; i < partition.num_groups(); ++i)
        groups += x.segment(static_cast<Eigen::Index>(partition.group_begin(i)), len).norm();
    return 0.5 * (y - phi * x).squaredNorm() + penalties.lambda_e * x.lpNorm<1>() + penalties.lambda_g * groups +
           penalties.lambda_f * fusion_term(x, fusion);
}

double lgf_objective(const Vector& x, const Vector& y, const Matrix& phi, const LatentGroupLayout& layout,
                     const PenaltyConfig& penalties, FusionForm fusion)
{
    check_problem(x, y, phi, layout.size());
    const auto len = static_cast<Eigen::Index>(layout.group_size());
    double groups = 0.0;
    for (std::size_t i = 0; i < layout.num_groups(); ++i)
        groups += x.segment(static_cast<Eigen::Index>(layout.group_begin(i)), len).norm();
    return 0.5 * (y - phi * x).squaredNorm() + penalties.lambda_g * groups +
           penalties.lambda_f * fusion_term(x, fusion);
}

double mse(const Vector& x_true, const Vector& x_hat)
{
    if (x_true.size() != x_hat.size() || x_true.size() == 0)
        throw InvalidDimension("mse needs equal, non-zero lengths (" + std::to_string(x_true.size()) + " vs " +
                               std::to_string(x_hat.size()) + ")");
    return (x_true - x_hat).squaredNorm() / static_cast<double>(x_true.size());
}

} // namespace fusedcs
