#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fusedcs/model.hpp"

namespace fusedcs {

enum class Formulation { Sgf, Lgf };

// How the x-update system is solved each iteration. Refactor rebuilds the
// Cholesky factor from the stored system matrix on every call; it exists as the
// reference path for the cached one.
enum class LinearSolvePolicy { Cached, Refactor };

/**
 * Cholesky factor of the x-update system matrix
 *   SGF: Phi^T Phi + c_z D^T D + c_u I
 *   LGF: Phi^T Phi + c_z D^T D + c_u diag(membership counts)
 * computed once and shared read-only between solves on the same Phi.
 */
class LinearSystemFactor
{
public:
    LinearSystemFactor(Matrix system, Formulation formulation, LinearSolvePolicy policy = LinearSolvePolicy::Cached);

    Vector solve(const Vector& rhs) const;

    const Matrix& system() const noexcept { return system_; }
    Formulation formulation() const noexcept { return formulation_; }
    LinearSolvePolicy policy() const noexcept { return policy_; }

private:
    Matrix system_;
    Eigen::LLT<Matrix> llt_;
    Formulation formulation_;
    LinearSolvePolicy policy_;
};

LinearSystemFactor factorize_sgf(const Matrix& phi, const DifferenceOperator& diff, const AdmmConfig& admm,
                                 LinearSolvePolicy policy = LinearSolvePolicy::Cached);
LinearSystemFactor factorize_lgf(const Matrix& phi, const DifferenceOperator& diff, const LatentGroupLayout& layout,
                                 const AdmmConfig& admm, LinearSolvePolicy policy = LinearSolvePolicy::Cached);

struct SolveTraces
{
    std::vector<double> objective;          // objective the splitting minimizes (fusion as ||Dx||_1)
    std::vector<double> objective_pairwise; // same with pairwise fusion sum
    std::vector<double> primal_group;       // ||u - x|| (SGF) or ||u~ - Wx|| (LGF)
    std::vector<double> primal_fusion;      // ||z - Dx||
    std::vector<double> step;               // ||x^(n) - x^(n-1)||
};

struct SolveReport
{
    Vector x_hat;
    std::size_t iterations = 0;
    bool converged = false;
    SolveTraces traces;
};

struct SgfSolverState
{
    Vector x, u, z, rho_u, rho_z;
    std::size_t iteration = 0;
};

struct LgfSolverState
{
    Vector x, z, rho_z;
    Vector u_tilde, rho_u_tilde; // stacked group space
    std::size_t iteration = 0;
};

// Minimum-norm least-squares solution of phi x = y, usable as a warm start.
Vector least_squares_estimate(const Matrix& phi, const Vector& y);

/**
 * ADMM for
 *   1/2||y - Phi x||^2 + lambda_e||u||_1 + lambda_g sum_i ||u_i||_2 + lambda_f||z||_1
 *   s.t. u = x, z = Dx.
 *
 * Each step(): x from the cached factor, u by group-wise sparse-group shrinkage,
 * z by soft thresholding, then rho_u += c_u(x - u), rho_z += c_z(Dx - z).
 */
class SgfAdmm
{
public:
    SgfAdmm(Matrix phi, Vector y, GroupPartition partition, PenaltyConfig penalties, AdmmConfig admm,
            std::shared_ptr<const LinearSystemFactor> factor = nullptr);

    // Zero state, or x = u = init, z = D init with zero multipliers.
    void reset(const std::optional<Vector>& init = std::nullopt);
    // One full cycle; returns ||x^(n) - x^(n-1)||_2.
    double step();
    SolveReport solve(const std::optional<Vector>& init = std::nullopt);

    const SgfSolverState& state() const noexcept { return state_; }
    const LinearSystemFactor& factor() const noexcept { return *factor_; }
    double objective(const Vector& x, FusionForm fusion = FusionForm::Operator) const;

private:
    void record(SolveTraces& traces, double step) const;

    Matrix phi_;
    Vector y_;
    Vector phi_t_y_;
    GroupPartition partition_;
    PenaltyConfig penalties_;
    AdmmConfig admm_;
    DifferenceOperator diff_;
    std::shared_ptr<const LinearSystemFactor> factor_;
    SgfSolverState state_;
};

/**
 * ADMM for
 *   1/2||y - Phi x||^2 + lambda_g sum_i ||u~_i||_2 + lambda_f||z||_1
 *   s.t. u~ = Wx, z = Dx
 * over overlapping groups. lambda_e is ignored.
 */
class LgfAdmm
{
public:
    LgfAdmm(Matrix phi, Vector y, LatentGroupLayout layout, PenaltyConfig penalties, AdmmConfig admm,
            std::shared_ptr<const LinearSystemFactor> factor = nullptr);

    void reset(const std::optional<Vector>& init = std::nullopt);
    double step();
    SolveReport solve(const std::optional<Vector>& init = std::nullopt);

    const LgfSolverState& state() const noexcept { return state_; }
    const LinearSystemFactor& factor() const noexcept { return *factor_; }
    double objective(const Vector& x, FusionForm fusion = FusionForm::Operator) const;

private:
    void record(SolveTraces& traces, double step) const;

    Matrix phi_;
    Vector y_;
    Vector phi_t_y_;
    LatentGroupLayout layout_;
    PenaltyConfig penalties_;
    AdmmConfig admm_;
    DifferenceOperator diff_;
    std::shared_ptr<const LinearSystemFactor> factor_;
    LgfSolverState state_;
};

SolveReport sgf_admm_solve(const Vector& y, const Matrix& phi, const GroupPartition& partition,
                           const PenaltyConfig& penalties, const AdmmConfig& admm,
                           const std::optional<Vector>& init = std::nullopt);

SolveReport lgf_admm_solve(const Vector& y, const Matrix& phi, const LatentGroupLayout& layout,
                           const PenaltyConfig& penalties, const AdmmConfig& admm,
                           const std::optional<Vector>& init = std::nullopt);

enum class VariantKind { Lasso, GLasso, SgLasso, FLasso, Sgf, Lgf };

std::string to_string(VariantKind kind);
// Accepts the snake_case names: lasso, g_lasso, sg_lasso, f_lasso, sgf, lgf.
VariantKind parse_variant_kind(const std::string& name);

// Zeroes the weights a variant excludes. lgf keeps lambda_g and lambda_f and drops lambda_e.
PenaltyConfig variant_config(VariantKind kind, const PenaltyConfig& base);

} // namespace fusedcs
