#include "fusedcs/solvers.hpp"

#include <cmath>
#include <functional>

#include "fusedcs/prox.hpp"

namespace fusedcs {

namespace {

void require_finite(const Matrix& m, const char* field)
{
    if (!m.allFinite())
        throw ValidationError(field, "has non-finite entries");
}

void check_instance(const Matrix& phi, const Vector& y, std::size_t n)
{
    if (static_cast<std::size_t>(phi.cols()) != n)
        throw InvalidDimension("measurement matrix has " + std::to_string(phi.cols()) + " columns, grouping expects " +
                               std::to_string(n));
    if (phi.rows() != y.size())
        throw InvalidDimension("y has " + std::to_string(y.size()) + " entries, measurement matrix has " +
                               std::to_string(phi.rows()) + " rows");
    require_finite(phi, "phi");
    require_finite(y, "y");
}

Vector checked_init(const std::optional<Vector>& init, std::size_t n)
{
    if (!init)
        return Vector::Zero(static_cast<Eigen::Index>(n));
    if (static_cast<std::size_t>(init->size()) != n)
        throw InvalidDimension("initial x has " + std::to_string(init->size()) + " entries, expected " +
                               std::to_string(n));
    require_finite(*init, "init");
    return *init;
}

template <typename Solver>
SolveReport run_admm(Solver& solver, const AdmmConfig& admm, const std::optional<Vector>& init,
                     const std::function<void(SolveTraces&, double)>& record)
{
    solver.reset(init);
    SolveReport report;
    for (std::size_t it = 0; it < admm.max_iter; ++it) {
        const double change = solver.step();
        record(report.traces, change);
        // x(1) - x(0) compares against the initialization, not a previous update
        if (it > 0 && change <= admm.tol) {
            report.converged = true;
            break;
        }
    }
    report.x_hat = solver.state().x;
    report.iterations = solver.state().iteration;
    return report;
}

} // namespace

LinearSystemFactor::LinearSystemFactor(Matrix system, Formulation formulation, LinearSolvePolicy policy)
    : system_(std::move(system)), formulation_(formulation), policy_(policy)
{
    if (system_.rows() != system_.cols())
        throw InvalidDimension("x-update system matrix is not square");
    require_finite(system_, "system");
    llt_.compute(system_);
    if (llt_.info() != Eigen::Success)
        throw SolverError("x-update system matrix is not positive definite", 0);
}

Vector LinearSystemFactor::solve(const Vector& rhs) const
{
    if (rhs.size() != system_.rows())
        throw InvalidDimension("right-hand side has " + std::to_string(rhs.size()) + " entries, system is " +
                               std::to_string(system_.rows()) + "x" + std::to_string(system_.rows()));
    if (policy_ == LinearSolvePolicy::Refactor) {
        Eigen::LLT<Matrix> fresh(system_);
        return fresh.solve(rhs);
    }
    return llt_.solve(rhs);
}

LinearSystemFactor factorize_sgf(const Matrix& phi, const DifferenceOperator& diff, const AdmmConfig& admm,
                                 LinearSolvePolicy policy)
{
    admm.validate();
    if (static_cast<std::size_t>(phi.cols()) != diff.size())
        throw InvalidDimension("measurement matrix columns do not match the difference operator size");
    require_finite(phi, "phi");
    const auto n = phi.cols();
    Matrix system = phi.transpose() * phi + admm.c_z * diff.gram() + admm.c_u * Matrix::Identity(n, n);
    return LinearSystemFactor(std::move(system), Formulation::Sgf, policy);
}

LinearSystemFactor factorize_lgf(const Matrix& phi, const DifferenceOperator& diff, const LatentGroupLayout& layout,
                                 const AdmmConfig& admm, LinearSolvePolicy policy)
{
    admm.validate();
    if (static_cast<std::size_t>(phi.cols()) != diff.size() || layout.size() != diff.size())
        throw InvalidDimension("measurement matrix, layout and difference operator sizes disagree");
    require_finite(phi, "phi");
    if (layout.membership_counts().minCoeff() < 1.0)
        throw InvalidLayout("layout leaves indices uncovered; W^T W would be singular");
    Matrix system = phi.transpose() * phi + admm.c_z * diff.gram();
    system.diagonal() += admm.c_u * layout.membership_counts();
    return LinearSystemFactor(std::move(system), Formulation::Lgf, policy);
}

Vector least_squares_estimate(const Matrix& phi, const Vector& y)
{
    if (phi.rows() != y.size())
        throw InvalidDimension("y does not match the measurement matrix rows");
    return phi.completeOrthogonalDecomposition().solve(y);
}

// ---------------------------------------------------------------------------
// SGF

SgfAdmm::SgfAdmm(Matrix phi, Vector y, GroupPartition partition, PenaltyConfig penalties, AdmmConfig admm,
                 std::shared_ptr<const LinearSystemFactor> factor)
    : phi_(std::move(phi)), y_(std::move(y)), partition_(partition), penalties_(penalties), admm_(admm),
      diff_(partition.size()), factor_(std::move(factor))
{
    check_instance(phi_, y_, partition_.size());
    penalties_.validate();
    admm_.validate();
    phi_t_y_ = phi_.transpose() * y_;
    if (!factor_)
        factor_ = std::make_shared<const LinearSystemFactor>(factorize_sgf(phi_, diff_, admm_));
    else if (factor_->formulation() != Formulation::Sgf || factor_->system().rows() != phi_.cols())
        throw InvalidDimension("supplied factor does not belong to an SGF problem of this size");
    reset();
}

void SgfAdmm::reset(const std::optional<Vector>& init)
{
    const std::size_t n = partition_.size();
    state_.x = checked_init(init, n);
    state_.u = state_.x;
    state_.z = diff_.apply(state_.x);
    state_.rho_u = Vector::Zero(static_cast<Eigen::Index>(n));
    state_.rho_z = Vector::Zero(static_cast<Eigen::Index>(n));
    state_.iteration = 0;
}

double SgfAdmm::step()
{
    auto& s = state_;
    const Vector x_prev = s.x;

    Vector rhs = phi_t_y_ - diff_.apply_transpose(s.rho_z - admm_.c_z * s.z) - s.rho_u + admm_.c_u * s.u;
    s.x = factor_->solve(rhs);

    const Vector& x_src = admm_.order == UpdateOrder::GaussSeidel ? s.x : x_prev;

    const ShrinkageThreshold tau_e(penalties_.lambda_e / admm_.c_u);
    const ShrinkageThreshold tau_g(penalties_.lambda_g / admm_.c_u);
    const auto len = static_cast<Eigen::Index>(partition_.group_size());
    for (std::size_t i = 0; i < partition_.num_groups(); ++i) {
        const auto b = static_cast<Eigen::Index>(partition_.group_begin(i));
        s.u.segment(b, len) =
            sparse_group_shrink(x_src.segment(b, len) + s.rho_u.segment(b, len) / admm_.c_u, tau_e, tau_g);
    }
    s.z = soft_threshold(diff_.apply(x_src) + s.rho_z / admm_.c_z, ShrinkageThreshold(penalties_.lambda_f / admm_.c_z));

    s.rho_u += admm_.c_u * (s.x - s.u);
    s.rho_z += admm_.c_z * (diff_.apply(s.x) - s.z);
    ++s.iteration;

    if (!s.x.allFinite() || !s.u.allFinite() || !s.z.allFinite() || !s.rho_u.allFinite() || !s.rho_z.allFinite())
        throw SolverError("SGF ADMM iterate became non-finite", s.iteration);
    return (s.x - x_prev).norm();
}

double SgfAdmm::objective(const Vector& x, FusionForm fusion) const
{
    return sgf_objective(x, y_, phi_, partition_, penalties_, fusion);
}

void SgfAdmm::record(SolveTraces& traces, double step) const
{
    traces.objective.push_back(objective(state_.x, FusionForm::Operator));
    traces.objective_pairwise.push_back(objective(state_.x, FusionForm::Pairwise));
    traces.primal_group.push_back((state_.u - state_.x).norm());
    traces.primal_fusion.push_back((state_.z - diff_.apply(state_.x)).norm());
    traces.step.push_back(step);
}

SolveReport SgfAdmm::solve(const std::optional<Vector>& init)
{
    return run_admm(*this, admm_, init, [this](SolveTraces& t, double d) { record(t, d); });
}

// ---------------------------------------------------------------------------
// LGF

LgfAdmm::LgfAdmm(Matrix phi, Vector y, LatentGroupLayout layout, PenaltyConfig penalties, AdmmConfig admm,
                 std::shared_ptr<const LinearSystemFactor> factor)
    : phi_(std::move(phi)), y_(std::move(y)), layout_(std::move(layout)), penalties_(penalties), admm_(admm),
      diff_(layout_.size()), factor_(std::move(factor))
{
    check_instance(phi_, y_, layout_.size());
    penalties_.validate();
    admm_.validate();
    phi_t_y_ = phi_.transpose() * y_;
    if (!factor_)
        factor_ = std::make_shared<const LinearSystemFactor>(factorize_lgf(phi_, diff_, layout_, admm_));
    else if (factor_->formulation() != Formulation::Lgf || factor_->system().rows() != phi_.cols())
        throw InvalidDimension("supplied factor does not belong to an LGF problem of this size");
    reset();
}

void LgfAdmm::reset(const std::optional<Vector>& init)
{
    const std::size_t n = layout_.size();
    state_.x = checked_init(init, n);
    state_.u_tilde = layout_.gather(state_.x);
    state_.rho_u_tilde = Vector::Zero(static_cast<Eigen::Index>(layout_.stacked_size()));
    state_.z = diff_.apply(state_.x);
    state_.rho_z = Vector::Zero(static_cast<Eigen::Index>(n));
    state_.iteration = 0;
}

double LgfAdmm::step()
{
    auto& s = state_;
    const Vector x_prev = s.x;

    Vector rhs = phi_t_y_ - diff_.apply_transpose(s.rho_z - admm_.c_z * s.z) -
                 layout_.scatter_add(s.rho_u_tilde - admm_.c_u * s.u_tilde);
    s.x = factor_->solve(rhs);

    const Vector& x_src = admm_.order == UpdateOrder::GaussSeidel ? s.x : x_prev;

    const ShrinkageThreshold tau_g(penalties_.lambda_g / admm_.c_u);
    const Vector wx_src = layout_.gather(x_src);
    const auto len = static_cast<Eigen::Index>(layout_.group_size());
    for (std::size_t i = 0; i < layout_.num_groups(); ++i) {
        const auto b = static_cast<Eigen::Index>(i) * len;
        s.u_tilde.segment(b, len) = block_shrink(wx_src.segment(b, len) + s.rho_u_tilde.segment(b, len) / admm_.c_u, tau_g);
    }
    s.z = soft_threshold(diff_.apply(x_src) + s.rho_z / admm_.c_z, ShrinkageThreshold(penalties_.lambda_f / admm_.c_z));

    s.rho_u_tilde += admm_.c_u * (layout_.gather(s.x) - s.u_tilde);
    s.rho_z += admm_.c_z * (diff_.apply(s.x) - s.z);
    ++s.iteration;

    if (!s.x.allFinite() || !s.u_tilde.allFinite() || !s.z.allFinite() || !s.rho_u_tilde.allFinite() ||
        !s.rho_z.allFinite())
        throw SolverError("LGF ADMM iterate became non-finite", s.iteration);
    return (s.x - x_prev).norm();
}

double LgfAdmm::objective(const Vector& x, FusionForm fusion) const
{
    return lgf_objective(x, y_, phi_, layout_, penalties_, fusion);
}

void LgfAdmm::record(SolveTraces& traces, double step) const
{
    traces.objective.push_back(objective(state_.x, FusionForm::Operator));
    traces.objective_pairwise.push_back(objective(state_.x, FusionForm::Pairwise));
    traces.primal_group.push_back((state_.u_tilde - layout_.gather(state_.x)).norm());
    traces.primal_fusion.push_back((state_.z - diff_.apply(state_.x)).norm());
    traces.step.push_back(step);
}

SolveReport LgfAdmm::solve(const std::optional<Vector>& init)
{
    return run_admm(*this, admm_, init, [this](SolveTraces& t, double d) { record(t, d); });
}

SolveReport sgf_admm_solve(const Vector& y, const Matrix& phi, const GroupPartition& partition,
                           const PenaltyConfig& penalties, const AdmmConfig& admm, const std::optional<Vector>& init)
{
    SgfAdmm solver(phi, y, partition, penalties, admm);
    return solver.solve(init);
}

SolveReport lgf_admm_solve(const Vector& y, const Matrix& phi, const LatentGroupLayout& layout,
                           const PenaltyConfig& penalties, const AdmmConfig& admm, const std::optional<Vector>& init)
{
    LgfAdmm solver(phi, y, layout, penalties, admm);
    return solver.solve(init);
}

// ---------------------------------------------------------------------------

std::string to_string(VariantKind kind)
{
    switch (kind) {
    case VariantKind::Lasso: return "lasso";
    case VariantKind::GLasso: return "g_lasso";
    case VariantKind::SgLasso: return "sg_lasso";
    case VariantKind::FLasso: return "f_lasso";
    case VariantKind::Sgf: return "sgf";
    case VariantKind::Lgf: return "lgf";
    }
    return "unknown";
}

VariantKind parse_variant_kind(const std::string& name)
{
    for (auto kind : {VariantKind::Lasso, VariantKind::GLasso, VariantKind::SgLasso, VariantKind::FLasso,
                      VariantKind::Sgf, VariantKind::Lgf})
        if (to_string(kind) == name)
            return kind;
    throw ValidationError("kind", "unknown variant '" + name + "'");
}

PenaltyConfig variant_config(VariantKind kind, const PenaltyConfig& base)
{
    PenaltyConfig p = base;
    switch (kind) {
    case VariantKind::Lasso: p.lambda_g = p.lambda_f = 0.0; break;
    case VariantKind::GLasso: p.lambda_e = p.lambda_f = 0.0; break;
    case VariantKind::SgLasso: p.lambda_f = 0.0; break;
    case VariantKind::FLasso: p.lambda_g = 0.0; break;
    case VariantKind::Sgf: break;
    case VariantKind::Lgf: p.lambda_e = 0.0; break;
    }
    return p;
}

} // namespace fusedcs
