#include <doctest.h>

#include <cstring>
#include <random>

#include "fusedcs/sensing.hpp"
#include "fusedcs/solvers.hpp"
#include "oracles.hpp"

using namespace fusedcs;

namespace {

struct Instance
{
    Matrix phi;
    Vector y;
    Vector x;
};

// Block-sparse signal seen through a raw Gaussian matrix plus noise.
Instance random_instance(std::uint64_t seed, Eigen::Index n, Eigen::Index m)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    Instance inst{Matrix(m, n), Vector(m), Vector::Zero(n)};
    for (Eigen::Index i = 0; i < inst.phi.size(); ++i)
        inst.phi.data()[i] = g(rng);
    const Eigen::Index start = static_cast<Eigen::Index>(seed % static_cast<std::uint64_t>(n / 2));
    for (Eigen::Index j = start; j < std::min(n, start + n / 3); ++j)
        inst.x(j) = 3.0 + 0.3 * g(rng);
    inst.y = inst.phi * inst.x;
    for (Eigen::Index i = 0; i < m; ++i)
        inst.y(i) += 0.5 * g(rng);
    return inst;
}

AdmmConfig tight()
{
    AdmmConfig admm;
    admm.tol = 1e-10;
    admm.max_iter = 100000;
    return admm;
}

std::vector<oracle::Group> groups_of(const GroupPartition& p)
{
    std::vector<oracle::Group> out;
    for (std::size_t i = 0; i < p.num_groups(); ++i)
        out.push_back({p.group_begin(i), p.group_size()});
    return out;
}

std::vector<oracle::Group> groups_of(const LatentGroupLayout& l)
{
    std::vector<oracle::Group> out;
    for (std::size_t i = 0; i < l.num_groups(); ++i)
        out.push_back({l.group_begin(i), l.group_size()});
    return out;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

bool bit_equal(const std::vector<double>& a, const std::vector<double>& b)
{
    return a.size() == b.size() && std::memcmp(a.data(), b.data(), sizeof(double) * a.size()) == 0;
}

} // namespace

TEST_CASE("SGF factor on the 2x2 example")
{
    AdmmConfig admm;
    admm.c_u = admm.c_z = 1.0;
    const auto f = factorize_sgf(Matrix::Zero(1, 2), DifferenceOperator(2), admm);
    // D^T D + I = [[2, -1], [-1, 3]], inverse = [[3, 1], [1, 2]] / 5
    Matrix expected(2, 2);
    expected << 2, -1, -1, 3;
    CHECK(f.system() == expected);
    const Vector x = f.solve(Vector::Unit(2, 0));
    CHECK(x(0) == doctest::Approx(0.6).epsilon(1e-14));
    CHECK(x(1) == doctest::Approx(0.2).epsilon(1e-14));
}

TEST_CASE("factor solves reproduce the system")
{
    std::mt19937_64 rng(12);
    std::normal_distribution<double> g;
    const Matrix phi = generate_measurement_matrix(20, 40, 3);
    const auto layout = build_latent_layout(40, 10, 5);
    const auto sgf = factorize_sgf(phi, DifferenceOperator(40), AdmmConfig{});
    const auto lgf = factorize_lgf(phi, DifferenceOperator(40), layout, AdmmConfig{});
    for (int i = 0; i < 10; ++i) {
        Vector b(40);
        for (auto& v : b)
            v = g(rng);
        CHECK((sgf.system() * sgf.solve(b) - b).norm() <= 1e-10 * b.norm());
        CHECK((lgf.system() * lgf.solve(b) - b).norm() <= 1e-10 * b.norm());
    }

    AdmmConfig dominant;
    dominant.c_u = 1e8;
    const auto big = factorize_sgf(phi, DifferenceOperator(40), dominant);
    const Vector b = Vector::LinSpaced(40, 1.0, 2.0);
    CHECK((big.solve(b) - b / dominant.c_u).norm() <= 1e-6 * (b / dominant.c_u).norm());
}

TEST_CASE("LGF factor adds c_u times the membership counts")
{
    const Matrix phi = generate_measurement_matrix(70, 140, 8);
    const auto layout = build_latent_layout(140, 10, 5);
    AdmmConfig admm;
    const auto f = factorize_lgf(phi, DifferenceOperator(140), layout, admm);
    const Matrix base = phi.transpose() * phi + admm.c_z * DifferenceOperator(140).gram();
    const Matrix extra = f.system() - base;
    CHECK((extra - Matrix(extra.diagonal().asDiagonal())).lpNorm<Eigen::Infinity>() < 1e-12);
    for (Eigen::Index j = 0; j < 140; ++j) {
        const double expected = (j < 5 || j >= 135) ? 2.0 : 4.0;
        CHECK(extra(j, j) == doctest::Approx(expected).epsilon(1e-12));
    }
    CHECK_THROWS_AS(build_latent_layout(140, 10, 3), InvalidLayout);
}

TEST_CASE("SGF with zero measurements returns zero immediately")
{
    const Matrix phi = generate_measurement_matrix(6, 12, 2);
    const auto report = sgf_admm_solve(Vector::Zero(6), phi, build_partition(12, 3), {0.5, 5, 3}, AdmmConfig{});
    CHECK(report.converged);
    CHECK(report.iterations <= 2);
    CHECK(report.x_hat.norm() <= 1e-3);
    CHECK(report.traces.objective.size() == report.iterations);
    CHECK(report.traces.step.size() == report.iterations);
}

TEST_CASE("LGF with zero measurements returns zero immediately")
{
    const Matrix phi = generate_measurement_matrix(6, 12, 2);
    const auto report = lgf_admm_solve(Vector::Zero(6), phi, build_latent_layout(12, 4, 2), {0.0, 5, 3}, AdmmConfig{});
    CHECK(report.converged);
    CHECK(report.x_hat.norm() <= 1e-3);
}

TEST_CASE("SGF reaches the primal-dual oracle optimum")
{
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
        const auto inst = random_instance(seed, 12, 8);
        const auto partition = build_partition(12, 3);
        const PenaltyConfig p{0.5, 5.0, 3.0};
        SgfAdmm solver(inst.phi, inst.y, partition, p, tight());
        const auto report = solver.solve();
        REQUIRE(report.converged);

        const oracle::Objective obj{inst.phi, inst.y, p.lambda_e, p.lambda_g, p.lambda_f, groups_of(partition), true};
        const auto best = oracle::primal_dual_minimize(obj);
        CHECK(rel(solver.objective(report.x_hat), best.value) <= 1e-4);
        CHECK(rel(report.traces.objective.back(), obj.value(report.x_hat)) <= 1e-12);
    }
}

TEST_CASE("SGF with only the l1 term matches ISTA")
{
    for (std::uint64_t seed = 10; seed <= 13; ++seed) {
        const auto inst = random_instance(seed, 12, 8);
        const PenaltyConfig p = variant_config(VariantKind::Lasso, {0.8, 5.0, 3.0});
        SgfAdmm solver(inst.phi, inst.y, build_partition(12, 3), p, tight());
        const auto report = solver.solve();
        const auto ista = oracle::ista_lasso(inst.phi, inst.y, p.lambda_e);
        CHECK(rel(solver.objective(report.x_hat), ista.value) <= 1e-4);
    }
}

TEST_CASE("LGF reaches the primal-dual oracle optimum")
{
    for (std::uint64_t seed = 20; seed <= 23; ++seed) {
        const auto inst = random_instance(seed, 12, 8);
        const auto layout = build_latent_layout(12, 4, 2);
        const PenaltyConfig p{0.0, 5.0, 3.0};
        LgfAdmm solver(inst.phi, inst.y, layout, p, tight());
        const auto report = solver.solve();
        REQUIRE(report.converged);
        const oracle::Objective obj{inst.phi, inst.y, 0.0, p.lambda_g, p.lambda_f, groups_of(layout), true};
        CHECK(rel(solver.objective(report.x_hat), oracle::primal_dual_minimize(obj).value) <= 1e-4);
    }
}

TEST_CASE("one overlapping group spanning the signal equals SGF with G = 1")
{
    const auto inst = random_instance(31, 12, 8);
    const PenaltyConfig p{0.0, 5.0, 3.0};
    LgfAdmm lgf(inst.phi, inst.y, build_latent_layout(12, 12, 6), p, tight());
    SgfAdmm sgf(inst.phi, inst.y, build_partition(12, 1), p, tight());
    const auto a = lgf.solve();
    const auto b = sgf.solve();
    CHECK(rel(lgf.objective(a.x_hat), sgf.objective(b.x_hat)) <= 1e-6);
}

TEST_CASE("LGF ignores lambda_e")
{
    const auto inst = random_instance(3, 12, 8);
    const auto layout = build_latent_layout(12, 4, 2);
    const auto a = lgf_admm_solve(inst.y, inst.phi, layout, {0.0, 5.0, 3.0}, AdmmConfig{});
    const auto b = lgf_admm_solve(inst.y, inst.phi, layout, {9.0, 5.0, 3.0}, AdmmConfig{});
    CHECK(a.x_hat == b.x_hat);
}

TEST_CASE("primal residuals are small at termination on desk-scale instances")
{
    const Vector x = make_test_signal(default_block_spec());
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const Matrix phi = generate_measurement_matrix(70, 140, derive_seed(seed, {0}));
        const Vector y = sense(phi, x, 0.25, derive_seed(seed, {1}));
        const AdmmConfig admm;
        const auto sgf = sgf_admm_solve(y, phi, build_partition(140, 14), {0.5, 5, 3}, admm);
        const auto lgf = lgf_admm_solve(y, phi, build_latent_layout(140, 10, 5), {0.0, 5, 3}, admm);
        for (const auto* r : {&sgf, &lgf}) {
            REQUIRE(r->converged);
            CHECK(r->traces.primal_group.back() <= 10 * admm.tol);
            CHECK(r->traces.primal_fusion.back() <= 10 * admm.tol);
        }
    }
}

TEST_CASE("a converged point is an approximate fixed point")
{
    const auto inst = random_instance(41, 16, 10);
    const double tol = AdmmConfig{}.tol;
    SgfAdmm sgf(inst.phi, inst.y, build_partition(16, 4), {0.5, 5, 3}, tight());
    REQUIRE(sgf.solve().converged);
    CHECK(sgf.step() <= tol);

    LgfAdmm lgf(inst.phi, inst.y, build_latent_layout(16, 4, 2), {0.0, 5, 3}, tight());
    REQUIRE(lgf.solve().converged);
    CHECK(lgf.step() <= tol);
}

TEST_CASE("zero start and least-squares warm start reach the same objective")
{
    for (std::uint64_t seed = 50; seed < 53; ++seed) {
        const auto inst = random_instance(seed, 16, 10);
        const Vector warm = least_squares_estimate(inst.phi, inst.y);
        CHECK((inst.phi * warm - inst.y).norm() < 1e-9);

        SgfAdmm sgf(inst.phi, inst.y, build_partition(16, 4), {0.5, 5, 3}, tight());
        const double cold = sgf.objective(sgf.solve().x_hat);
        const double hot = sgf.objective(sgf.solve(warm).x_hat);
        CHECK(rel(cold, hot) <= 1e-6);

        LgfAdmm lgf(inst.phi, inst.y, build_latent_layout(16, 4, 2), {0.0, 5, 3}, tight());
        CHECK(rel(lgf.objective(lgf.solve().x_hat), lgf.objective(lgf.solve(warm).x_hat)) <= 1e-6);
    }
}

TEST_CASE("cached factor traces are bit-identical to refactoring every iteration")
{
    const Vector x = make_test_signal(default_block_spec());
    const Matrix phi = generate_measurement_matrix(70, 140, 17);
    const Vector y = sense(phi, x, 0.25, 18);
    AdmmConfig admm;
    admm.tol = 1e-300; // force the full iteration budget
    const DifferenceOperator d(140);
    const auto partition = build_partition(140, 14);

    auto reference = std::make_shared<const LinearSystemFactor>(factorize_sgf(phi, d, admm, LinearSolvePolicy::Refactor));
    const auto cached = SgfAdmm(phi, y, partition, {0.5, 5, 3}, admm).solve();
    const auto fresh = SgfAdmm(phi, y, partition, {0.5, 5, 3}, admm, reference).solve();
    CHECK(cached.iterations == 150);
    CHECK(bit_equal(cached.traces.objective, fresh.traces.objective));
    CHECK(bit_equal(cached.traces.step, fresh.traces.step));
    CHECK(cached.x_hat == fresh.x_hat);
}

TEST_CASE("final objective is at its running minimum")
{
    const auto inst = random_instance(61, 16, 10);
    SgfAdmm sgf(inst.phi, inst.y, build_partition(16, 4), {0.5, 5, 3}, tight());
    const auto r = sgf.solve();
    const double running_min = *std::min_element(r.traces.objective.begin(), r.traces.objective.end());
    CHECK(r.traces.objective.back() - running_min <= 1e-8 * std::max(1.0, running_min));
}

TEST_CASE("literal Jacobi ordering diverges and is reported")
{
    // With every penalty at zero the Jacobi cycle is linear with spectral radius 1 + sqrt(2).
    const auto inst = random_instance(71, 12, 8);
    AdmmConfig jacobi = tight();
    jacobi.order = UpdateOrder::Jacobi;
    SgfAdmm jc(inst.phi, inst.y, build_partition(12, 3), {0.5, 5, 3}, jacobi);
    jc.reset();
    std::vector<double> steps;
    for (int i = 0; i < 60; ++i)
        steps.push_back(jc.step());
    CHECK(steps.back() > 1e12 * steps.front());
    CHECK_THROWS_AS(jc.solve(), SolverError);

    LgfAdmm lj(inst.phi, inst.y, build_latent_layout(12, 4, 2), {0, 5, 3}, jacobi);
    CHECK_THROWS_AS(lj.solve(), SolverError);

    SgfAdmm gs(inst.phi, inst.y, build_partition(12, 3), {0.5, 5, 3}, tight());
    CHECK(gs.solve().converged);
}

TEST_CASE("solver input validation")
{
    const Matrix phi = generate_measurement_matrix(6, 12, 2);
    CHECK_THROWS_AS(sgf_admm_solve(Vector::Zero(5), phi, build_partition(12, 3), {}, AdmmConfig{}), InvalidDimension);
    CHECK_THROWS_AS(sgf_admm_solve(Vector::Zero(6), phi, build_partition(10, 2), {}, AdmmConfig{}), InvalidDimension);
    CHECK_THROWS_AS(sgf_admm_solve(Vector::Zero(6), phi, build_partition(12, 3), {}, AdmmConfig{}, Vector::Zero(3)),
                    InvalidDimension);
    Matrix bad = phi;
    bad(0, 0) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(factorize_sgf(bad, DifferenceOperator(12), AdmmConfig{}), ValidationError);
    AdmmConfig negative;
    negative.c_u = -1.0;
    CHECK_THROWS_AS(sgf_admm_solve(Vector::Zero(6), phi, build_partition(12, 3), {}, negative), ValidationError);
}

TEST_CASE("non-finite iterates raise a solver error with the iteration index")
{
    const Matrix phi = Matrix::Ones(2, 4);
    const Vector y = Vector::Constant(2, 1e308);
    try {
        sgf_admm_solve(y, phi, build_partition(4, 2), {0.0, 0.0, 0.0}, AdmmConfig{});
        FAIL("expected a solver error");
    } catch (const SolverError& e) {
        CHECK(e.iteration() >= 1);
        CHECK(std::string(e.what()).find("iteration") != std::string::npos);
    }
}

TEST_CASE("variant configurations zero the excluded weights")
{
    const PenaltyConfig base{0.5, 5.0, 3.0};
    CHECK(variant_config(VariantKind::GLasso, base) == PenaltyConfig{0.0, 5.0, 0.0});
    CHECK(variant_config(VariantKind::Lasso, base) == PenaltyConfig{0.5, 0.0, 0.0});
    CHECK(variant_config(VariantKind::SgLasso, base) == PenaltyConfig{0.5, 5.0, 0.0});
    CHECK(variant_config(VariantKind::FLasso, base) == PenaltyConfig{0.5, 0.0, 3.0});
    CHECK(variant_config(VariantKind::Sgf, base) == base);
    CHECK(variant_config(VariantKind::Lgf, base) == PenaltyConfig{0.0, 5.0, 3.0});
    CHECK(parse_variant_kind("g_lasso") == VariantKind::GLasso);
    CHECK_THROWS_AS(parse_variant_kind("ridge"), ValidationError);
}
