#include <doctest.h>

#include <random>

#include "fusedcs/prox.hpp"
#include "oracles.hpp"

using namespace fusedcs;

namespace {

Vector vec(std::initializer_list<double> values)
{
    Vector v(static_cast<Eigen::Index>(values.size()));
    Eigen::Index i = 0;
    for (double x : values)
        v(i++) = x;
    return v;
}

ShrinkageThreshold tau(double t) { return ShrinkageThreshold(t); }

struct RandomProxInput
{
    Vector v;
    double tau_e;
    double tau_g;
};

RandomProxInput draw(std::mt19937_64& rng)
{
    std::uniform_int_distribution<int> dim(1, 16);
    std::normal_distribution<double> g(0.0, 2.0);
    std::uniform_real_distribution<double> t(0.0, 3.0);
    std::bernoulli_distribution zero(0.15);
    RandomProxInput in{Vector(dim(rng)), zero(rng) ? 0.0 : t(rng), zero(rng) ? 0.0 : t(rng)};
    for (Eigen::Index i = 0; i < in.v.size(); ++i)
        in.v(i) = g(rng);
    return in;
}

} // namespace

TEST_CASE("threshold rejects negative or non-finite values")
{
    CHECK_THROWS_AS(ShrinkageThreshold(-0.1), ValidationError);
    CHECK_THROWS_AS(ShrinkageThreshold(std::nan("")), ValidationError);
    CHECK(ShrinkageThreshold(0.0).value() == 0.0);
}

TEST_CASE("soft threshold examples")
{
    CHECK(soft_threshold(vec({2.0}), tau(0.5)) == vec({1.5}));
    CHECK(soft_threshold(vec({-0.3, 0.3}), tau(0.5)) == vec({0.0, 0.0}));
    CHECK(soft_threshold(vec({-2, 0, 1}), tau(1)) == vec({-1, 0, 0}));
    // negative entries shrink symmetrically
    CHECK(soft_threshold(vec({-3.0}), tau(1.0)) == vec({-2.0}));
}

TEST_CASE("block shrink examples")
{
    CHECK(block_shrink(vec({3, 4}), tau(5)) == vec({0, 0}));
    CHECK(block_shrink(vec({0, 0}), tau(1)) == vec({0, 0}));

    const Vector p = block_shrink(vec({3, 4}), tau(2.5));
    CHECK(p(0) == doctest::Approx(1.5).epsilon(1e-15));
    CHECK(p(1) == doctest::Approx(2.0).epsilon(1e-15));
    const Vector grid = oracle::grid_prox(vec({3, 4}), 0.0, 2.5);
    CHECK((p - grid).lpNorm<Eigen::Infinity>() < 1e-6);
}

TEST_CASE("sparse group shrink degenerates to its parts")
{
    std::mt19937_64 rng(4);
    for (int i = 0; i < 100; ++i) {
        const auto in = draw(rng);
        CHECK((sparse_group_shrink(in.v, tau(0), tau(in.tau_g)) - block_shrink(in.v, tau(in.tau_g))).norm() == 0.0);
        CHECK((sparse_group_shrink(in.v, tau(in.tau_e), tau(0)) - soft_threshold(in.v, tau(in.tau_e))).norm() == 0.0);
    }
}

TEST_CASE("sparse group shrink matches grid minimization")
{
    const Vector v = vec({2, -1});
    const Vector p = sparse_group_shrink(v, tau(0.5), tau(0.5));
    const Vector grid = oracle::grid_prox(v, 0.5, 0.5);
    CHECK((p - grid).lpNorm<Eigen::Infinity>() < 1e-6);
    // closed form: soft threshold to (1.5, -0.5), then scale by 1 - 0.5/sqrt(2.5)
    const double scale = 1.0 - 0.5 / std::sqrt(2.5);
    CHECK(p(0) == doctest::Approx(1.5 * scale).epsilon(1e-14));
    CHECK(p(1) == doctest::Approx(-0.5 * scale).epsilon(1e-14));

    std::mt19937_64 rng(19);
    std::normal_distribution<double> g(0.0, 2.0);
    std::uniform_real_distribution<double> t(0.0, 2.0);
    for (int i = 0; i < 40; ++i) {
        const Vector w = vec({g(rng), g(rng)});
        const double te = t(rng), tg = t(rng);
        CHECK((sparse_group_shrink(w, tau(te), tau(tg)) - oracle::grid_prox(w, te, tg)).lpNorm<Eigen::Infinity>() < 1e-6);
    }
}

TEST_CASE("prox outputs satisfy the subgradient optimality condition")
{
    std::mt19937_64 rng(1000);
    for (int i = 0; i < 1000; ++i) {
        const auto in = draw(rng);
        CHECK(oracle::prox_optimality_violation(in.v, sparse_group_shrink(in.v, tau(in.tau_e), tau(in.tau_g)), in.tau_e,
                                                in.tau_g) <= 1e-8);
        CHECK(oracle::prox_optimality_violation(in.v, block_shrink(in.v, tau(in.tau_g)), 0.0, in.tau_g) <= 1e-8);
        CHECK(oracle::prox_optimality_violation(in.v, soft_threshold(in.v, tau(in.tau_e)), in.tau_e, 0.0) <= 1e-8);
    }
}

TEST_CASE("the squared-norm block shrinkage is not a minimizer")
{
    // (||v||^2 - tau)_+ v / ||v||^2 fails the certificate unless ||v|| = 1
    const Vector v = vec({3, 4});
    const double t = 2.5;
    const Vector squared = std::max(v.squaredNorm() - t, 0.0) * v / v.squaredNorm();
    CHECK(oracle::prox_optimality_violation(v, squared, 0.0, t) > 1e-3);
}

TEST_CASE("prox operators are non-expansive")
{
    std::mt19937_64 rng(77);
    std::normal_distribution<double> g(0.0, 2.0);
    for (int i = 0; i < 500; ++i) {
        const auto a = draw(rng);
        Vector b = a.v;
        for (Eigen::Index j = 0; j < b.size(); ++j)
            b(j) += g(rng);
        const double dist = (a.v - b).norm() + 1e-12;
        CHECK((soft_threshold(a.v, tau(a.tau_e)) - soft_threshold(b, tau(a.tau_e))).norm() <= dist);
        CHECK((block_shrink(a.v, tau(a.tau_g)) - block_shrink(b, tau(a.tau_g))).norm() <= dist);
        CHECK((sparse_group_shrink(a.v, tau(a.tau_e), tau(a.tau_g)) - sparse_group_shrink(b, tau(a.tau_e), tau(a.tau_g)))
                  .norm() <= dist);
    }
}

TEST_CASE("zero threshold is the identity and block shrink preserves direction")
{
    std::mt19937_64 rng(31);
    for (int i = 0; i < 200; ++i) {
        const auto in = draw(rng);
        CHECK(soft_threshold(in.v, tau(0)) == in.v);
        CHECK(block_shrink(in.v, tau(0)) == in.v);
        CHECK(sparse_group_shrink(in.v, tau(0), tau(0)) == in.v);

        const Vector p = block_shrink(in.v, tau(in.tau_g));
        const double c = p.norm() / in.v.norm();
        CHECK(c >= 0.0);
        CHECK(c <= 1.0);
        CHECK((p - c * in.v).norm() <= 1e-12 * in.v.norm());
    }
}
