#include "fusedcs/sensing.hpp"

#include <bit>
#include <cmath>
#include <random>

namespace fusedcs {

std::size_t SensingConfig::measurement_count() const
{
    return static_cast<std::size_t>(std::floor(mu * static_cast<double>(n) + 0.5));
}

void SensingConfig::validate() const
{
    if (n < 2)
        throw ValidationError("n", "signal length must be at least 2");
    if (!(std::isfinite(mu) && mu > 0.0 && mu <= 1.0))
        throw ValidationError("mu", "compression ratio must lie in (0, 1]");
    if (measurement_count() < 1)
        throw ValidationError("mu", "round(mu * n) must be at least 1");
    if (!(std::isfinite(sigma2) && sigma2 >= 0.0))
        throw ValidationError("sigma2", "noise variance must be finite and non-negative");
}

namespace {

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

} // namespace

std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> stream)
{
    std::uint64_t h = splitmix64(base);
    for (std::uint64_t s : stream)
        h = splitmix64(h ^ splitmix64(s));
    return h;
}

std::uint64_t trial_seed(std::uint64_t base, std::size_t trial, double mu)
{
    return derive_seed(base, {static_cast<std::uint64_t>(trial), std::bit_cast<std::uint64_t>(mu)});
}

Matrix orthonormalize_rows(const Matrix& rows)
{
    const auto m = rows.rows();
    const auto n = rows.cols();
    if (m > n)
        throw InvalidDimension("cannot orthonormalize " + std::to_string(m) + " rows of length " + std::to_string(n));

    Eigen::HouseholderQR<Matrix> qr(rows.transpose());
    Matrix q = qr.householderQ() * Matrix::Identity(n, m);
    const Matrix& r = qr.matrixQR();
    const double scale = std::max(1.0, r.diagonal().cwiseAbs().maxCoeff());
    for (Eigen::Index j = 0; j < m; ++j) {
        if (std::abs(r(j, j)) <= 1e-12 * scale)
            throw InvalidDimension("rows are linearly dependent; cannot orthonormalize");
        if (r(j, j) < 0.0)
            q.col(j) = -q.col(j);
    }
    return q.transpose();
}

Matrix generate_measurement_matrix(std::size_t m, std::size_t n, std::uint64_t seed)
{
    if (m == 0 || n == 0)
        throw InvalidDimension("measurement matrix needs m, n > 0");
    if (m > n)
        throw InvalidDimension("m = " + std::to_string(m) + " exceeds n = " + std::to_string(n) +
                               "; rows cannot be orthonormal");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0 / std::sqrt(static_cast<double>(m)));
    Matrix draw(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
    // Row-major fill so the draw order does not depend on Eigen's storage order.
    for (Eigen::Index i = 0; i < draw.rows(); ++i)
        for (Eigen::Index j = 0; j < draw.cols(); ++j)
            draw(i, j) = gauss(rng);
    return orthonormalize_rows(draw);
}

Matrix generate_measurement_matrix(const SensingConfig& config)
{
    config.validate();
    return generate_measurement_matrix(config.measurement_count(), config.n, config.seed);
}

Vector sense(const Matrix& phi, const Vector& x, double sigma2, std::uint64_t seed)
{
    if (phi.cols() != x.size())
        throw InvalidDimension("measurement matrix has " + std::to_string(phi.cols()) + " columns but x has " +
                               std::to_string(x.size()) + " entries");
    if (!(std::isfinite(sigma2) && sigma2 >= 0.0))
        throw ValidationError("sigma2", "noise variance must be finite and non-negative");
    Vector y = phi * x;
    if (sigma2 > 0.0) {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> gauss(0.0, std::sqrt(sigma2));
        for (Eigen::Index i = 0; i < y.size(); ++i)
            y(i) += gauss(rng);
    }
    return y;
}

std::string to_string(SegmentKind kind)
{
    switch (kind) {
    case SegmentKind::Zero: return "zero";
    case SegmentKind::ExpDecay: return "exp_decay";
    case SegmentKind::Step: return "step";
    case SegmentKind::LoneGroup: return "lone_group";
    }
    return "unknown";
}

SegmentKind parse_segment_kind(const std::string& name)
{
    if (name == "zero")
        return SegmentKind::Zero;
    if (name == "exp_decay")
        return SegmentKind::ExpDecay;
    if (name == "step")
        return SegmentKind::Step;
    if (name == "lone_group")
        return SegmentKind::LoneGroup;
    throw ValidationError("kind", "unknown segment kind '" + name + "'");
}

std::size_t BlockSpec::size() const
{
    std::size_t total = 0;
    for (const auto& s : segments)
        total += s.length;
    return total;
}

void BlockSpec::validate(std::size_t n) const
{
    if (segments.empty())
        throw ValidationError("signal.segments", "at least one segment is required");
    for (const auto& s : segments) {
        if (s.length == 0)
            throw ValidationError("signal.segments", "segment length must be positive");
        if (!std::isfinite(s.amplitude) || !std::isfinite(s.decay_rate))
            throw ValidationError("signal.segments", "segment amplitude and decay rate must be finite");
    }
    if (size() != n)
        throw ValidationError("signal.segments",
                              "segment lengths sum to " + std::to_string(size()) + ", expected n = " + std::to_string(n));
}

BlockSpec default_block_spec()
{
    using K = SegmentKind;
    return BlockSpec{{
        {K::Zero, 8, 0.0, 0.0},
        {K::ExpDecay, 18, 25.0, 0.1},
        {K::Zero, 23, 0.0, 0.0},
        {K::Step, 19, 12.0, 0.0},
        {K::Zero, 23, 0.0, 0.0},
        {K::ExpDecay, 15, 20.0, 0.12},
        {K::Zero, 17, 0.0, 0.0},
        {K::LoneGroup, 3, 10.0, 0.0},
        {K::Zero, 14, 0.0, 0.0},
    }};
}

Vector make_test_signal(const BlockSpec& spec, std::optional<AmplitudeJitter> jitter)
{
    spec.validate(spec.size());
    std::mt19937_64 rng(jitter ? jitter->seed : 0);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);

    Vector x = Vector::Zero(static_cast<Eigen::Index>(spec.size()));
    Eigen::Index pos = 0;
    for (const auto& s : spec.segments) {
        const auto len = static_cast<Eigen::Index>(s.length);
        double amp = s.amplitude;
        if (jitter && s.kind != SegmentKind::Zero)
            amp *= 1.0 + jitter->scale * unit(rng);
        switch (s.kind) {
        case SegmentKind::Zero:
            break;
        case SegmentKind::ExpDecay:
            for (Eigen::Index t = 0; t < len; ++t)
                x(pos + t) = amp * std::exp(-s.decay_rate * static_cast<double>(t));
            break;
        case SegmentKind::Step:
        case SegmentKind::LoneGroup:
            x.segment(pos, len).setConstant(amp);
            break;
        }
        pos += len;
    }
    return x;
}

} // namespace fusedcs
