#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fusedcs/model.hpp"

namespace fusedcs {

struct SensingConfig
{
    std::size_t n = 140;
    double mu = 0.5;      // compression ratio M/N
    double sigma2 = 0.25; // noise variance
    std::uint64_t seed = 0;

    // round(mu * n), half up.
    std::size_t measurement_count() const;
    void validate() const;
};

// Mixes a base seed with a list of stream identifiers (splitmix64 finalizer).
std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> stream);
// Seed of one sweep cell; mu participates through its bit pattern.
std::uint64_t trial_seed(std::uint64_t base, std::size_t trial, double mu);

// Gaussian(0, 1/m) draw followed by row orthonormalization, so phi * phi^T = I_m.
// Throws InvalidDimension when m > n.
Matrix generate_measurement_matrix(std::size_t m, std::size_t n, std::uint64_t seed);
Matrix generate_measurement_matrix(const SensingConfig& config);

// Orthonormalizes the rows of `rows` in place of Gram-Schmidt, via Householder QR of
// the transpose. Sign convention matches Gram-Schmidt (positive R diagonal).
Matrix orthonormalize_rows(const Matrix& rows);

// y = phi x + v, v ~ N(0, sigma2) i.i.d.
Vector sense(const Matrix& phi, const Vector& x, double sigma2, std::uint64_t seed);

enum class SegmentKind { Zero, ExpDecay, Step, LoneGroup };

std::string to_string(SegmentKind kind);
SegmentKind parse_segment_kind(const std::string& name);

struct Segment
{
    SegmentKind kind = SegmentKind::Zero;
    std::size_t length = 0;
    double amplitude = 0.0;
    double decay_rate = 0.0; // ExpDecay only: amplitude * exp(-decay_rate * t)
};

struct BlockSpec
{
    std::vector<Segment> segments;

    std::size_t size() const;
    // Throws ValidationError if lengths do not sum to n or values are not finite.
    void validate(std::size_t n) const;
};

// The reference 140-sample signal: two exponentially decaying blocks, a step block,
// a lone three-sample group, separated by zero runs.
BlockSpec default_block_spec();

struct AmplitudeJitter
{
    double scale = 0.0; // each nonzero segment amplitude is scaled by U[1 - scale, 1 + scale]
    std::uint64_t seed = 0;
};

Vector make_test_signal(const BlockSpec& spec, std::optional<AmplitudeJitter> jitter = std::nullopt);

} // namespace fusedcs
