#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "fusedcs/model.hpp"
#include "fusedcs/sensing.hpp"
#include "fusedcs/solvers.hpp"

namespace fusedcs {

using Grouping = std::variant<GroupPartition, LatentGroupLayout>;

struct VariantEntry
{
    std::string name;
    VariantKind kind = VariantKind::Sgf;
    PenaltyConfig penalties; // already reduced through variant_config
    Grouping grouping;
};

struct ExperimentSpec
{
    SensingConfig sensing;
    BlockSpec signal;
    std::vector<VariantEntry> variants;
    AdmmConfig admm;
    std::size_t trials = 20;
    std::vector<double> mu_grid;
    std::size_t threads = 0; // 0: hardware concurrency

    void validate() const;
};

// The default experiment: n = 140, sigma2 = 0.25, mu = 0.5, SGF-LASSO, LGF-LASSO and
// G-LASSO (lambda_g = 12.5) with group size 10, overlap 5, c_u = c_z = 2,
// max_iter = 150, tol = 1e-3, 20 trials over mu = 0.1 .. 0.9.
ExperimentSpec default_experiment();

class ConfigParseError : public Error
{
public:
    ConfigParseError(const std::string& what, int line) : Error(what), line_(line) {}
    int line() const noexcept { return line_; }

private:
    int line_;
};

// YAML experiment description; every key is optional. See configs/reference.yaml.
ExperimentSpec parse_config(const std::string& text);
ExperimentSpec load_config(const std::filesystem::path& path);
// Canonical YAML rendering of a resolved spec; round-trips through parse_config.
std::string dump_config(const ExperimentSpec& spec);

// Keeps the variants whose name or kind appears in `selection`.
void select_variants(ExperimentSpec& spec, const std::vector<std::string>& selection);

struct TrialResult
{
    std::string variant;
    double mu = 0.0;
    std::size_t trial = 0;
    std::uint64_t seed = 0;
    double mse = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
    std::chrono::duration<double> duration{};
};

// Solves one (phi, y) instance with one variant.
SolveReport solve_variant(const VariantEntry& variant, const Matrix& phi, const Vector& y, const AdmmConfig& admm);

struct VariantRun
{
    VariantEntry variant;
    SolveReport report;
    TrialResult result;
};

struct ReconstructionResult
{
    double mu = 0.0;
    std::uint64_t seed = 0;
    Vector x_true;
    std::vector<VariantRun> runs;
};

// One trial per variant at spec.sensing.mu; all variants share phi and noise.
ReconstructionResult run_reconstruction(const ExperimentSpec& spec);

struct SweepCell
{
    std::string variant;
    double mu = 0.0;
    double mean_mse = 0.0;
    double stderr_mse = 0.0; // 0 when trials == 1
    double mean_iters = 0.0;
    std::size_t trials = 0;
};

struct SweepResult
{
    std::vector<TrialResult> trials; // sorted by (mu, trial, variant order)
    std::vector<SweepCell> cells;    // sorted by (variant order, mu)
};

SweepResult run_mse_sweep(const ExperimentSpec& spec);

// Writes CSV and SVG files into out_dir (created if needed); returns the written paths.
std::vector<std::filesystem::path> emit_outputs(const ReconstructionResult& result,
                                                const std::filesystem::path& out_dir);
std::vector<std::filesystem::path> emit_outputs(const SweepResult& result, const std::filesystem::path& out_dir);

// manifest.txt: library version, seed, config hash and the written files.
std::filesystem::path write_run_manifest(const ExperimentSpec& spec, const std::vector<std::filesystem::path>& files,
                                         const std::filesystem::path& out_dir);

// Shortest representation that round-trips to the same double.
std::string format_double(double value);
// RFC 4180 field quoting.
std::string csv_field(const std::string& value);

std::string library_version();

} // namespace fusedcs
