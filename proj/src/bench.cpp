#include "fusedcs/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <thread>

namespace fusedcs {

namespace {

struct Instance
{
    Matrix phi;
    Vector y;
};

// Phi and noise come from independent streams of the cell seed.
Instance draw_instance(const ExperimentSpec& spec, const Vector& x_true, double mu, std::uint64_t seed)
{
    SensingConfig cfg = spec.sensing;
    cfg.mu = mu;
    cfg.seed = derive_seed(seed, {0});
    Instance inst;
    inst.phi = generate_measurement_matrix(cfg);
    inst.y = sense(inst.phi, x_true, cfg.sigma2, derive_seed(seed, {1}));
    return inst;
}

// SGF-shaped variants on one instance share a single factorization.
class FactorCache
{
public:
    FactorCache(const Matrix& phi, const AdmmConfig& admm) : phi_(phi), admm_(admm) {}

    std::shared_ptr<const LinearSystemFactor> sgf()
    {
        if (!sgf_)
            sgf_ = std::make_shared<const LinearSystemFactor>(
                factorize_sgf(phi_, DifferenceOperator(static_cast<std::size_t>(phi_.cols())), admm_));
        return sgf_;
    }

private:
    const Matrix& phi_;
    const AdmmConfig& admm_;
    std::shared_ptr<const LinearSystemFactor> sgf_;
};

SolveReport solve_with(const VariantEntry& variant, const Matrix& phi, const Vector& y, const AdmmConfig& admm,
                       FactorCache* cache)
{
    try {
        if (const auto* layout = std::get_if<LatentGroupLayout>(&variant.grouping))
            return LgfAdmm(phi, y, *layout, variant.penalties, admm).solve();
        const auto& partition = std::get<GroupPartition>(variant.grouping);
        return SgfAdmm(phi, y, partition, variant.penalties, admm, cache ? cache->sgf() : nullptr).solve();
    } catch (const SolverError& e) {
        throw e.with_context("variant '" + variant.name + "'");
    }
}

TrialResult run_trial(const VariantEntry& variant, const Instance& inst, const Vector& x_true, const AdmmConfig& admm,
                      FactorCache& cache, double mu, std::size_t trial, std::uint64_t seed, SolveReport* report_out)
{
    const auto start = std::chrono::steady_clock::now();
    SolveReport report = solve_with(variant, inst.phi, inst.y, admm, &cache);
    const auto stop = std::chrono::steady_clock::now();

    TrialResult r;
    r.variant = variant.name;
    r.mu = mu;
    r.trial = trial;
    r.seed = seed;
    r.mse = mse(x_true, report.x_hat);
    r.iterations = report.iterations;
    r.converged = report.converged;
    r.duration = stop - start;
    if (report_out)
        *report_out = std::move(report);
    return r;
}

} // namespace

SolveReport solve_variant(const VariantEntry& variant, const Matrix& phi, const Vector& y, const AdmmConfig& admm)
{
    return solve_with(variant, phi, y, admm, nullptr);
}

ReconstructionResult run_reconstruction(const ExperimentSpec& spec)
{
    spec.validate();
    ReconstructionResult result;
    result.mu = spec.sensing.mu;
    result.seed = trial_seed(spec.sensing.seed, 0, result.mu);
    result.x_true = make_test_signal(spec.signal);

    const Instance inst = draw_instance(spec, result.x_true, result.mu, result.seed);
    FactorCache cache(inst.phi, spec.admm);
    for (const auto& variant : spec.variants) {
        VariantRun run{variant, {}, {}};
        run.result = run_trial(variant, inst, result.x_true, spec.admm, cache, result.mu, 0, result.seed, &run.report);
        result.runs.push_back(std::move(run));
    }
    return result;
}

SweepResult run_mse_sweep(const ExperimentSpec& spec)
{
    spec.validate();
    if (spec.mu_grid.empty())
        throw ValidationError("mu_grid", "sweep needs at least one compression ratio");

    const Vector x_true = make_test_signal(spec.signal);
    const std::size_t cells = spec.mu_grid.size() * spec.trials;
    const std::size_t nvar = spec.variants.size();

    // Slot (cell, variant) is written by exactly one worker, so the output order
    // does not depend on scheduling.
    std::vector<TrialResult> slots(cells * nvar);
    std::vector<std::exception_ptr> errors(cells);
    std::atomic<std::size_t> next{0};

    const auto worker = [&] {
        for (std::size_t cell = next++; cell < cells; cell = next++) {
            const double mu = spec.mu_grid[cell / spec.trials];
            const std::size_t trial = cell % spec.trials;
            const std::uint64_t seed = trial_seed(spec.sensing.seed, trial, mu);
            try {
                const Instance inst = draw_instance(spec, x_true, mu, seed);
                FactorCache cache(inst.phi, spec.admm);
                for (std::size_t v = 0; v < nvar; ++v)
                    slots[cell * nvar + v] =
                        run_trial(spec.variants[v], inst, x_true, spec.admm, cache, mu, trial, seed, nullptr);
            } catch (...) {
                errors[cell] = std::current_exception();
            }
        }
    };

    std::size_t threads = spec.threads ? spec.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = std::min(threads, cells);
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < threads; ++t)
            pool.emplace_back(worker);
    }
    for (const auto& e : errors)
        if (e)
            std::rethrow_exception(e);

    SweepResult result;
    result.trials = std::move(slots);

    for (std::size_t v = 0; v < nvar; ++v) {
        for (std::size_t g = 0; g < spec.mu_grid.size(); ++g) {
            SweepCell cell;
            cell.variant = spec.variants[v].name;
            cell.mu = spec.mu_grid[g];
            cell.trials = spec.trials;
            double sum = 0.0, iters = 0.0;
            for (std::size_t t = 0; t < spec.trials; ++t) {
                const auto& r = result.trials[(g * spec.trials + t) * nvar + v];
                sum += r.mse;
                iters += static_cast<double>(r.iterations);
            }
            const double k = static_cast<double>(spec.trials);
            cell.mean_mse = sum / k;
            cell.mean_iters = iters / k;
            if (spec.trials > 1) {
                double ss = 0.0;
                for (std::size_t t = 0; t < spec.trials; ++t) {
                    const double d = result.trials[(g * spec.trials + t) * nvar + v].mse - cell.mean_mse;
                    ss += d * d;
                }
                cell.stderr_mse = std::sqrt(ss / (k - 1.0)) / std::sqrt(k);
            }
            result.cells.push_back(cell);
        }
    }
    return result;
}

} // namespace fusedcs
