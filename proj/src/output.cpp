#include <cctype>
#include <charconv>
#include <cstdio>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "fusedcs/bench.hpp"
#include "fusedcs/svg_plot.hpp"

#ifndef FUSEDCS_VERSION
#define FUSEDCS_VERSION "unknown"
#endif

namespace fusedcs {

namespace fs = std::filesystem;

std::string library_version() { return FUSEDCS_VERSION; }

std::string format_double(double value)
{
    if (std::isnan(value))
        return "nan";
    if (std::isinf(value))
        return value > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

std::string csv_field(const std::string& value)
{
    if (value.find_first_of(",\"\r\n") == std::string::npos)
        return value;
    std::string out = "\"";
    for (char c : value) {
        if (c == '"')
            out += '"';
        out += c;
    }
    return out + "\"";
}

namespace {

class CsvWriter
{
public:
    explicit CsvWriter(const fs::path& path) : path_(path), out_(path, std::ios::binary)
    {
        if (!out_)
            throw IoError("cannot open " + path.string() + " for writing");
    }

    template <typename... Fields>
    void row(const Fields&... fields)
    {
        bool first = true;
        ((out_ << (first ? "" : ",") << cell(fields), first = false), ...);
        out_ << "\r\n";
    }

    void close()
    {
        out_.close();
        if (!out_)
            throw IoError("failed writing " + path_.string());
    }

private:
    static std::string cell(const std::string& s) { return csv_field(s); }
    static std::string cell(const char* s) { return csv_field(s); }
    static std::string cell(double v) { return format_double(v); }
    static std::string cell(bool v) { return v ? "true" : "false"; }
    template <typename T>
        requires std::is_integral_v<T>
    static std::string cell(T v)
    {
        return std::to_string(v);
    }

    fs::path path_;
    std::ofstream out_;
};

void write_text(const fs::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot open " + path.string() + " for writing");
    out << text;
    out.close();
    if (!out)
        throw IoError("failed writing " + path.string());
}

void ensure_dir(const fs::path& dir)
{
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
        throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
}

// File-name-safe form of a variant name, unique within one run.
std::vector<std::string> slugs(const std::vector<std::string>& names)
{
    std::vector<std::string> out;
    std::set<std::string> used;
    for (const auto& name : names) {
        std::string s;
        for (char c : name)
            s += std::isalnum(static_cast<unsigned char>(c)) ? static_cast<char>(std::tolower(static_cast<unsigned char>(c))) : '_';
        std::string candidate = s;
        for (int k = 2; used.count(candidate); ++k)
            candidate = s + "_" + std::to_string(k);
        used.insert(candidate);
        out.push_back(candidate);
    }
    return out;
}

std::uint64_t fnv1a(const std::string& text)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

} // namespace

std::vector<fs::path> emit_outputs(const ReconstructionResult& result, const fs::path& out_dir)
{
    if (result.runs.empty())
        throw ValidationError("results", "nothing to emit");
    ensure_dir(out_dir);
    std::vector<fs::path> written;

    std::vector<std::string> names;
    for (const auto& run : result.runs)
        names.push_back(run.result.variant);
    const auto slug = slugs(names);

    {
        const auto path = out_dir / "reconstruction.csv";
        CsvWriter csv(path);
        csv.row("variant", "mu", "trial", "seed", "mse", "iterations", "converged");
        for (const auto& run : result.runs) {
            const auto& r = run.result;
            csv.row(r.variant, r.mu, r.trial, r.seed, r.mse, r.iterations, r.converged);
        }
        csv.close();
        written.push_back(path);
    }

    PlotSpec plot;
    plot.title = "Reconstruction at mu = " + format_double(result.mu);
    plot.x_label = "index";
    plot.y_label = "amplitude";
    PlotSeries truth{"original", {}, {}, false};
    for (Eigen::Index i = 0; i < result.x_true.size(); ++i) {
        truth.x.push_back(static_cast<double>(i));
        truth.y.push_back(result.x_true(i));
    }
    plot.series.push_back(truth);

    for (std::size_t k = 0; k < result.runs.size(); ++k) {
        const auto& run = result.runs[k];
        const auto signal_path = out_dir / ("signal_" + slug[k] + ".csv");
        CsvWriter signal(signal_path);
        signal.row("index", "x_true", "x_hat");
        for (Eigen::Index i = 0; i < result.x_true.size(); ++i)
            signal.row(static_cast<std::size_t>(i), result.x_true(i), run.report.x_hat(i));
        signal.close();
        written.push_back(signal_path);

        const auto trace_path = out_dir / ("trace_" + slug[k] + ".csv");
        CsvWriter trace(trace_path);
        trace.row("iteration", "objective", "objective_pairwise", "primal_group", "primal_fusion", "step");
        const auto& t = run.report.traces;
        for (std::size_t i = 0; i < t.objective.size(); ++i)
            trace.row(i + 1, t.objective[i], t.objective_pairwise[i], t.primal_group[i], t.primal_fusion[i], t.step[i]);
        trace.close();
        written.push_back(trace_path);

        PlotSeries s{run.result.variant, truth.x, {}, false};
        for (Eigen::Index i = 0; i < run.report.x_hat.size(); ++i)
            s.y.push_back(run.report.x_hat(i));
        plot.series.push_back(std::move(s));
    }

    const auto svg = out_dir / "reconstruction.svg";
    write_text(svg, render_line_plot(plot));
    written.push_back(svg);
    return written;
}

std::vector<fs::path> emit_outputs(const SweepResult& result, const fs::path& out_dir)
{
    if (result.cells.empty())
        throw ValidationError("results", "nothing to emit");
    ensure_dir(out_dir);
    std::vector<fs::path> written;

    {
        const auto path = out_dir / "mse_sweep.csv";
        CsvWriter csv(path);
        csv.row("variant", "mu", "mean_mse", "stderr_mse", "mean_iters", "trials");
        for (const auto& c : result.cells)
            csv.row(c.variant, c.mu, c.mean_mse, c.stderr_mse, c.mean_iters, c.trials);
        csv.close();
        written.push_back(path);
    }
    {
        const auto path = out_dir / "sweep_trials.csv";
        CsvWriter csv(path);
        csv.row("variant", "mu", "trial", "seed", "mse", "iterations", "converged");
        for (const auto& r : result.trials)
            csv.row(r.variant, r.mu, r.trial, r.seed, r.mse, r.iterations, r.converged);
        csv.close();
        written.push_back(path);
    }

    PlotSpec plot;
    plot.title = "MSE vs compression ratio";
    plot.x_label = "mu";
    plot.y_label = "mean MSE";
    for (const auto& c : result.cells) {
        if (plot.series.empty() || plot.series.back().label != c.variant)
            plot.series.push_back(PlotSeries{c.variant, {}, {}, true});
        plot.series.back().x.push_back(c.mu);
        plot.series.back().y.push_back(c.mean_mse);
    }
    const auto svg = out_dir / "mse_sweep.svg";
    write_text(svg, render_line_plot(plot));
    written.push_back(svg);
    return written;
}

fs::path write_run_manifest(const ExperimentSpec& spec, const std::vector<fs::path>& files, const fs::path& out_dir)
{
    ensure_dir(out_dir);
    std::ostringstream text;
    char hash[17];
    std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(fnv1a(dump_config(spec))));
    text << "fusedcs " << library_version() << "\n";
    text << "seed " << spec.sensing.seed << "\n";
    text << "config_hash fnv1a64:" << hash << "\n";
    for (const auto& f : files)
        text << "file " << f.filename().string() << "\n";
    const auto path = out_dir / "manifest.txt";
    write_text(path, text.str());
    return path;
}

} // namespace fusedcs
