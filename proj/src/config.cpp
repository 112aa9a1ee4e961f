#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "fusedcs/bench.hpp"

namespace fusedcs {

namespace {

constexpr std::size_t kGroupSize = 10;
constexpr std::size_t kOverlap = 5;

std::string default_name(VariantKind kind)
{
    switch (kind) {
    case VariantKind::Lasso: return "LASSO";
    case VariantKind::GLasso: return "G-LASSO";
    case VariantKind::SgLasso: return "SG-LASSO";
    case VariantKind::FLasso: return "F-LASSO";
    case VariantKind::Sgf: return "SGF-LASSO";
    case VariantKind::Lgf: return "LGF-LASSO";
    }
    return "variant";
}

std::string at_line(const YAML::Node& node)
{
    const auto mark = node.Mark();
    return mark.is_null() ? std::string() : " (line " + std::to_string(mark.line + 1) + ")";
}

template <typename T>
T read(const YAML::Node& parent, const std::string& key, const std::string& field, T fallback)
{
    const YAML::Node node = parent[key];
    if (!node)
        return fallback;
    try {
        return node.as<T>();
    } catch (const YAML::Exception&) {
        throw ValidationError(field, "cannot read value '" + (node.IsScalar() ? node.Scalar() : std::string("<non-scalar>")) +
                                         "'" + at_line(node));
    }
}

std::size_t read_count(const YAML::Node& parent, const std::string& key, const std::string& field, std::size_t fallback)
{
    const YAML::Node node = parent[key];
    if (!node)
        return fallback;
    long long value = 0;
    try {
        value = node.as<long long>();
    } catch (const YAML::Exception&) {
        throw ValidationError(field, "expected a non-negative integer" + at_line(node));
    }
    if (value < 0)
        throw ValidationError(field, "must be non-negative" + at_line(node));
    return static_cast<std::size_t>(value);
}

void require_map(const YAML::Node& node, const std::string& field, std::initializer_list<const char*> allowed)
{
    if (!node.IsMap())
        throw ValidationError(field, "expected a mapping" + at_line(node));
    const std::set<std::string> keys(allowed.begin(), allowed.end());
    for (const auto& kv : node) {
        const auto key = kv.first.as<std::string>();
        if (!keys.count(key))
            throw ValidationError(field.empty() ? key : field + "." + key, "unknown key" + at_line(kv.first));
    }
}

struct GroupingDefaults
{
    std::size_t group_size = kGroupSize;
    std::size_t overlap = kOverlap;
};

Grouping build_grouping(VariantKind kind, std::size_t n, std::size_t group_size, std::size_t groups,
                        std::size_t overlap, const std::string& field, const YAML::Node& where)
{
    try {
        if (kind == VariantKind::Lgf)
            return build_latent_layout(n, group_size, overlap);
        if (groups != 0)
            return build_partition(n, groups);
        if (group_size == 0 || n % group_size != 0)
            throw InvalidPartition("group size " + std::to_string(group_size) + " does not divide n = " +
                                   std::to_string(n));
        return build_partition(n, n / group_size);
    } catch (const ValidationError&) {
        throw;
    } catch (const Error& e) {
        throw ValidationError(field, e.what() + at_line(where));
    }
}

} // namespace

void ExperimentSpec::validate() const
{
    sensing.validate();
    signal.validate(sensing.n);
    admm.validate();
    if (trials < 1)
        throw ValidationError("trials", "must be at least 1");
    for (std::size_t i = 0; i < mu_grid.size(); ++i) {
        const double mu = mu_grid[i];
        if (!(mu > 0.0 && mu <= 1.0))
            throw ValidationError("mu_grid", "values must lie in (0, 1]");
        if (i > 0 && !(mu > mu_grid[i - 1]))
            throw ValidationError("mu_grid", "values must be strictly increasing");
        SensingConfig probe = sensing;
        probe.mu = mu;
        probe.validate();
    }
    if (variants.empty())
        throw ValidationError("variants", "at least one variant is required");
    std::set<std::string> names;
    for (const auto& v : variants) {
        if (v.name.empty())
            throw ValidationError("variants", "variant names must be non-empty");
        if (!names.insert(v.name).second)
            throw ValidationError("variants", "duplicate variant name '" + v.name + "'");
        v.penalties.validate();
        const bool latent = std::holds_alternative<LatentGroupLayout>(v.grouping);
        if (latent != (v.kind == VariantKind::Lgf))
            throw ValidationError("variants", "variant '" + v.name + "' has a grouping that does not match its kind");
        const std::size_t size = std::visit([](const auto& g) { return g.size(); }, v.grouping);
        if (size != sensing.n)
            throw ValidationError("variants", "grouping of '" + v.name + "' does not match n");
    }
}

ExperimentSpec default_experiment()
{
    ExperimentSpec spec;
    spec.sensing = SensingConfig{};
    spec.signal = default_block_spec();
    const PenaltyConfig base{0.5, 5.0, 3.0};
    const auto partition = build_partition(spec.sensing.n, spec.sensing.n / kGroupSize);
    spec.variants = {
        {"SGF-LASSO", VariantKind::Sgf, variant_config(VariantKind::Sgf, base), partition},
        {"LGF-LASSO", VariantKind::Lgf, variant_config(VariantKind::Lgf, base),
         build_latent_layout(spec.sensing.n, kGroupSize, kOverlap)},
        {"G-LASSO", VariantKind::GLasso, variant_config(VariantKind::GLasso, PenaltyConfig{0.5, 12.5, 3.0}), partition},
    };
    spec.admm = AdmmConfig{};
    spec.trials = 20;
    for (int i = 1; i <= 9; ++i)
        spec.mu_grid.push_back(i / 10.0);
    return spec;
}

ExperimentSpec parse_config(const std::string& text)
{
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        throw ConfigParseError("config parse error at line " + std::to_string(e.mark.line + 1) + ", column " +
                                   std::to_string(e.mark.column + 1) + ": " + e.msg,
                               e.mark.line + 1);
    }

    ExperimentSpec spec = default_experiment();
    if (!root || root.IsNull())
        return spec;
    require_map(root, "", {"seed", "trials", "threads", "mu_grid", "sensing", "signal", "admm", "penalties",
                           "grouping", "variants"});

    spec.sensing.seed = read<std::uint64_t>(root, "seed", "seed", spec.sensing.seed);
    spec.trials = read_count(root, "trials", "trials", spec.trials);
    spec.threads = read_count(root, "threads", "threads", spec.threads);

    if (const auto s = root["sensing"]) {
        require_map(s, "sensing", {"n", "mu", "sigma2"});
        spec.sensing.n = read_count(s, "n", "sensing.n", spec.sensing.n);
        spec.sensing.mu = read<double>(s, "mu", "sensing.mu", spec.sensing.mu);
        spec.sensing.sigma2 = read<double>(s, "sigma2", "sensing.sigma2", spec.sensing.sigma2);
    }
    try {
        spec.sensing.validate();
    } catch (const ValidationError& e) {
        throw ValidationError("sensing." + e.field(), e.message());
    }
    const std::size_t n = spec.sensing.n;

    if (const auto g = root["mu_grid"]) {
        if (!g.IsSequence())
            throw ValidationError("mu_grid", "expected a list" + at_line(g));
        spec.mu_grid.clear();
        for (const auto& item : g) {
            try {
                spec.mu_grid.push_back(item.as<double>());
            } catch (const YAML::Exception&) {
                throw ValidationError("mu_grid", "expected numbers" + at_line(item));
            }
        }
    }

    if (const auto sig = root["signal"]) {
        require_map(sig, "signal", {"segments"});
        const auto segs = sig["segments"];
        if (!segs || !segs.IsSequence())
            throw ValidationError("signal.segments", "expected a list of segments" + at_line(sig));
        spec.signal.segments.clear();
        for (std::size_t i = 0; i < segs.size(); ++i) {
            const auto node = segs[i];
            const std::string field = "signal.segments[" + std::to_string(i) + "]";
            require_map(node, field, {"kind", "length", "amplitude", "decay_rate"});
            Segment seg;
            seg.kind = parse_segment_kind(read<std::string>(node, "kind", field + ".kind", "zero"));
            seg.length = read_count(node, "length", field + ".length", 0);
            seg.amplitude = read<double>(node, "amplitude", field + ".amplitude", 0.0);
            seg.decay_rate = read<double>(node, "decay_rate", field + ".decay_rate", 0.0);
            spec.signal.segments.push_back(seg);
        }
    } else if (n != default_block_spec().size()) {
        throw ValidationError("signal.segments", "required when sensing.n differs from the default 140");
    }

    if (const auto a = root["admm"]) {
        require_map(a, "admm", {"c_u", "c_z", "max_iter", "tol", "order"});
        spec.admm.c_u = read<double>(a, "c_u", "admm.c_u", spec.admm.c_u);
        spec.admm.c_z = read<double>(a, "c_z", "admm.c_z", spec.admm.c_z);
        spec.admm.max_iter = read_count(a, "max_iter", "admm.max_iter", spec.admm.max_iter);
        spec.admm.tol = read<double>(a, "tol", "admm.tol", spec.admm.tol);
        const auto order = read<std::string>(a, "order", "admm.order", "gauss_seidel");
        if (order == "gauss_seidel")
            spec.admm.order = UpdateOrder::GaussSeidel;
        else if (order == "jacobi")
            spec.admm.order = UpdateOrder::Jacobi;
        else
            throw ValidationError("admm.order", "expected gauss_seidel or jacobi" + at_line(a["order"]));
    }

    PenaltyConfig base{0.5, 5.0, 3.0};
    if (const auto p = root["penalties"]) {
        require_map(p, "penalties", {"lambda_e", "lambda_g", "lambda_f"});
        base.lambda_e = read<double>(p, "lambda_e", "penalties.lambda_e", base.lambda_e);
        base.lambda_g = read<double>(p, "lambda_g", "penalties.lambda_g", base.lambda_g);
        base.lambda_f = read<double>(p, "lambda_f", "penalties.lambda_f", base.lambda_f);
        try {
            base.validate();
        } catch (const ValidationError& e) {
            throw ValidationError("penalties." + e.field(), e.message() + at_line(p));
        }
    }

    GroupingDefaults grouping;
    if (const auto g = root["grouping"]) {
        require_map(g, "grouping", {"group_size", "overlap"});
        grouping.group_size = read_count(g, "group_size", "grouping.group_size", grouping.group_size);
        grouping.overlap = read_count(g, "overlap", "grouping.overlap", grouping.overlap);
    }

    if (const auto vs = root["variants"]) {
        if (!vs.IsSequence())
            throw ValidationError("variants", "expected a list" + at_line(vs));
        spec.variants.clear();
        for (std::size_t i = 0; i < vs.size(); ++i) {
            const auto node = vs[i];
            const std::string field = "variants[" + std::to_string(i) + "]";
            require_map(node, field,
                        {"name", "kind", "lambda_e", "lambda_g", "lambda_f", "group_size", "groups", "overlap"});
            if (!node["kind"])
                throw ValidationError(field + ".kind", "missing" + at_line(node));
            const VariantKind kind = parse_variant_kind(read<std::string>(node, "kind", field + ".kind", ""));
            PenaltyConfig p = base;
            p.lambda_e = read<double>(node, "lambda_e", field + ".lambda_e", p.lambda_e);
            p.lambda_g = read<double>(node, "lambda_g", field + ".lambda_g", p.lambda_g);
            p.lambda_f = read<double>(node, "lambda_f", field + ".lambda_f", p.lambda_f);
            try {
                p.validate();
            } catch (const ValidationError& e) {
                throw ValidationError(field + "." + e.field(), e.message() + at_line(node));
            }
            const auto group_size = read_count(node, "group_size", field + ".group_size", grouping.group_size);
            const auto groups = read_count(node, "groups", field + ".groups", 0);
            const auto overlap = read_count(node, "overlap", field + ".overlap", grouping.overlap);
            VariantEntry entry{read<std::string>(node, "name", field + ".name", default_name(kind)), kind,
                               variant_config(kind, p),
                               build_grouping(kind, n, group_size, groups, overlap, field, node)};
            spec.variants.push_back(std::move(entry));
        }
    } else {
        // Default trio, rebuilt against the configured n, penalties and grouping.
        PenaltyConfig g_lasso = base;
        g_lasso.lambda_g = 12.5;
        spec.variants = {
            {"SGF-LASSO", VariantKind::Sgf, variant_config(VariantKind::Sgf, base),
             build_grouping(VariantKind::Sgf, n, grouping.group_size, 0, 0, "grouping", root)},
            {"LGF-LASSO", VariantKind::Lgf, variant_config(VariantKind::Lgf, base),
             build_grouping(VariantKind::Lgf, n, grouping.group_size, 0, grouping.overlap, "grouping", root)},
            {"G-LASSO", VariantKind::GLasso, variant_config(VariantKind::GLasso, g_lasso),
             build_grouping(VariantKind::GLasso, n, grouping.group_size, 0, 0, "grouping", root)},
        };
    }

    spec.validate();
    return spec;
}

ExperimentSpec load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open config file " + path.string());
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str());
}

std::string dump_config(const ExperimentSpec& spec)
{
    YAML::Emitter out;
    const auto num = [](double v) { return format_double(v); };
    out << YAML::BeginMap;
    out << YAML::Key << "seed" << YAML::Value << spec.sensing.seed;
    out << YAML::Key << "trials" << YAML::Value << spec.trials;
    out << YAML::Key << "threads" << YAML::Value << spec.threads;
    out << YAML::Key << "mu_grid" << YAML::Value << YAML::Flow << YAML::BeginSeq;
    for (double mu : spec.mu_grid)
        out << num(mu);
    out << YAML::EndSeq;

    out << YAML::Key << "sensing" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "n" << YAML::Value << spec.sensing.n;
    out << YAML::Key << "mu" << YAML::Value << num(spec.sensing.mu);
    out << YAML::Key << "sigma2" << YAML::Value << num(spec.sensing.sigma2);
    out << YAML::EndMap;

    out << YAML::Key << "signal" << YAML::Value << YAML::BeginMap << YAML::Key << "segments" << YAML::Value
        << YAML::BeginSeq;
    for (const auto& s : spec.signal.segments) {
        out << YAML::Flow << YAML::BeginMap;
        out << YAML::Key << "kind" << YAML::Value << to_string(s.kind);
        out << YAML::Key << "length" << YAML::Value << s.length;
        out << YAML::Key << "amplitude" << YAML::Value << num(s.amplitude);
        if (s.kind == SegmentKind::ExpDecay)
            out << YAML::Key << "decay_rate" << YAML::Value << num(s.decay_rate);
        out << YAML::EndMap;
    }
    out << YAML::EndSeq << YAML::EndMap;

    out << YAML::Key << "admm" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "c_u" << YAML::Value << num(spec.admm.c_u);
    out << YAML::Key << "c_z" << YAML::Value << num(spec.admm.c_z);
    out << YAML::Key << "max_iter" << YAML::Value << spec.admm.max_iter;
    out << YAML::Key << "tol" << YAML::Value << num(spec.admm.tol);
    out << YAML::Key << "order" << YAML::Value
        << (spec.admm.order == UpdateOrder::GaussSeidel ? "gauss_seidel" : "jacobi");
    out << YAML::EndMap;

    out << YAML::Key << "variants" << YAML::Value << YAML::BeginSeq;
    for (const auto& v : spec.variants) {
        out << YAML::BeginMap;
        out << YAML::Key << "name" << YAML::Value << v.name;
        out << YAML::Key << "kind" << YAML::Value << to_string(v.kind);
        out << YAML::Key << "lambda_e" << YAML::Value << num(v.penalties.lambda_e);
        out << YAML::Key << "lambda_g" << YAML::Value << num(v.penalties.lambda_g);
        out << YAML::Key << "lambda_f" << YAML::Value << num(v.penalties.lambda_f);
        if (const auto* layout = std::get_if<LatentGroupLayout>(&v.grouping)) {
            out << YAML::Key << "group_size" << YAML::Value << layout->group_size();
            out << YAML::Key << "overlap" << YAML::Value << layout->overlap();
        } else {
            out << YAML::Key << "groups" << YAML::Value << std::get<GroupPartition>(v.grouping).num_groups();
        }
        out << YAML::EndMap;
    }
    out << YAML::EndSeq;
    out << YAML::EndMap;
    return std::string(out.c_str()) + "\n";
}

void select_variants(ExperimentSpec& spec, const std::vector<std::string>& selection)
{
    if (selection.empty())
        return;
    std::vector<VariantEntry> kept;
    for (const auto& v : spec.variants) {
        const bool wanted = std::any_of(selection.begin(), selection.end(), [&](const std::string& s) {
            return s == v.name || s == to_string(v.kind);
        });
        if (wanted)
            kept.push_back(v);
    }
    for (const auto& s : selection) {
        const bool known = std::any_of(spec.variants.begin(), spec.variants.end(), [&](const VariantEntry& v) {
            return s == v.name || s == to_string(v.kind);
        });
        if (!known)
            throw ValidationError("variants", "no configured variant matches '" + s + "'");
    }
    spec.variants = std::move(kept);
}

} // namespace fusedcs
