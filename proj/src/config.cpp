#include "cfm/config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "cfm/error.hpp"
#include "cfm/io.hpp"

namespace cfm::config {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr std::uint64_t kInitialWealthStream = 0x696e697477656c74ULL;
constexpr std::size_t kFullSnapshotMaxN = 10'000;

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

// Reads one JSON object, remembering which keys were consumed so that
// anything left over can be reported as an unknown field.
class Fields {
public:
    Fields(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ConfigError(path_, "must be an object");
    }

    bool has(const std::string& key) const { return j_.contains(key); }
    std::string path(const std::string& key) const { return join(path_, key); }
    const std::string& where() const noexcept { return path_; }

    const json& raw(const std::string& key) {
        if (!j_.contains(key)) throw ConfigError(path(key), "required field is missing");
        used_.insert(key);
        return j_.at(key);
    }

    std::uint64_t unsigned_int(const std::string& key) {
        const json& v = raw(key);
        if (v.is_number_unsigned()) return v.get<std::uint64_t>();
        if (v.is_number_integer()) throw ConfigError(path(key), "must be >= 0, got " + v.dump());
        if (v.is_number_float()) {
            const double d = v.get<double>();
            if (d >= 0 && std::floor(d) == d && d < 1.8e19) return static_cast<std::uint64_t>(d);
            throw ConfigError(path(key), "must be a non-negative integer, got " + v.dump());
        }
        throw ConfigError(path(key), "must be a non-negative integer");
    }
    std::uint64_t unsigned_int(const std::string& key, std::uint64_t def) { return has(key) ? unsigned_int(key) : def; }

    double number(const std::string& key) {
        const json& v = raw(key);
        if (!v.is_number()) throw ConfigError(path(key), "must be a number");
        const double d = v.get<double>();
        if (!std::isfinite(d)) throw ConfigError(path(key), "must be finite");
        return d;
    }
    double number(const std::string& key, double def) { return has(key) ? number(key) : def; }

    std::string string(const std::string& key) {
        const json& v = raw(key);
        if (!v.is_string()) throw ConfigError(path(key), "must be a string");
        return v.get<std::string>();
    }
    std::string string(const std::string& key, const std::string& def) { return has(key) ? string(key) : def; }

    Fields object(const std::string& key) { return Fields(raw(key), path(key)); }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!used_.count(it.key())) throw ConfigError(path(it.key()), "unknown field");
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> used_;
};

std::filesystem::path resolve_path(const std::filesystem::path& base, const std::string& p) {
    std::filesystem::path path(p);
    return path.is_relative() && !base.empty() ? base / path : path;
}

void expect_range(bool ok, const std::string& field, const std::string& what) {
    if (!ok) throw ConfigError(field, what);
}

gen::TopologySpec parse_topology(Fields f, std::size_t n, const std::filesystem::path& base,
                                 std::filesystem::path& edge_path) {
    gen::TopologySpec t;
    t.n = n;
    const std::string kind = f.string("kind");
    if (kind == "complete") {
        t.kind = gen::TopologySpec::Kind::Complete;
    } else if (kind == "random-directed") {
        t.kind = gen::TopologySpec::Kind::RandomDirected;
        if (f.has("p_edge") && f.has("mean_degree"))
            throw ConfigError(f.path("p_edge"), "p_edge and mean_degree are mutually exclusive");
        if (f.has("mean_degree")) {
            const double d = f.number("mean_degree");
            expect_range(d >= 0.0, f.path("mean_degree"), "must be >= 0");
            t.p_edge = n > 1 ? std::min(1.0, d / static_cast<double>(n - 1)) : 0.0;
        } else {
            t.p_edge = f.number("p_edge");
            expect_range(t.p_edge >= 0.0 && t.p_edge <= 1.0, f.path("p_edge"), "must lie in [0, 1]");
        }
    } else if (kind == "scale-free") {
        t.kind = gen::TopologySpec::Kind::ScaleFree;
        t.m = f.unsigned_int("m", 2);
        expect_range(t.m >= 1, f.path("m"), "must be >= 1");
    } else if (kind == "ring") {
        t.kind = gen::TopologySpec::Kind::Ring;
        t.k = f.unsigned_int("k", 1);
        expect_range(t.k >= 1, f.path("k"), "must be >= 1");
    } else if (kind == "edge-list") {
        edge_path = resolve_path(base, f.string("path"));
        try {
            t = gen::load_edge_list(edge_path, n);
        } catch (const std::exception& e) {
            throw ConfigError(f.path("path"), e.what());
        }
    } else {
        throw ConfigError(f.path("kind"), "unknown topology '" + kind + "'");
    }
    f.finish();
    return t;
}

gen::SpendingSpec parse_spending(Fields f) {
    gen::SpendingSpec s;
    if (f.has("propensity")) {
        Fields p = f.object("propensity");
        const std::string kind = p.string("kind");
        if (kind == "constant") {
            s.propensity = gen::SpendingSpec::Propensity::Constant;
            s.value = p.number("value");
            expect_range(s.value >= 0.0 && s.value <= 1.0, p.path("value"), "must lie in [0, 1]");
        } else if (kind == "uniform") {
            s.propensity = gen::SpendingSpec::Propensity::Uniform;
            s.low = p.number("low", 0.0);
            s.high = p.number("high", 1.0);
            expect_range(s.low >= 0.0 && s.high <= 1.0 && s.low <= s.high, p.path("low"),
                         "need 0 <= low <= high <= 1");
        } else if (kind == "beta") {
            s.propensity = gen::SpendingSpec::Propensity::Beta;
            s.alpha = p.number("alpha", 2.0);
            s.beta = p.number("beta", 2.0);
            expect_range(s.alpha > 0.0, p.path("alpha"), "must be > 0");
            expect_range(s.beta > 0.0, p.path("beta"), "must be > 0");
        } else {
            throw ConfigError(p.path("kind"), "unknown propensity '" + kind + "'");
        }
        p.finish();
    }
    if (f.has("allocation")) {
        Fields a = f.object("allocation");
        const std::string kind = a.string("kind");
        if (kind == "equal") {
            s.allocation = gen::SpendingSpec::Allocation::Equal;
        } else if (kind == "dirichlet") {
            s.allocation = gen::SpendingSpec::Allocation::Dirichlet;
            s.concentration = a.number("concentration", 1.0);
            expect_range(s.concentration > 0.0, a.path("concentration"), "must be > 0");
        } else {
            throw ConfigError(a.path("kind"), "unknown allocation '" + kind + "'");
        }
        a.finish();
    }
    f.finish();
    return s;
}

InitialWealthSpec parse_initial_wealth(Fields f, std::size_t n, const std::filesystem::path& base) {
    static const char* kinds[] = {"equal", "uniform", "point_mass", "from_file"};
    std::vector<std::string> present;
    for (const char* k : kinds)
        if (f.has(k)) present.emplace_back(k);
    if (present.empty()) throw ConfigError(f.where(), "needs one of equal, uniform, point_mass, from_file");
    if (present.size() > 1)
        throw ConfigError(f.path(present[1]), "'" + present[0] + "' and '" + present[1] + "' are mutually exclusive");

    InitialWealthSpec w;
    const std::string& k = present.front();
    if (k == "equal") {
        w.kind = InitialWealthSpec::Kind::Equal;
        w.amount = f.number("equal");
        expect_range(w.amount >= 0.0, f.path("equal"), "must be >= 0");
    } else if (k == "uniform") {
        w.kind = InitialWealthSpec::Kind::Uniform;
        Fields u = f.object("uniform");
        w.low = u.number("low", 0.0);
        w.high = u.number("high", 200.0);
        expect_range(w.low >= 0.0 && w.low <= w.high, u.path("low"), "need 0 <= low <= high");
        u.finish();
    } else if (k == "point_mass") {
        w.kind = InitialWealthSpec::Kind::PointMass;
        Fields p = f.object("point_mass");
        const auto agent = p.unsigned_int("agent", 1);
        expect_range(agent >= 1 && agent <= n, p.path("agent"), "must lie in 1.." + std::to_string(n));
        w.agent = agent - 1;
        w.amount = p.number("amount");
        expect_range(w.amount >= 0.0, p.path("amount"), "must be >= 0");
        p.finish();
    } else {
        w.kind = InitialWealthSpec::Kind::FromFile;
        w.path = resolve_path(base, f.string("from_file"));
    }
    f.finish();
    return w;
}

void parse_schedule(Fields f, RunConfig& cfg) {
    auto& s = cfg.schedule;
    const std::string kind = f.string("kind", "stationary");
    if (kind == "stationary") {
        s.kind = gen::ScheduleSpec::Kind::Stationary;
    } else if (kind == "periodic") {
        s.kind = gen::ScheduleSpec::Kind::Periodic;
        cfg.matrix_count = f.unsigned_int("matrices", 2);
        expect_range(cfg.matrix_count >= 1, f.path("matrices"), "must be >= 1");
    } else if (kind == "regime-switching") {
        s.kind = gen::ScheduleSpec::Kind::RegimeSwitching;
        const json& tr = f.raw("transition");
        if (!tr.is_array() || tr.empty()) throw ConfigError(f.path("transition"), "must be a non-empty square array");
        s.transition.clear();
        for (std::size_t r = 0; r < tr.size(); ++r) {
            const std::string rp = f.path("transition") + "[" + std::to_string(r) + "]";
            if (!tr[r].is_array() || tr[r].size() != tr.size()) throw ConfigError(rp, "must have one entry per regime");
            std::vector<double> row;
            double sum = 0.0;
            for (const auto& p : tr[r]) {
                if (!p.is_number() || p.get<double>() < 0.0 || p.get<double>() > 1.0)
                    throw ConfigError(rp, "probabilities must be numbers in [0, 1]");
                row.push_back(p.get<double>());
                sum += row.back();
            }
            if (std::abs(sum - 1.0) > kColumnTolerance) throw ConfigError(rp, "must sum to 1");
            s.transition.push_back(std::move(row));
        }
        cfg.matrix_count = tr.size();
        const auto init = f.unsigned_int("initial_regime", 1);
        expect_range(init >= 1 && init <= tr.size(), f.path("initial_regime"), "out of range");
        s.initial_regime = init - 1;
    } else if (kind == "identity-padded") {
        s.kind = gen::ScheduleSpec::Kind::IdentityPadded;
        s.idle_probability = f.number("idle_probability");
        expect_range(s.idle_probability >= 0.0 && s.idle_probability <= 1.0, f.path("idle_probability"),
                     "must lie in [0, 1]");
    } else if (kind == "identity") {
        s.kind = gen::ScheduleSpec::Kind::Identity;
    } else if (kind == "trace") {
        s.kind = gen::ScheduleSpec::Kind::Trace;
    } else {
        throw ConfigError(f.path("kind"), "unknown schedule kind '" + kind + "'");
    }
    f.finish();
}

void parse_snapshots(Fields f, RunConfig& cfg) {
    auto& p = cfg.snapshots;
    if (f.has("spacing")) {
        const std::string sp = f.string("spacing");
        if (sp == "every") {
            p.spacing = SnapshotPolicy::Spacing::Every;
            p.every = f.unsigned_int("every", 1);
            expect_range(p.every >= 1, f.path("every"), "must be >= 1");
        } else if (sp == "log") {
            p.spacing = SnapshotPolicy::Spacing::LogSpaced;
            p.points_per_decade = f.unsigned_int("points_per_decade", 10);
            expect_range(p.points_per_decade >= 1, f.path("points_per_decade"), "must be >= 1");
        } else if (sp == "final") {
            p.spacing = SnapshotPolicy::Spacing::FinalOnly;
        } else {
            throw ConfigError(f.path("spacing"), "must be one of every, log, final");
        }
    }
    if (f.has("content")) {
        const std::string c = f.string("content");
        if (c == "full")
            p.content = SnapshotPolicy::Content::Full;
        else if (c == "summary")
            p.content = SnapshotPolicy::Content::Summary;
        else
            throw ConfigError(f.path("content"), "must be full or summary");
    }
    f.finish();
}

const char* spacing_name(SnapshotPolicy::Spacing s) {
    switch (s) {
        case SnapshotPolicy::Spacing::Every: return "every";
        case SnapshotPolicy::Spacing::LogSpaced: return "log";
        case SnapshotPolicy::Spacing::FinalOnly: return "final";
    }
    return "?";
}

const char* schedule_name(gen::ScheduleSpec::Kind k) {
    switch (k) {
        case gen::ScheduleSpec::Kind::Stationary: return "stationary";
        case gen::ScheduleSpec::Kind::Periodic: return "periodic";
        case gen::ScheduleSpec::Kind::RegimeSwitching: return "regime-switching";
        case gen::ScheduleSpec::Kind::IdentityPadded: return "identity-padded";
        case gen::ScheduleSpec::Kind::Identity: return "identity";
        case gen::ScheduleSpec::Kind::Trace: return "trace";
    }
    return "?";
}

}  // namespace

RunConfig parse_config(const json& doc, const std::filesystem::path& base_dir) {
    Fields root(doc, "");
    RunConfig cfg;

    const auto n = root.unsigned_int("n");
    expect_range(n >= 1, "n", "must be >= 1");
    expect_range(n <= std::numeric_limits<AgentIndex>::max(), "n", "exceeds the 32-bit agent index range");
    cfg.n = n;
    cfg.seed = root.unsigned_int("seed");
    cfg.steps = root.unsigned_int("T");

    const std::string mode = root.string("mode", "float");
    if (mode == "float")
        cfg.mode = NumericMode::Float;
    else if (mode == "integer")
        cfg.mode = NumericMode::Integer;
    else
        throw ConfigError("mode", "must be float or integer");

    if (root.has("topology") && root.has("matrix"))
        throw ConfigError("matrix", "'topology' and 'matrix' are mutually exclusive");
    if (root.has("matrix")) {
        Fields m = root.object("matrix");
        if (m.has("path") && m.has("paths")) throw ConfigError(m.path("paths"), "'path' and 'paths' are mutually exclusive");
        if (m.has("path")) {
            cfg.matrix_paths.push_back(resolve_path(base_dir, m.string("path")));
        } else {
            const json& ps = m.raw("paths");
            if (!ps.is_array() || ps.empty()) throw ConfigError(m.path("paths"), "must be a non-empty array of paths");
            for (const auto& p : ps) {
                if (!p.is_string()) throw ConfigError(m.path("paths"), "entries must be strings");
                cfg.matrix_paths.push_back(resolve_path(base_dir, p.get<std::string>()));
            }
        }
        m.finish();
    } else {
        cfg.topology = parse_topology(root.object("topology"), cfg.n, base_dir, cfg.edge_list_path);
    }
    if (root.has("spending")) cfg.spending = parse_spending(root.object("spending"));
    if (root.has("initial_wealth"))
        cfg.initial_wealth = parse_initial_wealth(root.object("initial_wealth"), cfg.n, base_dir);

    cfg.snapshots.spacing = SnapshotPolicy::Spacing::LogSpaced;
    cfg.snapshots.content = cfg.n <= kFullSnapshotMaxN ? SnapshotPolicy::Content::Full : SnapshotPolicy::Content::Summary;
    if (root.has("snapshots")) parse_snapshots(root.object("snapshots"), cfg);
    if (root.has("schedule")) parse_schedule(root.object("schedule"), cfg);

    if (root.has("output")) {
        Fields o = root.object("output");
        cfg.output_dir = o.string("dir", "out");
        o.finish();
    }
    root.finish();

    cfg.schedule.steps = cfg.steps;
    cfg.schedule.seed = cfg.seed;
    if (!cfg.matrix_paths.empty()) {
        const bool multi = cfg.schedule.kind == gen::ScheduleSpec::Kind::Periodic ||
                           cfg.schedule.kind == gen::ScheduleSpec::Kind::RegimeSwitching ||
                           cfg.schedule.kind == gen::ScheduleSpec::Kind::Trace;
        if (multi) {
            if (cfg.schedule.kind == gen::ScheduleSpec::Kind::RegimeSwitching &&
                cfg.schedule.transition.size() != cfg.matrix_paths.size())
                throw ConfigError("schedule.transition", "needs one row per matrix in matrix.paths");
            cfg.matrix_count = cfg.matrix_paths.size();
        } else if (cfg.matrix_paths.size() != 1) {
            throw ConfigError("matrix.paths", "this schedule kind uses a single matrix");
        }
        if (cfg.schedule.kind == gen::ScheduleSpec::Kind::Trace && cfg.matrix_paths.size() < cfg.steps)
            throw ConfigError("T", "trace schedule has only " + std::to_string(cfg.matrix_paths.size()) + " matrices");
    } else if (cfg.schedule.kind == gen::ScheduleSpec::Kind::Trace) {
        throw ConfigError("schedule.kind", "a trace schedule needs matrix.paths");
    }
    if (cfg.mode == NumericMode::Integer) {
        const auto& w = cfg.initial_wealth;
        if ((w.kind == InitialWealthSpec::Kind::Equal || w.kind == InitialWealthSpec::Kind::PointMass) &&
            std::floor(w.amount) != w.amount)
            throw ConfigError("initial_wealth", "integer mode needs whole minor units");
    }
    return cfg;
}

RunConfig parse_config_text(const std::string& text, const std::filesystem::path& base_dir) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("", std::string("not valid JSON: ") + e.what());
    }
    return parse_config(doc, base_dir);
}

RunConfig parse_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("", "cannot open config " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str(), path.parent_path());
}

void apply_environment(RunConfig& cfg) {
    if (const char* out = std::getenv("CFM_OUT_DIR"); out && *out) cfg.output_dir = out;
    if (const char* v = std::getenv("CFM_VERBOSITY"); v && *v) cfg.quiet = std::string(v) == "quiet" || std::string(v) == "0";
}

ordered_json RunConfig::to_json() const {
    ordered_json j;
    j["n"] = n;
    j["seed"] = seed;
    j["T"] = steps;
    j["mode"] = to_string(mode);
    if (topology) {
        ordered_json t;
        t["kind"] = gen::to_string(topology->kind);
        switch (topology->kind) {
            case gen::TopologySpec::Kind::RandomDirected: t["p_edge"] = topology->p_edge; break;
            case gen::TopologySpec::Kind::ScaleFree: t["m"] = topology->m; break;
            case gen::TopologySpec::Kind::Ring: t["k"] = topology->k; break;
            case gen::TopologySpec::Kind::EdgeList:
                t["path"] = edge_list_path.string();
                break;
            case gen::TopologySpec::Kind::Complete: break;
        }
        j["topology"] = t;
    } else {
        ordered_json paths = ordered_json::array();
        for (const auto& p : matrix_paths) paths.push_back(p.string());
        j["matrix"] = {{"paths", paths}};
    }
    ordered_json prop;
    switch (spending.propensity) {
        case gen::SpendingSpec::Propensity::Constant: prop = {{"kind", "constant"}, {"value", spending.value}}; break;
        case gen::SpendingSpec::Propensity::Uniform:
            prop = {{"kind", "uniform"}, {"low", spending.low}, {"high", spending.high}};
            break;
        case gen::SpendingSpec::Propensity::Beta:
            prop = {{"kind", "beta"}, {"alpha", spending.alpha}, {"beta", spending.beta}};
            break;
    }
    ordered_json alloc = spending.allocation == gen::SpendingSpec::Allocation::Equal
                             ? ordered_json{{"kind", "equal"}}
                             : ordered_json{{"kind", "dirichlet"}, {"concentration", spending.concentration}};
    j["spending"] = {{"propensity", prop}, {"allocation", alloc}};

    ordered_json w;
    switch (initial_wealth.kind) {
        case InitialWealthSpec::Kind::Equal: w["equal"] = initial_wealth.amount; break;
        case InitialWealthSpec::Kind::Uniform:
            w["uniform"] = {{"low", initial_wealth.low}, {"high", initial_wealth.high}};
            break;
        case InitialWealthSpec::Kind::PointMass:
            w["point_mass"] = {{"agent", initial_wealth.agent + 1}, {"amount", initial_wealth.amount}};
            break;
        case InitialWealthSpec::Kind::FromFile: w["from_file"] = initial_wealth.path.string(); break;
    }
    j["initial_wealth"] = w;

    ordered_json s;
    s["kind"] = schedule_name(schedule.kind);
    if (schedule.kind == gen::ScheduleSpec::Kind::Periodic) s["matrices"] = matrix_count;
    if (schedule.kind == gen::ScheduleSpec::Kind::RegimeSwitching) {
        s["transition"] = schedule.transition;
        s["initial_regime"] = schedule.initial_regime + 1;
    }
    if (schedule.kind == gen::ScheduleSpec::Kind::IdentityPadded) s["idle_probability"] = schedule.idle_probability;
    j["schedule"] = s;

    ordered_json snap;
    snap["spacing"] = spacing_name(snapshots.spacing);
    if (snapshots.spacing == SnapshotPolicy::Spacing::Every) snap["every"] = snapshots.every;
    if (snapshots.spacing == SnapshotPolicy::Spacing::LogSpaced) snap["points_per_decade"] = snapshots.points_per_decade;
    snap["content"] = snapshots.content == SnapshotPolicy::Content::Full ? "full" : "summary";
    j["snapshots"] = snap;
    j["output"] = {{"dir", output_dir.string()}};
    return j;
}

std::string RunConfig::hash() const {
    ordered_json j = to_json();
    j.erase("output");
    const std::string text = j.dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string RunConfig::fingerprint() const {
    return std::string("cfm ") + io::kToolVersion + " seed=" + std::to_string(seed) + " config=" + hash() +
           " mode=" + to_string(mode) + " rng=" + gen::kRngAlgorithm;
}

std::vector<double> initial_wealth(const RunConfig& cfg) {
    const auto& w = cfg.initial_wealth;
    std::vector<double> x(cfg.n, 0.0);
    switch (w.kind) {
        case InitialWealthSpec::Kind::Equal: std::fill(x.begin(), x.end(), w.amount); break;
        case InitialWealthSpec::Kind::PointMass: x[w.agent] = w.amount; break;
        case InitialWealthSpec::Kind::Uniform: {
            auto rng = gen::substream(cfg.seed, kInitialWealthStream);
            std::uniform_real_distribution<double> u(w.low, w.high);
            for (auto& v : x) v = u(rng);
            if (cfg.mode == NumericMode::Integer)
                for (auto& v : x) v = std::floor(v);
            break;
        }
        case InitialWealthSpec::Kind::FromFile: {
            x = io::load_amounts(w.path);
            if (x.size() != cfg.n)
                throw DimensionError("initial wealth file " + w.path.string() + " has " + std::to_string(x.size()) +
                                     " entries, config has n = " + std::to_string(cfg.n));
            break;
        }
    }
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] >= 0.0) || !std::isfinite(x[i]))
            throw ConfigError("initial_wealth", "agent " + std::to_string(i + 1) + " has negative or non-finite wealth");
        if (cfg.mode == NumericMode::Integer && (std::floor(x[i]) != x[i] || x[i] > 9.0e15))
            throw ConfigError("initial_wealth", "integer mode needs whole minor units (agent " + std::to_string(i + 1) + ")");
    }
    return x;
}

std::uint64_t matrix_seed(std::uint64_t seed, std::size_t index) noexcept {
    return index == 0 ? seed : gen::splitmix64(seed ^ (0x6d61747269780000ULL + index));
}

std::vector<Schedule::MatrixPtr> build_matrices(const RunConfig& cfg, gen::GenerationLog* log) {
    std::vector<Schedule::MatrixPtr> out;
    if (cfg.schedule.kind == gen::ScheduleSpec::Kind::Identity && cfg.matrix_paths.empty()) return out;
    if (!cfg.matrix_paths.empty()) {
        for (const auto& p : cfg.matrix_paths) {
            auto m = std::make_shared<const CirculationMatrix>(io::load_matrix(p));
            if (m->n() != cfg.n)
                throw DimensionError("matrix " + p.string() + " is " + std::to_string(m->n()) + "x" +
                                     std::to_string(m->n()) + ", config has n = " + std::to_string(cfg.n));
            out.push_back(std::move(m));
        }
        return out;
    }
    for (std::size_t r = 0; r < cfg.matrix_count; ++r)
        out.push_back(std::make_shared<const CirculationMatrix>(
            gen::generate_matrix(*cfg.topology, cfg.spending, matrix_seed(cfg.seed, r), r == 0 ? log : nullptr)));
    return out;
}

Schedule build_schedule(const RunConfig& cfg, const std::vector<Schedule::MatrixPtr>& matrices) {
    return gen::generate_schedule(cfg.schedule, matrices, cfg.n);
}

}  // namespace cfm::config
