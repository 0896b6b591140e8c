#include "cfm/generators.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include "cfm/error.hpp"

namespace cfm::gen {

namespace {

// Stream tags keep topology, spending and schedule draws independent.
constexpr std::uint64_t kTopologyStream = 0x746f706f00000000ULL;
constexpr std::uint64_t kSpendingStream = 0x7370656e00000000ULL;
constexpr std::uint64_t kScaleFreeStream = 0x7363616c65667265ULL;
constexpr std::uint64_t kScheduleStream = 0x7363686564756c65ULL;

void require(bool ok, const std::string& what) {
    if (!ok) throw std::invalid_argument(what);
}

RealizedTopology from_buyer_lists(std::size_t n, std::vector<std::vector<AgentIndex>>& lists) {
    RealizedTopology t;
    t.n = n;
    t.offsets.assign(n + 1, 0);
    for (std::size_t j = 0; j < n; ++j) t.offsets[j + 1] = t.offsets[j] + lists[j].size();
    t.sellers.reserve(t.offsets[n]);
    for (auto& l : lists) {
        std::sort(l.begin(), l.end());
        t.sellers.insert(t.sellers.end(), l.begin(), l.end());
        std::vector<AgentIndex>().swap(l);
    }
    return t;
}

// Preferential attachment on the undirected skeleton; every undirected edge
// becomes a trade link in both directions.
RealizedTopology scale_free(std::size_t n, std::size_t m, std::uint64_t seed) {
    std::vector<std::vector<AgentIndex>> adj(n);
    const std::size_t core = std::min(n, m + 1);
    std::vector<AgentIndex> endpoints;
    for (AgentIndex a = 0; a < core; ++a)
        for (AgentIndex b = a + 1; b < core; ++b) {
            adj[a].push_back(b);
            adj[b].push_back(a);
            endpoints.push_back(a);
            endpoints.push_back(b);
        }
    auto rng = substream(seed, kScaleFreeStream);
    std::vector<AgentIndex> chosen;
    for (std::size_t v = core; v < n; ++v) {
        chosen.clear();
        std::uniform_int_distribution<std::size_t> pick(0, endpoints.size() - 1);
        while (chosen.size() < m) {
            const AgentIndex u = endpoints[pick(rng)];
            if (std::find(chosen.begin(), chosen.end(), u) == chosen.end()) chosen.push_back(u);
        }
        for (AgentIndex u : chosen) {
            adj[v].push_back(u);
            adj[u].push_back(static_cast<AgentIndex>(v));
            endpoints.push_back(u);
            endpoints.push_back(static_cast<AgentIndex>(v));
        }
    }
    return from_buyer_lists(n, adj);
}

double draw_propensity(const SpendingSpec& s, std::mt19937_64& rng) {
    switch (s.propensity) {
        case SpendingSpec::Propensity::Constant: return s.value;
        case SpendingSpec::Propensity::Uniform: {
            std::uniform_real_distribution<double> u(s.low, s.high);
            return std::clamp(u(rng), 0.0, 1.0);
        }
        case SpendingSpec::Propensity::Beta: {
            std::gamma_distribution<double> ga(s.alpha, 1.0);
            std::gamma_distribution<double> gb(s.beta, 1.0);
            const double a = ga(rng);
            const double b = gb(rng);
            return a + b > 0.0 ? std::clamp(a / (a + b), 0.0, 1.0) : 0.5;
        }
    }
    return 0.0;
}

}  // namespace

std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::mt19937_64 substream(std::uint64_t seed, std::uint64_t stream) {
    return std::mt19937_64(splitmix64(splitmix64(seed) ^ splitmix64(stream)));
}

const char* to_string(TopologySpec::Kind kind) noexcept {
    switch (kind) {
        case TopologySpec::Kind::Complete: return "complete";
        case TopologySpec::Kind::RandomDirected: return "random-directed";
        case TopologySpec::Kind::ScaleFree: return "scale-free";
        case TopologySpec::Kind::Ring: return "ring";
        case TopologySpec::Kind::EdgeList: return "edge-list";
    }
    return "?";
}

void TopologySpec::check() const {
    require(n >= 1, "topology needs n >= 1");
    require(n <= std::numeric_limits<AgentIndex>::max(), "topology n exceeds the 32-bit index range");
    switch (kind) {
        case Kind::RandomDirected:
            require(p_edge >= 0.0 && p_edge <= 1.0, "random-directed p_edge must lie in [0, 1]");
            break;
        case Kind::ScaleFree: require(m >= 1, "scale-free m must be >= 1"); break;
        case Kind::Ring: require(k >= 1, "ring k must be >= 1"); break;
        case Kind::EdgeList:
            for (const auto& [i, j] : edges) {
                require(i < n && j < n, "edge (" + std::to_string(i + 1) + ", " + std::to_string(j + 1) +
                                            ") outside n = " + std::to_string(n));
                require(i != j, "self-loop on agent " + std::to_string(i + 1) + " (diagonal is reserved for savings)");
            }
            break;
        case Kind::Complete: break;
    }
}

void SpendingSpec::check() const {
    switch (propensity) {
        case Propensity::Constant: require(value >= 0.0 && value <= 1.0, "constant propensity must lie in [0, 1]"); break;
        case Propensity::Uniform:
            require(low >= 0.0 && high <= 1.0 && low <= high, "uniform propensity needs 0 <= low <= high <= 1");
            break;
        case Propensity::Beta: require(alpha > 0.0 && beta > 0.0, "beta propensity needs alpha, beta > 0"); break;
    }
    if (allocation == Allocation::Dirichlet)
        require(concentration > 0.0 && std::isfinite(concentration), "Dirichlet concentration must be > 0");
}

RealizedTopology realize_topology(const TopologySpec& spec, std::uint64_t seed) {
    spec.check();
    const std::size_t n = spec.n;
    switch (spec.kind) {
        case TopologySpec::Kind::ScaleFree: return scale_free(n, spec.m, seed);
        case TopologySpec::Kind::EdgeList: {
            std::vector<std::vector<AgentIndex>> lists(n);
            for (const auto& [i, j] : spec.edges) lists[j].push_back(i);
            for (auto& l : lists) l.erase(std::unique((std::sort(l.begin(), l.end()), l.begin()), l.end()), l.end());
            return from_buyer_lists(n, lists);
        }
        default: break;
    }

    std::vector<std::vector<AgentIndex>> lists(n);
    const auto nn = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(static)
    for (std::int64_t jj = 0; jj < nn; ++jj) {
        const auto j = static_cast<AgentIndex>(jj);
        auto& out = lists[j];
        switch (spec.kind) {
            case TopologySpec::Kind::Complete:
                out.reserve(n - 1);
                for (AgentIndex i = 0; i < n; ++i)
                    if (i != j) out.push_back(i);
                break;
            case TopologySpec::Kind::Ring: {
                const std::size_t reach = std::min(spec.k, n - 1);
                for (std::size_t d = 1; d <= reach; ++d) out.push_back(static_cast<AgentIndex>((j + d) % n));
                break;
            }
            case TopologySpec::Kind::RandomDirected: {
                const double p = spec.p_edge;
                if (p <= 0.0 || n == 1) break;
                if (p >= 1.0) {
                    for (AgentIndex i = 0; i < n; ++i)
                        if (i != j) out.push_back(i);
                    break;
                }
                // Geometric skips over the n - 1 candidate sellers.
                auto rng = substream(seed, kTopologyStream + j);
                std::uniform_real_distribution<double> u(0.0, 1.0);
                const double log_q = std::log1p(-p);
                double c = -1.0;
                while (true) {
                    c += 1.0 + std::floor(std::log(1.0 - u(rng)) / log_q);
                    if (c >= static_cast<double>(n - 1)) break;
                    const auto cand = static_cast<AgentIndex>(c);
                    out.push_back(cand < j ? cand : cand + 1);
                }
                break;
            }
            default: break;
        }
    }
    return from_buyer_lists(n, lists);
}

CirculationMatrix generate_matrix(const TopologySpec& topology, const SpendingSpec& spending, std::uint64_t seed,
                                  GenerationLog* log) {
    spending.check();
    const RealizedTopology topo = realize_topology(topology, seed);
    const std::size_t n = topo.n;

    // Column j fills slots [offsets[j] + j, offsets[j + 1] + j + 1): sellers then the diagonal.
    std::vector<Triplet> triplets(topo.edge_count() + n);
    std::vector<char> isolated(n, 0);
    const auto nn = static_cast<std::int64_t>(n);
#pragma omp parallel
    {
        std::vector<double> w;
#pragma omp for schedule(static)
        for (std::int64_t jj = 0; jj < nn; ++jj) {
            const auto j = static_cast<AgentIndex>(jj);
            const auto sellers = topo.sellers_of(j);
            auto rng = substream(seed, kSpendingStream + j);
            double sigma = draw_propensity(spending, rng);
            if (sellers.empty() && sigma > 0.0) {
                isolated[j] = 1;
                sigma = 0.0;
            }

            const std::size_t d = sellers.size();
            w.assign(d, 1.0);
            if (spending.allocation == SpendingSpec::Allocation::Dirichlet && d > 1) {
                std::gamma_distribution<double> g(spending.concentration, 1.0);
                for (auto& e : w) e = g(rng);
            }
            double wsum = 0.0;
            for (double e : w) wsum += e;
            if (!(wsum > 0.0)) {
                std::fill(w.begin(), w.end(), 1.0);
                wsum = static_cast<double>(d);
            }

            Triplet* out = triplets.data() + topo.offsets[j] + j;
            double off = 0.0;
            std::size_t largest = 0;
            for (std::size_t k = 0; k < d; ++k) {
                const double f = sigma * (w[k] / wsum);
                out[k] = {sellers[k], j, f};
                off += f;
                if (f > out[largest].value) largest = k;
            }
            double diag = 1.0 - off;
            if (diag < 0.0) {
                out[largest].value += diag;
                diag = 0.0;
            }
            out[d] = {j, j, diag};
        }
    }

    // Drop off-diagonal zeros (sigma = 0 or vanishing Dirichlet weights).
    std::erase_if(triplets, [](const Triplet& t) { return t.value == 0.0 && t.row != t.col; });
    if (log) {
        log->isolated_buyers.clear();
        for (AgentIndex j = 0; j < n; ++j)
            if (isolated[j]) log->isolated_buyers.push_back(j);
    }
    return CirculationMatrix::from_triplets(n, std::move(triplets));
}

void ScheduleSpec::check(std::size_t matrix_count) const {
    switch (kind) {
        case Kind::Identity: break;
        case Kind::IdentityPadded:
            require(idle_probability >= 0.0 && idle_probability <= 1.0, "idle probability must lie in [0, 1]");
            [[fallthrough]];
        case Kind::Stationary:
        case Kind::Periodic:
            require(matrix_count >= 1, std::string("schedule kind needs at least one matrix"));
            break;
        case Kind::Trace:
            require(matrix_count >= steps, "trace schedule has " + std::to_string(matrix_count) +
                                               " matrices, fewer than T = " + std::to_string(steps));
            break;
        case Kind::RegimeSwitching: {
            require(matrix_count >= 1, "regime switching needs at least one matrix");
            require(transition.size() == matrix_count, "transition matrix must have one row per regime");
            require(initial_regime < matrix_count, "initial regime out of range");
            for (std::size_t r = 0; r < transition.size(); ++r) {
                const auto& row = transition[r];
                require(row.size() == matrix_count, "transition row " + std::to_string(r + 1) + " has wrong length");
                double s = 0.0;
                for (double p : row) {
                    require(p >= 0.0 && p <= 1.0, "transition probabilities must lie in [0, 1]");
                    s += p;
                }
                require(std::abs(s - 1.0) <= kColumnTolerance,
                        "transition row " + std::to_string(r + 1) + " does not sum to 1");
            }
            break;
        }
    }
}

Schedule generate_schedule(const ScheduleSpec& spec, const std::vector<Schedule::MatrixPtr>& matrices,
                           std::size_t n) {
    spec.check(matrices.size());
    if (spec.kind == ScheduleSpec::Kind::Identity) {
        if (n == 0 && !matrices.empty()) n = matrices.front()->n();
        return Schedule::identity(n, spec.steps);
    }
    for (const auto& m : matrices)
        if (m->n() != matrices.front()->n())
            throw DimensionError("schedule matrices disagree on dimension (" + std::to_string(m->n()) + " vs " +
                                 std::to_string(matrices.front()->n()) + ")");
    const std::size_t dim = matrices.front()->n();

    switch (spec.kind) {
        case ScheduleSpec::Kind::Stationary: return Schedule::stationary(matrices.front(), spec.steps);
        case ScheduleSpec::Kind::Periodic: {
            Schedule s(ScheduleKind::Periodic, dim);
            for (std::size_t t = 0; t < spec.steps; ++t) s.push_back(matrices[t % matrices.size()]);
            return s;
        }
        case ScheduleSpec::Kind::Trace: {
            Schedule s(ScheduleKind::Trace, dim);
            for (std::size_t t = 0; t < spec.steps; ++t) s.push_back(matrices[t]);
            return s;
        }
        case ScheduleSpec::Kind::IdentityPadded: {
            Schedule s(ScheduleKind::IdentityPadded, dim);
            auto id = std::make_shared<const CirculationMatrix>(CirculationMatrix::identity(dim));
            auto rng = substream(spec.seed, kScheduleStream);
            std::bernoulli_distribution idle(spec.idle_probability);
            for (std::size_t t = 0; t < spec.steps; ++t) s.push_back(idle(rng) ? id : matrices.front());
            return s;
        }
        case ScheduleSpec::Kind::RegimeSwitching: {
            Schedule s(ScheduleKind::RegimeSwitching, dim);
            auto rng = substream(spec.seed, kScheduleStream);
            std::size_t regime = spec.initial_regime;
            for (std::size_t t = 0; t < spec.steps; ++t) {
                s.push_back(matrices[regime]);
                const auto& row = spec.transition[regime];
                std::discrete_distribution<std::size_t> next(row.begin(), row.end());
                regime = next(rng);
            }
            return s;
        }
        case ScheduleSpec::Kind::Identity: break;
    }
    throw std::logic_error("unhandled schedule kind");
}

TopologySpec parse_edge_list(std::istream& in, std::size_t n) {
    TopologySpec spec;
    spec.kind = TopologySpec::Kind::EdgeList;
    spec.n = n;
    if (n == 0) throw ParseError("edge list needs n >= 1");
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream ls(line);
        long long i = 0, j = 0;
        std::string rest;
        if (!(ls >> i >> j) || (ls >> rest)) throw ParseError("expected \"i j\"", lineno);
        if (i < 1 || j < 1 || static_cast<std::size_t>(i) > n || static_cast<std::size_t>(j) > n)
            throw ParseError("agent index outside 1.." + std::to_string(n), lineno);
        if (i == j) throw ParseError("self-loop", lineno);
        spec.edges.emplace_back(static_cast<AgentIndex>(i - 1), static_cast<AgentIndex>(j - 1));
    }
    std::sort(spec.edges.begin(), spec.edges.end());
    spec.edges.erase(std::unique(spec.edges.begin(), spec.edges.end()), spec.edges.end());
    return spec;
}

TopologySpec load_edge_list(const std::filesystem::path& path, std::size_t n) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open edge list " + path.string());
    return parse_edge_list(in, n);
}

}  // namespace cfm::gen
