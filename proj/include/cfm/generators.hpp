#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "cfm/circulation_matrix.hpp"
#include "cfm/schedule.hpp"

namespace cfm::gen {

/// Identifier of the random stream construction, echoed into run fingerprints.
inline constexpr const char* kRngAlgorithm = "mt19937_64+splitmix64-substreams";

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Independent generator for (seed, stream). Same inputs, same sequence.
std::mt19937_64 substream(std::uint64_t seed, std::uint64_t stream);

/// Who may sell to whom. Entry (i, j) of a generated matrix can only be
/// nonzero off the diagonal if (i, j) is an edge: seller i, buyer j.
struct TopologySpec {
    enum class Kind { Complete, RandomDirected, ScaleFree, Ring, EdgeList };

    Kind kind = Kind::Complete;
    std::size_t n = 1;
    double p_edge = 0.0;   // RandomDirected
    std::size_t m = 1;     // ScaleFree: attachments per new agent
    std::size_t k = 1;     // Ring: buyer j pays j+1, ..., j+k (mod n)
    std::vector<std::pair<AgentIndex, AgentIndex>> edges;  // EdgeList: (seller, buyer), 0-based

    /// Throws std::invalid_argument describing the first violated constraint.
    void check() const;
};

const char* to_string(TopologySpec::Kind kind) noexcept;

struct SpendingSpec {
    enum class Propensity { Constant, Uniform, Beta };
    enum class Allocation { Equal, Dirichlet };

    Propensity propensity = Propensity::Beta;
    double value = 0.5;              // Constant
    double low = 0.0, high = 1.0;    // Uniform
    double alpha = 2.0, beta = 2.0;  // Beta
    Allocation allocation = Allocation::Dirichlet;
    double concentration = 1.0;      // Dirichlet

    void check() const;
};

/// Sellers available to each buyer, in ascending order.
struct RealizedTopology {
    std::size_t n = 0;
    std::vector<std::uint64_t> offsets;  // size n + 1
    std::vector<AgentIndex> sellers;

    std::span<const AgentIndex> sellers_of(AgentIndex buyer) const {
        return std::span(sellers).subspan(offsets[buyer], offsets[buyer + 1] - offsets[buyer]);
    }
    std::size_t edge_count() const noexcept { return sellers.size(); }
};

RealizedTopology realize_topology(const TopologySpec& spec, std::uint64_t seed);

struct GenerationLog {
    std::vector<AgentIndex> isolated_buyers;  // forced to save everything
};

/// Draws a column-stochastic matrix: buyer j spends sigma_j split over its
/// sellers and keeps 1 - sigma_j on the diagonal. Buyers without sellers
/// keep everything and are listed in `log` when given.
CirculationMatrix generate_matrix(const TopologySpec& topology, const SpendingSpec& spending, std::uint64_t seed,
                                  GenerationLog* log = nullptr);

struct ScheduleSpec {
    enum class Kind { Stationary, Periodic, RegimeSwitching, IdentityPadded, Identity, Trace };

    Kind kind = Kind::Stationary;
    std::size_t steps = 0;
    std::uint64_t seed = 0;
    double idle_probability = 0.0;                // IdentityPadded
    std::vector<std::vector<double>> transition;  // RegimeSwitching, row r = P(next | r)
    std::size_t initial_regime = 0;

    void check(std::size_t matrix_count) const;
};

/// Arranges `matrices` into exactly spec.steps factors. Stationary and
/// identity-padded use matrices[0]; periodic cycles through them; regime
/// switching walks a Markov chain over them; trace takes them in order.
/// Identity needs `n` and ignores `matrices`.
Schedule generate_schedule(const ScheduleSpec& spec, const std::vector<Schedule::MatrixPtr>& matrices,
                           std::size_t n = 0);

/// Reads "i j" pairs (1-based; seller i, buyer j), one per line. Blank lines
/// and lines starting with '#' are skipped; duplicates are merged. Throws
/// ParseError naming the line for malformed pairs, out-of-range indices and
/// self-loops.
TopologySpec parse_edge_list(std::istream& in, std::size_t n);
TopologySpec load_edge_list(const std::filesystem::path& path, std::size_t n);

}  // namespace cfm::gen
