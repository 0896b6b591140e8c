#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cfm/schedule.hpp"
#include "cfm/wealth.hpp"

namespace cfm {

struct SnapshotPolicy {
    enum class Spacing { Every, LogSpaced, FinalOnly };
    enum class Content { Full, Summary };

    Spacing spacing = Spacing::LogSpaced;
    Content content = Content::Full;
    std::size_t every = 1;              // for Spacing::Every
    std::size_t points_per_decade = 10; // for Spacing::LogSpaced

    /// Step 0 and the final step are always recorded; the final one always
    /// carries the full vector.
    bool records(std::size_t tau, std::size_t steps) const noexcept;

    static SnapshotPolicy every_step() { return {Spacing::Every, Content::Full, 1, 10}; }
    static SnapshotPolicy final_only() { return {Spacing::FinalOnly, Content::Full, 1, 10}; }
};

struct SnapshotSummary {
    std::optional<double> gini;  // undefined when the total is 0
    double top1 = 0.0;
    double top10 = 0.0;
};

struct Snapshot {
    std::size_t tau = 0;
    double total = 0.0;
    std::optional<std::vector<double>> values;
    std::optional<SnapshotSummary> summary;

    bool full() const noexcept { return values.has_value(); }
};

/// Seed and config fingerprint carried through to every output file.
struct RunStamp {
    std::uint64_t seed = 0;
    std::string fingerprint;
};

/// Time-indexed record of a run. `totals[t]` and `drift[t]` belong to step
/// t + 1; drift is |total(x(t)) - M|.
struct SimulationTrace {
    NumericMode mode = NumericMode::Float;
    std::size_t n = 0;
    std::size_t steps = 0;
    double monetary_base = 0.0;
    std::vector<Snapshot> snapshots;
    std::vector<double> totals;
    std::vector<double> drift;
    WealthVector final_state{std::vector<double>{0.0}};
    std::optional<IntegerWealth> final_integer;
    RunStamp stamp;
};

/// Evolves x0 through the first `steps` factors of `schedule` (all of them
/// when omitted), one sparse step at a time: x(t) = F_{t-1} ... F_0 x(0).
///
/// Throws DimensionError when x0 and the schedule disagree and
/// ScheduleExhausted when fewer than `steps` factors are available.
SimulationTrace run_simulation(const Schedule& schedule, const WealthVector& x0, const SnapshotPolicy& policy,
                               std::optional<std::size_t> steps = std::nullopt, RunStamp stamp = {});
SimulationTrace run_simulation(const Schedule& schedule, const IntegerWealth& x0, const SnapshotPolicy& policy,
                               std::optional<std::size_t> steps = std::nullopt, RunStamp stamp = {});

SnapshotSummary summarize(std::span<const double> values);

}  // namespace cfm
