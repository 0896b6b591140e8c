#include "cfm/simulation.hpp"

#include <cmath>
#include <cstdlib>

#include "cfm/analytics.hpp"
#include "cfm/dynamics.hpp"
#include "cfm/error.hpp"

namespace cfm {

namespace {

bool is_log_point(std::size_t tau, std::size_t per_decade) noexcept {
    if (tau == 0 || per_decade == 0) return tau == 0;
    const double ppd = static_cast<double>(per_decade);
    const auto centre = static_cast<long long>(std::llround(ppd * std::log10(static_cast<double>(tau))));
    for (long long k = std::max(0LL, centre - 1); k <= centre + 1; ++k)
        if (static_cast<std::size_t>(std::llround(std::pow(10.0, static_cast<double>(k) / ppd))) == tau) return true;
    return false;
}

Snapshot make_snapshot(std::size_t tau, double total, std::span<const double> x, bool full) {
    Snapshot s;
    s.tau = tau;
    s.total = total;
    if (full)
        s.values.emplace(x.begin(), x.end());
    else
        s.summary = summarize(x);
    return s;
}

void check_setup(const Schedule& schedule, std::size_t n, std::size_t steps) {
    if (schedule.n() != n)
        throw DimensionError("initial wealth has " + std::to_string(n) + " agents, schedule is " +
                             std::to_string(schedule.n()) + "x" + std::to_string(schedule.n()));
    if (steps > schedule.size())
        throw ScheduleExhausted("schedule provides " + std::to_string(schedule.size()) + " steps, " +
                                std::to_string(steps) + " requested");
}

}  // namespace

bool SnapshotPolicy::records(std::size_t tau, std::size_t steps) const noexcept {
    if (tau == 0 || tau == steps) return true;
    switch (spacing) {
        case Spacing::Every: return every != 0 && tau % every == 0;
        case Spacing::LogSpaced: return is_log_point(tau, points_per_decade);
        case Spacing::FinalOnly: return false;
    }
    return false;
}

SnapshotSummary summarize(std::span<const double> values) {
    SnapshotSummary s;
    s.gini = analytics::gini(values);
    s.top1 = analytics::top_share(values, 0.01).value_or(0.0);
    s.top10 = analytics::top_share(values, 0.10).value_or(0.0);
    return s;
}

SimulationTrace run_simulation(const Schedule& schedule, const WealthVector& x0, const SnapshotPolicy& policy,
                               std::optional<std::size_t> steps, RunStamp stamp) {
    const std::size_t n = x0.size();
    const std::size_t T = steps.value_or(schedule.size());
    check_setup(schedule, n, T);

    SimulationTrace trace;
    trace.mode = NumericMode::Float;
    trace.n = n;
    trace.steps = T;
    trace.stamp = std::move(stamp);
    trace.monetary_base = x0.total();
    trace.totals.reserve(T);
    trace.drift.reserve(T);

    std::vector<double> cur(x0.values().begin(), x0.values().end());
    std::vector<double> next(n);
    const bool full = policy.content == SnapshotPolicy::Content::Full;
    trace.snapshots.push_back(make_snapshot(0, trace.monetary_base, cur, full || T == 0));

    for (std::size_t tau = 0; tau < T; ++tau) {
        step_into(schedule.at(tau), cur, next);
        cur.swap(next);
        const double total = compensated_sum(cur);
        trace.totals.push_back(total);
        trace.drift.push_back(std::abs(total - trace.monetary_base));
        const std::size_t t = tau + 1;
        if (policy.records(t, T)) trace.snapshots.push_back(make_snapshot(t, total, cur, full || t == T));
    }
    trace.final_state = WealthVector(std::move(cur));
    return trace;
}

SimulationTrace run_simulation(const Schedule& schedule, const IntegerWealth& x0, const SnapshotPolicy& policy,
                               std::optional<std::size_t> steps, RunStamp stamp) {
    const std::size_t n = x0.size();
    const std::size_t T = steps.value_or(schedule.size());
    check_setup(schedule, n, T);

    SimulationTrace trace;
    trace.mode = NumericMode::Integer;
    trace.n = n;
    trace.steps = T;
    trace.stamp = std::move(stamp);
    const std::int64_t base = x0.total();
    trace.monetary_base = static_cast<double>(base);
    trace.totals.reserve(T);
    trace.drift.reserve(T);

    std::vector<std::int64_t> cur(x0.units().begin(), x0.units().end());
    std::vector<std::int64_t> next(n);
    std::vector<std::int64_t> payouts;
    std::vector<double> view(n);
    const bool full = policy.content == SnapshotPolicy::Content::Full;
    auto as_double = [&] {
        for (std::size_t i = 0; i < n; ++i) view[i] = static_cast<double>(cur[i]);
        return std::span<const double>(view);
    };
    trace.snapshots.push_back(make_snapshot(0, trace.monetary_base, as_double(), full || T == 0));

    for (std::size_t tau = 0; tau < T; ++tau) {
        step_into(schedule.at(tau), cur, next, payouts);
        cur.swap(next);
        std::int64_t total = 0;
        for (std::int64_t u : cur) total += u;
        trace.totals.push_back(static_cast<double>(total));
        trace.drift.push_back(static_cast<double>(total > base ? total - base : base - total));
        const std::size_t t = tau + 1;
        if (policy.records(t, T))
            trace.snapshots.push_back(make_snapshot(t, static_cast<double>(total), as_double(), full || t == T));
    }
    IntegerWealth fin(std::move(cur));
    trace.final_state = fin.to_float();
    trace.final_integer = std::move(fin);
    return trace;
}

}  // namespace cfm
