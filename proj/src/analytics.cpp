#include "cfm/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

#include "cfm/dynamics.hpp"

namespace cfm::analytics {

namespace {

std::vector<double> sorted_ascending(std::span<const double> x) {
    std::vector<double> s(x.begin(), x.end());
    std::sort(s.begin(), s.end());
    return s;
}

double l1_distance(std::span<const double> a, double sa, std::span<const double> b, double sb) {
    CompensatedSum d;
    for (std::size_t i = 0; i < a.size(); ++i) d.add(std::abs(a[i] / sa - b[i] / sb));
    return d.value();
}

}  // namespace

std::optional<double> gini(std::span<const double> x) {
    if (x.empty()) return std::nullopt;
    const auto s = sorted_ascending(x);
    const double total = compensated_sum(s);
    if (!(total > 0.0)) return std::nullopt;
    CompensatedSum weighted;
    for (std::size_t i = 0; i < s.size(); ++i) weighted.add(static_cast<double>(i + 1) * s[i]);
    const double n = static_cast<double>(s.size());
    const double g = 2.0 * weighted.value() / (n * total) - (n + 1.0) / n;
    return std::clamp(g, 0.0, 1.0);
}

std::optional<std::vector<LorenzPoint>> lorenz_curve(std::span<const double> x) {
    if (x.empty()) return std::nullopt;
    const auto s = sorted_ascending(x);
    const double total = compensated_sum(s);
    if (!(total > 0.0)) return std::nullopt;
    const double n = static_cast<double>(s.size());
    std::vector<LorenzPoint> pts;
    pts.reserve(s.size() + 1);
    pts.push_back({0.0, 0.0});
    CompensatedSum cum;
    for (std::size_t i = 0; i < s.size(); ++i) {
        cum.add(s[i]);
        pts.push_back({static_cast<double>(i + 1) / n, std::min(1.0, cum.value() / total)});
    }
    pts.back() = {1.0, 1.0};
    return pts;
}

std::optional<double> top_share(std::span<const double> x, double fraction) {
    if (x.empty() || !(fraction > 0.0) || fraction > 1.0) return std::nullopt;
    const double total = compensated_sum(x);
    if (!(total > 0.0)) return std::nullopt;
    const auto n = x.size();
    std::size_t k = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n) - 1e-9));
    k = std::clamp<std::size_t>(k, 1, n);
    std::vector<double> s(x.begin(), x.end());
    std::nth_element(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(k - 1), s.end(), std::greater<>());
    std::sort(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(k), std::greater<>());
    return std::min(1.0, compensated_sum(std::span(s).first(k)) / total);
}

InequalityReport inequality_report(std::span<const double> x, std::size_t tau) {
    InequalityReport r;
    r.tau = tau;
    r.gini = gini(x);
    if (auto l = lorenz_curve(x)) r.lorenz = std::move(*l);
    for (double q : {0.01, 0.1})
        if (auto s = top_share(x, q)) r.top_shares[q] = *s;
    return r;
}

std::size_t default_hill_k(std::size_t n) noexcept { return std::max<std::size_t>(10, n / 100); }

std::vector<CcdfPoint> empirical_ccdf(std::span<const double> x) {
    std::vector<double> pos;
    for (double v : x)
        if (v > 0.0) pos.push_back(v);
    std::sort(pos.begin(), pos.end());
    std::vector<CcdfPoint> out;
    const double n = static_cast<double>(pos.size());
    for (std::size_t i = 0; i < pos.size(); ++i) {
        if (i + 1 < pos.size() && pos[i + 1] == pos[i]) continue;
        out.push_back({pos[i], static_cast<double>(pos.size() - i - 1) / n});
    }
    return out;
}

TailFitReport hill_estimator(std::span<const double> x, std::size_t k) {
    if (k < 2) throw std::invalid_argument("Hill estimator needs k >= 2");
    std::vector<double> pos;
    for (double v : x)
        if (v > 0.0) pos.push_back(v);
    if (pos.size() < k + 1)
        throw std::invalid_argument("Hill estimator needs at least k + 1 = " + std::to_string(k + 1) +
                                    " positive entries, got " + std::to_string(pos.size()));
    std::sort(pos.begin(), pos.end(), std::greater<>());

    TailFitReport r;
    r.k_used = k;
    r.positive_count = pos.size();
    r.threshold = pos[k];
    r.max_value = pos.front();

    CompensatedSum logs;
    for (std::size_t i = 0; i < k; ++i) logs.add(std::log(pos[i] / r.threshold));
    const double denom = logs.value();

    // CCDF over the fitted range [threshold, max].
    const double npos = static_cast<double>(pos.size());
    for (std::size_t i = k + 1; i-- > 0;) {
        if (i > 0 && pos[i - 1] == pos[i]) continue;
        r.ccdf.push_back({pos[i], static_cast<double>(i) / npos});
    }

    if (!(denom > 0.0)) {
        r.diagnostic = "undefined: top-k values all equal the threshold (zero log-spacings)";
        return r;
    }
    const double alpha = static_cast<double>(k) / denom;
    r.hill_alpha = alpha;

    // KS distance between the k exceedances and the fitted conditional Pareto.
    double ks = 0.0;
    for (std::size_t m = 0; m < k; ++m) {
        const double y = pos[k - 1 - m];  // ascending within the tail
        const double fit = 1.0 - std::pow(r.threshold / y, alpha);
        const double lo = static_cast<double>(m) / static_cast<double>(k);
        const double hi = static_cast<double>(m + 1) / static_cast<double>(k);
        ks = std::max({ks, std::abs(hi - fit), std::abs(fit - lo)});
    }
    r.ks_distance = ks;
    r.diagnostic = "ok";
    return r;
}

StationaryResult stationary_estimate(const CirculationMatrix& matrix, double tolerance, std::size_t max_iters) {
    const std::size_t n = matrix.n();
    std::vector<double> v(n, 1.0 / static_cast<double>(n));
    std::vector<double> w(n);
    double residual = 0.0;
    std::size_t it = 0;
    bool converged = false;
    while (it < max_iters) {
        step_into(matrix, v, w);
        const double total = compensated_sum(w);
        for (double& e : w) e /= total;
        CompensatedSum d;
        for (std::size_t i = 0; i < n; ++i) d.add(std::abs(w[i] - v[i]));
        residual = d.value();
        ++it;
        v.swap(w);
        if (residual <= tolerance) {
            converged = true;
            break;
        }
    }
    return {WealthVector(std::move(v)), converged, residual, it};
}

ConvergenceReport convergence_diagnostics(const SimulationTrace& trace, const std::optional<WealthVector>& reference,
                                          double threshold) {
    std::vector<const Snapshot*> full;
    for (const auto& s : trace.snapshots)
        if (s.full()) full.push_back(&s);
    if (full.size() < 2)
        throw std::invalid_argument(
            "convergence diagnostics need at least two full-vector snapshots; re-run with a full snapshot "
            "policy (e.g. snapshots.content = \"full\")");
    if (reference && reference->size() != trace.n)
        throw std::invalid_argument("reference vector size does not match the trace");

    ConvergenceReport r;
    r.threshold = threshold;
    const double m = trace.monetary_base;
    for (std::size_t k = 1; k < full.size(); ++k) {
        r.taus.push_back(full[k]->tau);
        r.step_distances.push_back(l1_distance(*full[k]->values, m, *full[k - 1]->values, m));
    }
    if (reference) {
        const double rt = reference->total();
        for (const auto* s : full) {
            const double d = l1_distance(*s->values, m, reference->values(), rt);
            r.reference_taus.push_back(s->tau);
            r.reference_distances.push_back(d);
            if (!r.first_crossing && d <= threshold) r.first_crossing = s->tau;
        }
    }
    return r;
}

ConservationAudit conservation_audit(const SimulationTrace& trace) {
    ConservationAudit a;
    a.mode = trace.mode;
    a.monetary_base = trace.monetary_base;
    a.drift = trace.drift;
    const double m = trace.monetary_base;
    double prev = m;
    for (std::size_t t = 0; t < trace.drift.size(); ++t) {
        a.max_abs_drift = std::max(a.max_abs_drift, trace.drift[t]);
        if (m > 0.0) {
            a.max_rel_drift = std::max(a.max_rel_drift, trace.drift[t] / m);
            a.max_step_rel_change = std::max(a.max_step_rel_change, std::abs(trace.totals[t] - prev) / m);
        }
        prev = trace.totals[t];
    }
    if (trace.mode == NumericMode::Integer || m == 0.0) {
        a.step_bound = 0.0;
        a.passed = a.max_abs_drift == 0.0;
    } else {
        a.step_bound = static_cast<double>(trace.n) * 1e-12;
        a.passed = a.max_step_rel_change <= a.step_bound;
    }
    return a;
}

}  // namespace cfm::analytics
