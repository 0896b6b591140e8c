#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cfm/circulation_matrix.hpp"
#include "cfm/simulation.hpp"
#include "cfm/wealth.hpp"

namespace cfm::analytics {

// ---------------------------------------------------------------------------
// Inequality
//
// Zero-wealth agents count here (they are part of the population). A zero
// total has no defined share, so these return nullopt instead of 0.
// ---------------------------------------------------------------------------

/// Gini coefficient via the sorted-rank formula
/// G = 2 * sum_i i * x_(i) / (n * sum x) - (n + 1) / n, ascending x_(i).
std::optional<double> gini(std::span<const double> x);
inline std::optional<double> gini(const WealthVector& x) { return gini(x.values()); }

struct LorenzPoint {
    double population = 0.0;
    double wealth = 0.0;
};

/// n + 1 points from (0, 0) to (1, 1) after an ascending sort.
std::optional<std::vector<LorenzPoint>> lorenz_curve(std::span<const double> x);

/// Wealth share held by the richest max(1, ceil(fraction * n)) agents.
std::optional<double> top_share(std::span<const double> x, double fraction);

struct InequalityReport {
    std::size_t tau = 0;
    std::optional<double> gini;
    std::vector<LorenzPoint> lorenz;
    std::map<double, double> top_shares;  // fraction -> share
};

InequalityReport inequality_report(std::span<const double> x, std::size_t tau = 0);

// ---------------------------------------------------------------------------
// Tails
// ---------------------------------------------------------------------------

struct CcdfPoint {
    double level = 0.0;
    double probability = 0.0;  // P(X > level) among strictly positive entries
};

struct TailFitReport {
    std::vector<CcdfPoint> ccdf;        // over the fitted range, ascending level
    std::optional<double> hill_alpha;   // nullopt when the log-spacings vanish
    std::size_t k_used = 0;
    std::size_t positive_count = 0;
    double threshold = 0.0;             // x_(n-k), the (k+1)-th largest positive value
    double max_value = 0.0;
    std::optional<double> ks_distance;  // empirical tail vs. fitted Pareto
    std::string diagnostic;
};

/// max(10, n / 100).
std::size_t default_hill_k(std::size_t n) noexcept;

/// Empirical CCDF over the distinct strictly positive levels of x.
std::vector<CcdfPoint> empirical_ccdf(std::span<const double> x);

/// Hill estimate of the Pareto tail exponent from the top k order statistics
/// of the strictly positive entries:
///   alpha = k / sum_{i=1..k} ln(x_(n-i+1) / x_(n-k)).
/// Throws std::invalid_argument if k < 2 or fewer than k + 1 positive entries.
TailFitReport hill_estimator(std::span<const double> x, std::size_t k);

// ---------------------------------------------------------------------------
// Fixed points and convergence
// ---------------------------------------------------------------------------

struct StationaryResult {
    WealthVector vector;  // normalized to total 1
    bool converged = false;
    double residual = 0.0;  // L1 change of the last iteration
    std::size_t iterations = 0;
};

/// Power iteration from the uniform vector until the L1 change is at most
/// `tolerance`. Only meaningful for primitive F; that is not checked. On
/// non-convergence the last iterate and its residual are returned with
/// `converged == false`.
StationaryResult stationary_estimate(const CirculationMatrix& matrix, double tolerance, std::size_t max_iters);

struct ConvergenceReport {
    std::vector<std::size_t> taus;           // later snapshot of each consecutive pair
    std::vector<double> step_distances;      // ||x(b) - x(a)||_1 / M
    std::vector<std::size_t> reference_taus;
    std::vector<double> reference_distances; // ||x/M - r/total(r)||_1
    double threshold = 0.0;
    std::optional<std::size_t> first_crossing;  // first tau with reference distance <= threshold
};

/// Distances between consecutive full-vector snapshots, normalized by M.
/// Throws std::invalid_argument when fewer than two snapshots carry full
/// vectors (the run used a summary snapshot policy).
ConvergenceReport convergence_diagnostics(const SimulationTrace& trace,
                                          const std::optional<WealthVector>& reference = std::nullopt,
                                          double threshold = 1e-8);

// ---------------------------------------------------------------------------
// Conservation
// ---------------------------------------------------------------------------

struct ConservationAudit {
    NumericMode mode = NumericMode::Float;
    double monetary_base = 0.0;
    std::vector<double> drift;  // |total(x(tau)) - M| per step
    double max_abs_drift = 0.0;
    double max_rel_drift = 0.0;
    double max_step_rel_change = 0.0;  // max |total(t+1) - total(t)| / M
    double step_bound = 0.0;           // 0 in integer mode, n * 1e-12 in float mode
    bool passed = false;
};

/// Integer runs pass only with zero drift everywhere. Float runs pass when no
/// single step moves the total by more than n * 1e-12 relative to M.
ConservationAudit conservation_audit(const SimulationTrace& trace);

}  // namespace cfm::analytics
