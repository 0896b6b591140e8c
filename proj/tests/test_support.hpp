#pragma once

// Test-only helpers. Random matrices here are built directly from uniform
// draws and do not go through the generator module.

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "cfm/circulation_matrix.hpp"
#include "cfm/wealth.hpp"

namespace cfm::testing {

/// Random column-stochastic matrix: each off-diagonal entry is present with
/// probability `density`, weights are uniform, the column spends a uniform
/// share of wealth and keeps the rest on the diagonal.
inline CirculationMatrix random_matrix(std::size_t n, std::mt19937_64& rng, double density = 0.5,
                                       bool positive_diagonal = false) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<Triplet> t;
    for (std::size_t j = 0; j < n; ++j) {
        std::vector<std::pair<std::size_t, double>> col;
        double wsum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (i == j || u(rng) >= density) continue;
            const double w = u(rng) + 1e-3;
            col.emplace_back(i, w);
            wsum += w;
        }
        const double spend = col.empty() ? 0.0 : (positive_diagonal ? 0.05 + 0.9 * u(rng) : u(rng));
        double off = 0.0;
        for (auto& [i, w] : col) {
            const double f = spend * w / wsum;
            t.push_back({AgentIndex(i), AgentIndex(j), f});
            off += f;
        }
        t.push_back({AgentIndex(j), AgentIndex(j), std::max(0.0, 1.0 - off)});
    }
    return CirculationMatrix::from_triplets(n, std::move(t));
}

/// Entrywise positive matrix (hence primitive).
inline CirculationMatrix random_positive_matrix(std::size_t n, std::mt19937_64& rng) {
    return random_matrix(n, rng, 1.1, true);
}

inline std::vector<double> random_wealth(std::size_t n, std::mt19937_64& rng, double scale = 100.0) {
    std::uniform_real_distribution<double> u(0.0, scale);
    std::vector<double> x(n);
    for (auto& v : x) v = u(rng);
    return x;
}

/// Naive dense product y = F x, straight from the triplets.
inline std::vector<double> naive_apply(const CirculationMatrix& f, const std::vector<double>& x) {
    std::vector<double> y(f.n(), 0.0);
    for (const auto& t : f.triplets()) y[t.row] += t.value * x[t.col];
    return y;
}

inline std::vector<double> column_sums(const CirculationMatrix& f) {
    std::vector<double> s(f.n(), 0.0);
    for (const auto& t : f.triplets()) s[t.col] += t.value;
    return s;
}

}  // namespace cfm::testing
