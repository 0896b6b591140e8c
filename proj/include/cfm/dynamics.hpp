#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "cfm/circulation_matrix.hpp"
#include "cfm/wealth.hpp"

namespace cfm {

/// Largest dimension accepted by the explicit (dense) product path.
inline constexpr std::size_t kProductMaxN = 1024;

/// One step of the circulation: y_i = sum_j f_ij * x_j.
///
/// Each output agent is accumulated over its row in ascending column order
/// with compensated summation. Rows are independent, so the work may be split
/// across threads without changing a single bit of the result.
///
/// Throws DimensionError on size mismatch and ValidationError when the matrix
/// failed validation.
WealthVector apply_step(const CirculationMatrix& matrix, const WealthVector& x);

/// Exact-conservation step on integer minor units.
///
/// For every buyer j the payouts f_ij * x_j (i != j) are apportioned by the
/// largest-remainder method against round(x_j * off-diagonal share), ties
/// going to the lower seller index; whatever is not paid out stays with j as
/// savings. Every column therefore redistributes exactly x_j units.
IntegerWealth apply_step(const CirculationMatrix& matrix, const IntegerWealth& x);

/// Scratch-buffer variants used by the simulation loop. `in` and `out` must
/// not alias. These skip the per-call wealth checks but still check the
/// matrix and the sizes.
void step_into(const CirculationMatrix& matrix, std::span<const double> in, std::span<double> out);
void step_into(const CirculationMatrix& matrix, std::span<const std::int64_t> in, std::span<std::int64_t> out,
               std::vector<std::int64_t>& payouts);

/// Amount agent j spends on other agents during the step: x_j * sum_{i != j} f_ij.
double total_expenses(const CirculationMatrix& matrix, const WealthVector& x, AgentIndex j);

/// s_j = 1 - sum_{i != j} f_ij, the share of wealth agent j keeps.
double savings_fraction(const CirculationMatrix& matrix, AgentIndex j);

/// Explicit product of `factors` given in chronological order, i.e.
/// F_{k-1} * ... * F_1 * F_0, so that applying it to x(0) gives x(k).
/// With no factors the result is the n x n identity.
///
/// Throws DimensionError if the factors disagree on n and GuardrailError
/// when n > kProductMaxN. The result is built from the raw products; its
/// column sums are not renormalized.
CirculationMatrix matrix_product(std::span<const CirculationMatrix* const> factors, std::size_t n);
CirculationMatrix matrix_product(std::span<const CirculationMatrix> factors, std::size_t n);

}  // namespace cfm
