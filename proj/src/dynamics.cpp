#include "cfm/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "cfm/error.hpp"

namespace cfm {

namespace {

void require_valid(const CirculationMatrix& m) {
    if (!m.is_valid())
        throw ValidationError("circulation matrix is not column-stochastic (" + m.invalid_reason() +
                              "); validate before stepping");
}

void require_size(const CirculationMatrix& m, std::size_t got, const char* what) {
    if (got != m.n())
        throw DimensionError(std::string(what) + " has " + std::to_string(got) + " entries, matrix is " +
                             std::to_string(m.n()) + "x" + std::to_string(m.n()));
}

double off_diagonal_sum(const CirculationMatrix& m, AgentIndex j) {
    const auto col = m.column(j);
    CompensatedSum s;
    for (std::size_t k = 0; k < col.rows.size(); ++k)
        if (col.rows[k] != j) s.add(col.values[k]);
    return s.value();
}

// Splits x units of buyer j across its column. Writes one amount per stored
// slot of the column into `out` (diagonal slot receives the savings).
void apportion_column(const CirculationMatrix::ColumnView& col, AgentIndex j, std::int64_t x,
                      std::span<std::int64_t> out, std::vector<double>& rem, std::vector<std::size_t>& order) {
    const std::size_t len = col.rows.size();
    std::fill(out.begin(), out.end(), 0);
    std::size_t diag = len;
    for (std::size_t k = 0; k < len; ++k)
        if (col.rows[k] == j) diag = k;
    if (x == 0) return;

    const double xd = static_cast<double>(x);
    rem.assign(len, 0.0);
    order.clear();
    CompensatedSum target;
    std::int64_t floors = 0;
    for (std::size_t k = 0; k < len; ++k) {
        if (k == diag) continue;
        const double t = col.values[k] * xd;
        target.add(t);
        const double f = std::floor(t);
        out[k] = static_cast<std::int64_t>(f);
        rem[k] = t - f;
        floors += out[k];
        order.push_back(k);
    }
    const std::int64_t paid = std::clamp<std::int64_t>(std::llround(target.value()), 0, x);
    std::int64_t residual = paid - floors;

    if (residual != 0 && !order.empty()) {
        // Largest remainder first; ties to the lower seller index (slots are row-sorted).
        const auto before = [&](std::size_t a, std::size_t b) { return rem[a] > rem[b] || (rem[a] == rem[b] && a < b); };
        if (residual > 0) {
            const auto count = static_cast<std::size_t>(residual);
            if (count < order.size()) {
                std::nth_element(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(count), order.end(), before);
                for (std::size_t r = 0; r < count; ++r) ++out[order[r]];
            } else {
                for (std::size_t r = 0; r < count; ++r) ++out[order[r % order.size()]];
            }
        } else {
            std::sort(order.begin(), order.end(), before);
            // Only reachable when the column overshoots 1 within tolerance:
            // take units back, smallest remainder first.
            bool took = true;
            while (residual < 0 && took) {
                took = false;
                for (auto it = order.rbegin(); it != order.rend() && residual < 0; ++it) {
                    if (out[*it] > 0) {
                        --out[*it];
                        ++residual;
                        took = true;
                    }
                }
            }
        }
    }
    std::int64_t spent = 0;
    for (std::size_t k : order) spent += out[k];
    out[diag] = x - spent;
}

}  // namespace

void step_into(const CirculationMatrix& matrix, std::span<const double> in, std::span<double> out) {
    require_valid(matrix);
    require_size(matrix, in.size(), "input wealth");
    require_size(matrix, out.size(), "output wealth");
    if (matrix.is_identity()) {
        std::copy(in.begin(), in.end(), out.begin());
        return;
    }
    const auto n = static_cast<std::int64_t>(matrix.n());
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
        const auto row = matrix.row(static_cast<AgentIndex>(i));
        double sum = 0.0;
        double comp = 0.0;
        for (std::size_t k = 0; k < row.cols.size(); ++k) {
            const double v = row.values[k] * in[row.cols[k]];
            const double t = sum + v;
            comp += std::abs(sum) >= std::abs(v) ? (sum - t) + v : (v - t) + sum;
            sum = t;
        }
        out[static_cast<std::size_t>(i)] = sum + comp;
    }
}

void step_into(const CirculationMatrix& matrix, std::span<const std::int64_t> in, std::span<std::int64_t> out,
               std::vector<std::int64_t>& payouts) {
    require_valid(matrix);
    require_size(matrix, in.size(), "input wealth");
    require_size(matrix, out.size(), "output wealth");
    if (matrix.is_identity()) {
        std::copy(in.begin(), in.end(), out.begin());
        return;
    }
    payouts.resize(matrix.nnz());
    const auto col_ptr = matrix.col_ptr();
    const auto n = static_cast<std::int64_t>(matrix.n());
#pragma omp parallel
    {
        std::vector<double> rem;
        std::vector<std::size_t> order;
#pragma omp for schedule(static)
        for (std::int64_t j = 0; j < n; ++j) {
            const auto jj = static_cast<AgentIndex>(j);
            const auto col = matrix.column(jj);
            apportion_column(col, jj, in[jj], std::span(payouts).subspan(col_ptr[jj], col.rows.size()), rem, order);
        }
#pragma omp for schedule(static)
        for (std::int64_t i = 0; i < n; ++i) {
            const auto row = matrix.row(static_cast<AgentIndex>(i));
            std::int64_t sum = 0;
            for (std::uint64_t slot : row.slots) sum += payouts[slot];
            out[static_cast<std::size_t>(i)] = sum;
        }
    }
}

WealthVector apply_step(const CirculationMatrix& matrix, const WealthVector& x) {
    std::vector<double> out(x.size());
    step_into(matrix, x.values(), out);
    return WealthVector(std::move(out));
}

IntegerWealth apply_step(const CirculationMatrix& matrix, const IntegerWealth& x) {
    std::vector<std::int64_t> out(x.size());
    std::vector<std::int64_t> payouts;
    step_into(matrix, x.units(), out, payouts);
    return IntegerWealth(std::move(out));
}

double total_expenses(const CirculationMatrix& matrix, const WealthVector& x, AgentIndex j) {
    require_valid(matrix);
    require_size(matrix, x.size(), "wealth vector");
    if (j >= matrix.n()) throw std::out_of_range("agent " + std::to_string(j + 1) + " out of range");
    return x[j] * off_diagonal_sum(matrix, j);
}

double savings_fraction(const CirculationMatrix& matrix, AgentIndex j) {
    require_valid(matrix);
    if (j >= matrix.n()) throw std::out_of_range("agent " + std::to_string(j + 1) + " out of range");
    return 1.0 - off_diagonal_sum(matrix, j);
}

CirculationMatrix matrix_product(std::span<const CirculationMatrix* const> factors, std::size_t n) {
    if (n > kProductMaxN)
        throw GuardrailError("explicit product refused for n = " + std::to_string(n) + " (limit " +
                             std::to_string(kProductMaxN) + "); step the vector instead");
    for (const auto* f : factors) {
        if (f->n() != n)
            throw DimensionError("product factor is " + std::to_string(f->n()) + "x" + std::to_string(f->n()) +
                                 ", expected " + std::to_string(n));
        require_valid(*f);
    }
    if (n == 0) throw std::invalid_argument("circulation matrix needs n >= 1");

    // Column-major dense accumulator; each factor multiplies on the left.
    std::vector<double> acc(n * n, 0.0);
    for (std::size_t j = 0; j < n; ++j) acc[j * n + j] = 1.0;
    std::vector<double> next(n * n);
    for (const auto* f : factors) {
        for (std::size_t c = 0; c < n; ++c)
            step_into(*f, std::span<const double>(acc).subspan(c * n, n), std::span(next).subspan(c * n, n));
        acc.swap(next);
    }

    std::vector<Triplet> t;
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i) {
            const double v = acc[j * n + i];
            if (v != 0.0 || i == j) t.push_back({AgentIndex(i), AgentIndex(j), v});
        }
    return CirculationMatrix::from_triplets(n, std::move(t));
}

CirculationMatrix matrix_product(std::span<const CirculationMatrix> factors, std::size_t n) {
    std::vector<const CirculationMatrix*> ptrs;
    ptrs.reserve(factors.size());
    for (const auto& f : factors) ptrs.push_back(&f);
    return matrix_product(std::span<const CirculationMatrix* const>(ptrs), n);
}

}  // namespace cfm
