#include "cfm/circulation_matrix.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "cfm/wealth.hpp"

namespace cfm {

namespace {

ColumnCheck check_column(AgentIndex j, std::span<const AgentIndex> rows, std::span<const double> vals) {
    ColumnCheck c;
    c.column = j;
    CompensatedSum total;
    CompensatedSum off;
    for (std::size_t k = 0; k < rows.size(); ++k) {
        const double v = vals[k];
        if (v < 0.0) ++c.negative_entries;
        if (v > 1.0) ++c.entries_above_one;
        total.add(v);
        if (rows[k] != j) off.add(v);
    }
    c.sum_deviation = total.value() - 1.0;
    c.implied_diagonal = 1.0 - off.value();
    return c;
}

}  // namespace

bool ColumnCheck::ok(double tolerance) const noexcept {
    return std::abs(sum_deviation) <= tolerance && negative_entries == 0 && entries_above_one == 0 &&
           implied_diagonal >= -tolerance;
}

std::string ColumnCheck::describe() const {
    std::ostringstream os;
    os.precision(17);
    os << "column " << column + 1 << ":";
    if (negative_entries) {
        os << " " << negative_entries << " negative entr" << (negative_entries == 1 ? "y" : "ies") << ";";
    }
    if (entries_above_one) {
        os << " " << entries_above_one << " entr" << (entries_above_one == 1 ? "y" : "ies") << " above 1;";
    }
    if (implied_diagonal < 0.0) {
        os << " off-diagonal sum exceeds 1 (implied savings " << implied_diagonal << ");";
    }
    os << " column sum deviates from 1 by " << sum_deviation;
    return os.str();
}

bool ValidationReport::valid() const noexcept {
    return std::all_of(columns.begin(), columns.end(), [&](const ColumnCheck& c) { return c.ok(tolerance); });
}

double ValidationReport::max_abs_deviation() const noexcept {
    double m = 0.0;
    for (const auto& c : columns) m = std::max(m, std::abs(c.sum_deviation));
    return m;
}

std::vector<ColumnCheck> ValidationReport::violations() const {
    std::vector<ColumnCheck> out;
    for (const auto& c : columns)
        if (!c.ok(tolerance)) out.push_back(c);
    return out;
}

std::optional<ColumnCheck> ValidationReport::first_violation() const {
    for (const auto& c : columns)
        if (!c.ok(tolerance)) return c;
    return std::nullopt;
}

std::string ValidationReport::summary() const {
    std::ostringstream os;
    const auto bad = violations();
    if (bad.empty()) {
        os << "valid: " << n << " columns, max |column sum - 1| = " << max_abs_deviation();
        return os.str();
    }
    os << "invalid: " << bad.size() << " of " << n << " columns violate the column-stochastic invariants";
    const std::size_t shown = std::min<std::size_t>(bad.size(), 5);
    for (std::size_t k = 0; k < shown; ++k) os << "\n  " << bad[k].describe();
    if (bad.size() > shown) os << "\n  ...";
    return os.str();
}

CirculationMatrix CirculationMatrix::from_triplets(std::size_t n, std::vector<Triplet> triplets) {
    if (n == 0) throw std::invalid_argument("circulation matrix needs n >= 1");
    if (n > std::numeric_limits<AgentIndex>::max())
        throw std::invalid_argument("agent count exceeds the 32-bit index range");

    for (const auto& t : triplets) {
        if (t.row >= n || t.col >= n)
            throw std::invalid_argument("entry (" + std::to_string(t.row + 1) + ", " + std::to_string(t.col + 1) +
                                        ") outside a " + std::to_string(n) + "x" + std::to_string(n) + " matrix");
        if (!std::isfinite(t.value))
            throw std::invalid_argument("non-finite fraction at (" + std::to_string(t.row + 1) + ", " +
                                        std::to_string(t.col + 1) + ")");
    }
    std::sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
        return a.col != b.col ? a.col < b.col : a.row < b.row;
    });

    CirculationMatrix m;
    m.n_ = n;
    m.col_ptr_.assign(n + 1, 0);
    m.diag_slot_.assign(n, 0);
    m.row_idx_.reserve(triplets.size() + n);
    m.values_.reserve(triplets.size() + n);

    std::size_t k = 0;
    for (AgentIndex j = 0; j < n; ++j) {
        m.col_ptr_[j] = m.values_.size();
        bool have_diag = false;
        auto push = [&](AgentIndex i, double v) {
            if (i == j) {
                m.diag_slot_[j] = m.values_.size();
                have_diag = true;
            }
            m.row_idx_.push_back(i);
            m.values_.push_back(v);
        };
        for (; k < triplets.size() && triplets[k].col == j; ++k) {
            const Triplet& t = triplets[k];
            if (k > 0 && triplets[k - 1].col == j && triplets[k - 1].row == t.row)
                throw std::invalid_argument("duplicate entry (" + std::to_string(t.row + 1) + ", " +
                                            std::to_string(j + 1) + ")");
            if (!have_diag && t.row > j) push(j, 0.0);
            push(t.row, t.value);
        }
        if (!have_diag) push(j, 0.0);
    }
    m.col_ptr_[n] = m.values_.size();
    m.row_idx_.shrink_to_fit();
    m.values_.shrink_to_fit();

    m.valid_ = true;
    m.identity_ = m.values_.size() == n;
    for (AgentIndex j = 0; j < n; ++j) {
        const auto col = m.column(j);
        if (m.identity_ && col.values[0] != 1.0) m.identity_ = false;
        if (m.valid_) {
            const ColumnCheck c = check_column(j, col.rows, col.values);
            if (!c.ok()) {
                m.valid_ = false;
                m.invalid_reason_ = c.describe();
            }
        }
    }
    m.build_row_index();
    return m;
}

CirculationMatrix CirculationMatrix::identity(std::size_t n) {
    std::vector<Triplet> t;
    t.reserve(n);
    for (std::size_t j = 0; j < n; ++j) t.push_back({AgentIndex(j), AgentIndex(j), 1.0});
    return from_triplets(n, std::move(t));
}

void CirculationMatrix::build_row_index() {
    row_ptr_.assign(n_ + 1, 0);
    for (AgentIndex i : row_idx_) ++row_ptr_[i + 1];
    for (std::size_t i = 0; i < n_; ++i) row_ptr_[i + 1] += row_ptr_[i];

    const std::size_t nz = values_.size();
    row_col_.resize(nz);
    row_val_.resize(nz);
    row_slot_.resize(nz);
    std::vector<std::uint64_t> cursor(row_ptr_.begin(), row_ptr_.end() - 1);
    // Columns are visited in ascending order, so each row lists its columns ascending.
    for (AgentIndex j = 0; j < n_; ++j) {
        for (std::uint64_t s = col_ptr_[j]; s < col_ptr_[j + 1]; ++s) {
            const std::uint64_t dst = cursor[row_idx_[s]]++;
            row_col_[dst] = j;
            row_val_[dst] = values_[s];
            row_slot_[dst] = s;
        }
    }
}

CirculationMatrix::ColumnView CirculationMatrix::column(AgentIndex j) const {
    const std::size_t b = col_ptr_[j];
    const std::size_t e = col_ptr_[j + 1];
    return {std::span(row_idx_).subspan(b, e - b), std::span(values_).subspan(b, e - b)};
}

CirculationMatrix::RowView CirculationMatrix::row(AgentIndex i) const {
    const std::size_t b = row_ptr_[i];
    const std::size_t e = row_ptr_[i + 1];
    return {std::span(row_col_).subspan(b, e - b), std::span(row_val_).subspan(b, e - b),
            std::span(row_slot_).subspan(b, e - b)};
}

double CirculationMatrix::at(AgentIndex i, AgentIndex j) const {
    if (i >= n_ || j >= n_) throw std::out_of_range("matrix index out of range");
    const auto col = column(j);
    const auto it = std::lower_bound(col.rows.begin(), col.rows.end(), i);
    if (it == col.rows.end() || *it != i) return 0.0;
    return col.values[static_cast<std::size_t>(it - col.rows.begin())];
}

std::vector<Triplet> CirculationMatrix::triplets() const {
    std::vector<Triplet> out;
    out.reserve(nnz());
    for (AgentIndex j = 0; j < n_; ++j) {
        const auto col = column(j);
        for (std::size_t k = 0; k < col.rows.size(); ++k) out.push_back({col.rows[k], j, col.values[k]});
    }
    return out;
}

bool operator==(const CirculationMatrix& a, const CirculationMatrix& b) noexcept {
    if (a.n_ != b.n_ || a.col_ptr_ != b.col_ptr_ || a.row_idx_ != b.row_idx_) return false;
    // Bitwise, so that +0/-0 and NaN payloads are not conflated.
    return std::equal(a.values_.begin(), a.values_.end(), b.values_.begin(),
                      [](double x, double y) { return std::bit_cast<std::uint64_t>(x) == std::bit_cast<std::uint64_t>(y); });
}

ValidationReport validate(const CirculationMatrix& matrix, double tolerance) {
    ValidationReport r;
    r.n = matrix.n();
    r.tolerance = tolerance;
    r.columns.reserve(matrix.n());
    for (AgentIndex j = 0; j < matrix.n(); ++j) {
        const auto col = matrix.column(j);
        r.columns.push_back(check_column(j, col.rows, col.values));
    }
    return r;
}

}  // namespace cfm
