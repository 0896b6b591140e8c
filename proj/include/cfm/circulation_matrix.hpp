#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace cfm {

using AgentIndex = std::uint32_t;

/// Tolerance on |column sum - 1| accepted from user-supplied matrices.
inline constexpr double kColumnTolerance = 1e-9;
/// Precision the generators promise on column sums.
inline constexpr double kGeneratorTolerance = 1e-12;

/// One stored fraction f_ij: share of buyer `col`'s wealth paid to seller `row`.
/// Indices are 0-based in memory; the text formats are 1-based.
struct Triplet {
    AgentIndex row;
    AgentIndex col;
    double value;

    friend bool operator==(const Triplet&, const Triplet&) = default;
};

struct ColumnCheck {
    AgentIndex column = 0;
    double sum_deviation = 0.0;       // (sum of column) - 1
    double implied_diagonal = 1.0;    // 1 - off-diagonal sum
    std::size_t negative_entries = 0;
    std::size_t entries_above_one = 0;

    bool ok(double tolerance = kColumnTolerance) const noexcept;
    std::string describe() const;
};

/// Outcome of checking the column-stochastic invariants. `columns` has one
/// entry per column, in column order.
struct ValidationReport {
    std::size_t n = 0;
    double tolerance = kColumnTolerance;
    std::vector<ColumnCheck> columns;

    bool valid() const noexcept;
    double max_abs_deviation() const noexcept;
    std::vector<ColumnCheck> violations() const;
    /// First failing column, or nullopt when valid.
    std::optional<ColumnCheck> first_violation() const;
    std::string summary() const;
};

/// Sparse, column-major income circulation matrix.
///
/// Entry (i, j) is the fraction of agent j's wealth that agent i receives
/// during one step; the diagonal holds the savings fraction and is always
/// stored, even when zero. A row-major index over the same entries is kept
/// alongside so a step can be computed one output agent at a time.
///
/// Construction only enforces structure (index range, no duplicates, finite
/// values). Column-stochasticity is checked once and cached: `validate()`
/// reports on it, and the dynamics refuse matrices that fail it.
class CirculationMatrix {
public:
    struct ColumnView {
        std::span<const AgentIndex> rows;
        std::span<const double> values;
    };
    struct RowView {
        std::span<const AgentIndex> cols;
        std::span<const double> values;
        std::span<const std::uint64_t> slots;  // positions of the same entries in column storage
    };

    /// Builds from triplets in any order. Missing diagonal entries are
    /// inserted as explicit zeros. Throws std::invalid_argument for n == 0,
    /// out-of-range indices, duplicate (i, j) pairs or non-finite values.
    static CirculationMatrix from_triplets(std::size_t n, std::vector<Triplet> triplets);

    static CirculationMatrix identity(std::size_t n);

    std::size_t n() const noexcept { return n_; }
    std::size_t nnz() const noexcept { return values_.size(); }

    ColumnView column(AgentIndex j) const;
    RowView row(AgentIndex i) const;
    double diagonal(AgentIndex j) const { return values_[diag_slot_[j]]; }
    /// Stored fraction, or 0 for entries outside the sparsity pattern.
    double at(AgentIndex i, AgentIndex j) const;

    bool is_valid() const noexcept { return valid_; }
    bool is_identity() const noexcept { return identity_; }
    /// Description of the first failing column, empty when valid.
    const std::string& invalid_reason() const noexcept { return invalid_reason_; }

    /// All stored entries, sorted by (column, row).
    std::vector<Triplet> triplets() const;

    std::span<const std::uint64_t> col_ptr() const noexcept { return col_ptr_; }
    std::span<const AgentIndex> row_indices() const noexcept { return row_idx_; }
    std::span<const double> values() const noexcept { return values_; }

    /// Structural and bitwise value equality.
    friend bool operator==(const CirculationMatrix& a, const CirculationMatrix& b) noexcept;

private:
    CirculationMatrix() = default;
    void build_row_index();

    std::size_t n_ = 0;
    std::vector<std::uint64_t> col_ptr_;
    std::vector<AgentIndex> row_idx_;
    std::vector<double> values_;
    std::vector<std::uint64_t> diag_slot_;

    std::vector<std::uint64_t> row_ptr_;
    std::vector<AgentIndex> row_col_;
    std::vector<double> row_val_;
    std::vector<std::uint64_t> row_slot_;

    bool valid_ = false;
    bool identity_ = false;
    std::string invalid_reason_;
};

ValidationReport validate(const CirculationMatrix& matrix, double tolerance = kColumnTolerance);

}  // namespace cfm
