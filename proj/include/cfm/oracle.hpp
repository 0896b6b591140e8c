#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cfm/circulation_matrix.hpp"
#include "cfm/wealth.hpp"

// Plain dense reference implementation used to cross-check the sparse engine.
// Everything here is single-threaded and sums in index order without
// compensation, so it shares no arithmetic path with the engine.
namespace cfm::oracle {

inline constexpr std::size_t kOracleMaxN = 4096;
inline constexpr std::size_t kPowerMaxN = 256;
inline constexpr unsigned kPowerMaxLog2 = 30;

/// Row-major n x n matrix of fractions.
class DenseMatrix {
public:
    /// Throws std::invalid_argument when n == 0 or the data is not n * n long.
    DenseMatrix(std::size_t n, std::vector<double> row_major);

    static DenseMatrix identity(std::size_t n);
    /// Throws GuardrailError above kOracleMaxN.
    static DenseMatrix from_sparse(const CirculationMatrix& m);

    std::size_t n() const noexcept { return n_; }
    double operator()(std::size_t i, std::size_t j) const noexcept { return a_[i * n_ + j]; }
    double& operator()(std::size_t i, std::size_t j) noexcept { return a_[i * n_ + j]; }
    std::span<const double> data() const noexcept { return a_; }

    /// Plain sum of each column.
    std::vector<double> column_sums() const;
    /// Same invariants as CirculationMatrix (entries in [0, 1], columns sum to 1).
    bool is_column_stochastic(double tolerance = kColumnTolerance) const;

private:
    std::size_t n_;
    std::vector<double> a_;
};

/// y_i = sum_j F[i][j] * x_j, summed in increasing j.
std::vector<double> dense_step(const DenseMatrix& f, std::span<const double> x);

/// a * b with plain triple-loop sums.
DenseMatrix dense_multiply(const DenseMatrix& a, const DenseMatrix& b);

/// F^(2^log2_exponent) by repeated squaring. Throws GuardrailError for
/// n > kPowerMaxN or log2_exponent > kPowerMaxLog2.
DenseMatrix dense_power(const DenseMatrix& f, unsigned log2_exponent);

/// Steps x0 through `factors` in order with dense_step.
std::vector<double> dense_chain(std::span<const DenseMatrix> factors, std::span<const double> x0);

struct EquivalenceReport {
    double max_abs = 0.0;
    double l1 = 0.0;
    std::optional<std::size_t> worst_index;  // nullopt when identical
    double tolerance = 0.0;
    bool passed = false;

    std::string summary() const;
};

/// Compares engine output against oracle output; passes iff max_abs <= tolerance.
/// Throws DimensionError on length mismatch.
EquivalenceReport equivalence_check(std::span<const double> engine, std::span<const double> reference,
                                    double tolerance);

}  // namespace cfm::oracle
