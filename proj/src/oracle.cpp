#include "cfm/oracle.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "cfm/error.hpp"

namespace cfm::oracle {

DenseMatrix::DenseMatrix(std::size_t n, std::vector<double> row_major) : n_(n), a_(std::move(row_major)) {
    if (n == 0) throw std::invalid_argument("dense matrix needs n >= 1");
    if (a_.size() != n * n) throw std::invalid_argument("dense matrix data must hold n * n entries");
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
    std::vector<double> a(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) a[i * n + i] = 1.0;
    return DenseMatrix(n, std::move(a));
}

DenseMatrix DenseMatrix::from_sparse(const CirculationMatrix& m) {
    const std::size_t n = m.n();
    if (n > kOracleMaxN)
        throw GuardrailError("oracle refuses n = " + std::to_string(n) + " (limit " + std::to_string(kOracleMaxN) + ")");
    std::vector<double> a(n * n, 0.0);
    for (const auto& t : m.triplets()) a[std::size_t(t.row) * n + t.col] = t.value;
    return DenseMatrix(n, std::move(a));
}

std::vector<double> DenseMatrix::column_sums() const {
    std::vector<double> s(n_, 0.0);
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = 0; j < n_; ++j) s[j] += a_[i * n_ + j];
    return s;
}

bool DenseMatrix::is_column_stochastic(double tolerance) const {
    for (double v : a_)
        if (v < 0.0 || v > 1.0) return false;
    for (double s : column_sums())
        if (std::abs(s - 1.0) > tolerance) return false;
    return true;
}

std::vector<double> dense_step(const DenseMatrix& f, std::span<const double> x) {
    const std::size_t n = f.n();
    if (x.size() != n) throw DimensionError("dense_step: vector length " + std::to_string(x.size()) + " != " + std::to_string(n));
    if (n > kOracleMaxN) throw GuardrailError("dense_step above oracle size limit");
    std::vector<double> y(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) s += f(i, j) * x[j];
        y[i] = s;
    }
    return y;
}

DenseMatrix dense_multiply(const DenseMatrix& a, const DenseMatrix& b) {
    const std::size_t n = a.n();
    if (b.n() != n) throw DimensionError("dense_multiply: dimension mismatch");
    std::vector<double> c(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < n; ++k) s += a(i, k) * b(k, j);
            c[i * n + j] = s;
        }
    return DenseMatrix(n, std::move(c));
}

DenseMatrix dense_power(const DenseMatrix& f, unsigned log2_exponent) {
    if (f.n() > kPowerMaxN)
        throw GuardrailError("dense_power refuses n = " + std::to_string(f.n()) + " (limit " + std::to_string(kPowerMaxN) + ")");
    if (log2_exponent > kPowerMaxLog2)
        throw GuardrailError("dense_power refuses exponent 2^" + std::to_string(log2_exponent));
    DenseMatrix p = f;
    for (unsigned k = 0; k < log2_exponent; ++k) p = dense_multiply(p, p);
    return p;
}

std::vector<double> dense_chain(std::span<const DenseMatrix> factors, std::span<const double> x0) {
    std::vector<double> x(x0.begin(), x0.end());
    for (const auto& f : factors) x = dense_step(f, x);
    return x;
}

std::string EquivalenceReport::summary() const {
    std::ostringstream os;
    os.precision(6);
    os << (passed ? "pass" : "FAIL") << ": max_abs=" << max_abs << " l1=" << l1 << " tolerance=" << tolerance;
    if (worst_index) os << " worst_agent=" << *worst_index + 1;
    return os.str();
}

EquivalenceReport equivalence_check(std::span<const double> engine, std::span<const double> reference,
                                    double tolerance) {
    if (engine.size() != reference.size())
        throw DimensionError("equivalence_check: lengths " + std::to_string(engine.size()) + " and " +
                             std::to_string(reference.size()) + " differ");
    EquivalenceReport r;
    r.tolerance = tolerance;
    for (std::size_t i = 0; i < engine.size(); ++i) {
        const double d = std::abs(engine[i] - reference[i]);
        r.l1 += d;
        if (d > r.max_abs || (std::isnan(d) && !std::isnan(r.max_abs))) {
            r.max_abs = d;
            r.worst_index = i;
        }
    }
    r.passed = r.max_abs <= tolerance;
    return r;
}

}  // namespace cfm::oracle
