#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace cfm {

/// Neumaier-compensated accumulator. Summation order is the call order, so
/// results are reproducible for a fixed input order.
class CompensatedSum {
public:
    void add(double v) noexcept {
        const double t = sum_ + v;
        if ((sum_ >= 0 ? sum_ : -sum_) >= (v >= 0 ? v : -v))
            comp_ += (sum_ - t) + v;
        else
            comp_ += (v - t) + sum_;
        sum_ = t;
    }
    double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

double compensated_sum(std::span<const double> values) noexcept;

/// Per-agent wealth x(t) in monetary units (float mode).
///
/// Entries are non-negative and finite, and there is at least one agent.
/// Construction enforces this; the vector is immutable afterwards.
class WealthVector {
public:
    explicit WealthVector(std::vector<double> values);

    std::size_t size() const noexcept { return values_.size(); }
    double operator[](std::size_t i) const noexcept { return values_[i]; }
    std::span<const double> values() const noexcept { return values_; }

    /// Compensated total, i.e. the monetary base when taken at t = 0.
    double total() const noexcept { return compensated_sum(values_); }

    friend bool operator==(const WealthVector&, const WealthVector&) = default;

private:
    std::vector<double> values_;
};

/// Wealth held in integer minor units (e.g. cents). Used by the exact
/// conservation mode; totals are exact as long as they fit in int64.
class IntegerWealth {
public:
    explicit IntegerWealth(std::vector<std::int64_t> units);

    std::size_t size() const noexcept { return units_.size(); }
    std::int64_t operator[](std::size_t i) const noexcept { return units_[i]; }
    std::span<const std::int64_t> units() const noexcept { return units_; }
    std::int64_t total() const;

    WealthVector to_float() const;

    friend bool operator==(const IntegerWealth&, const IntegerWealth&) = default;

private:
    std::vector<std::int64_t> units_;
};

enum class NumericMode { Float, Integer };

const char* to_string(NumericMode mode) noexcept;

}  // namespace cfm
