#include "cfm/wealth.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace cfm {

double compensated_sum(std::span<const double> values) noexcept {
    CompensatedSum acc;
    for (double v : values) acc.add(v);
    return acc.value();
}

WealthVector::WealthVector(std::vector<double> values) : values_(std::move(values)) {
    if (values_.empty()) throw std::invalid_argument("wealth vector needs at least one agent");
    for (std::size_t i = 0; i < values_.size(); ++i) {
        const double v = values_[i];
        if (!std::isfinite(v) || v < 0.0)
            throw std::invalid_argument("wealth of agent " + std::to_string(i + 1) +
                                        " must be finite and non-negative");
    }
    if (!std::isfinite(total())) throw std::invalid_argument("wealth total overflows");
}

IntegerWealth::IntegerWealth(std::vector<std::int64_t> units) : units_(std::move(units)) {
    if (units_.empty()) throw std::invalid_argument("wealth vector needs at least one agent");
    for (std::size_t i = 0; i < units_.size(); ++i)
        if (units_[i] < 0)
            throw std::invalid_argument("wealth of agent " + std::to_string(i + 1) +
                                        " must be non-negative");
    (void)total();
}

std::int64_t IntegerWealth::total() const {
    std::int64_t sum = 0;
    for (std::int64_t u : units_) {
        if (u > std::numeric_limits<std::int64_t>::max() - sum)
            throw std::overflow_error("integer wealth total overflows int64");
        sum += u;
    }
    return sum;
}

WealthVector IntegerWealth::to_float() const {
    return WealthVector(std::vector<double>(units_.begin(), units_.end()));
}

const char* to_string(NumericMode mode) noexcept {
    return mode == NumericMode::Float ? "float" : "integer";
}

}  // namespace cfm
