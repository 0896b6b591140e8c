#pragma once

#include <stdexcept>
#include <string>

namespace cfm {

/// Sizes of two operands disagree (matrix vs. vector, factors in a product, ...).
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A circulation matrix failed column-stochastic validation.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed text input. Carries the 1-based line number when known.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t line)
        : std::runtime_error(line ? what + " at line " + std::to_string(line) : what), line_(line) {}
    explicit ParseError(const std::string& what) : ParseError(what, 0) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Configuration schema violation; `field()` is the dotted path of the offending field.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field, const std::string& what)
        : std::runtime_error(field.empty() ? what : "config field '" + field + "': " + what),
          field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// A dense/reference path was asked to work beyond its size guardrail.
class GuardrailError : public std::length_error {
public:
    using std::length_error::length_error;
};

/// A schedule ran out of matrices before the requested number of steps.
class ScheduleExhausted : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

}  // namespace cfm
