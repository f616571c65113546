#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace xicor {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// All values on one axis are equal, so the rank denominator vanishes.
struct ConstantInputError : Error {
    explicit ConstantInputError(char which)
        : Error(std::string("constant ") + which + " values: statistic undefined"), axis(which) {}
    char axis;  // 'x' or 'y'
};

struct SampleTooSmallError : Error {
    explicit SampleTooSmallError(std::size_t got)
        : Error("sample size must be at least 2, got " + std::to_string(got)), n(got) {}
    std::size_t n;
};

struct DomainError : Error {
    using Error::Error;
};

/// Variance estimate too close to zero to divide by.
struct VarianceDegenerateError : Error {
    using Error::Error;
};

struct ParseError : Error {
    ParseError(const std::string& msg, std::size_t line_no)
        : Error(msg + " (line " + std::to_string(line_no) + ")"), line(line_no) {}
    std::size_t line;  // 1-based
};

}  // namespace xicor
