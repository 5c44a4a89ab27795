#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace iotprice {

// Thrown by fit_quality_curve when the sample set cannot pin down three
// parameters (fewer than three distinct data sizes).
struct UnderdeterminedFit : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Thrown by bundle::optimize when no pricing regime admits a solution.
struct InfeasibleMarket : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed CSV input; line is 1-based.
struct ParseError : std::runtime_error {
    ParseError(std::size_t line_, const std::string& what_)
        : std::runtime_error("line " + std::to_string(line_) + ": " + what_), line(line_) {}
    std::size_t line;
};

// Invalid or inconsistent market configuration.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace iotprice
