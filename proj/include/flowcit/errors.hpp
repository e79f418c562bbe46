#pragma once

#include <stdexcept>
#include <string>

namespace flowcit {

// Error categories, mirrored by the C API status codes and the CLI exit codes.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed or inconsistent input data (CSV parse failures, NaN in data, ...).
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical failure at runtime (non-finite ODE state, degenerate kernel, ...).
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace flowcit
