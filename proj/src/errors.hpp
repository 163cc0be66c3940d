#pragma once

#include <stdexcept>
#include <string>

namespace spinmu {

// Invalid specifications, malformed files, out-of-range arguments.
// Maps to CLI exit code 2.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Singular resolvents, non-Hermitian inputs, solver breakdown.
// Maps to CLI exit code 3.
struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace spinmu
