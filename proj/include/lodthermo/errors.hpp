#pragma once

#include <stdexcept>
#include <string>

namespace lodthermo {

/// Invalid user input (config files, flags, rasters); CLI exit code 2.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Numerical failure (singular factorization, non-finite state); CLI exit code 3.
struct SolverError : std::runtime_error {
    explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace lodthermo
