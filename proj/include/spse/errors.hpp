#pragma once

#include <stdexcept>
#include <string>

namespace spse {

/// Bad user input: malformed config, missing keys, out-of-range parameters.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// A field, grid or argument violates a documented precondition.
struct InvalidInput : std::runtime_error {
    explicit InvalidInput(const std::string& what) : std::runtime_error(what) {}
};

/// An iterative solve failed to converge.
struct SolverError : std::runtime_error {
    explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace spse
