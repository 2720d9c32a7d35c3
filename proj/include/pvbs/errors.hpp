#pragma once

#include <stdexcept>
#include <string>

namespace pvbs {

// Error taxonomy mirrors the CLI exit codes: validation -> 2,
// non-convergence -> 3, internal consistency -> 4.
struct ValidationError : std::runtime_error {
  explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

struct ConvergenceError : std::runtime_error {
  explicit ConvergenceError(const std::string& msg) : std::runtime_error(msg) {}
};

struct ConsistencyError : std::runtime_error {
  explicit ConsistencyError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace pvbs
