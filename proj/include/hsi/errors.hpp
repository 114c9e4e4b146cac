#pragma once

#include <stdexcept>
#include <string>

namespace hsi {

// Invalid or inconsistent input data (dimension mismatch, non-finite values,
// labels out of range, malformed headers).
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// File-level failures: missing file, bad magic, truncated payload.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

// Numerical solver failures: infeasible problem, non-convergence past cap.
class SolverError : public std::runtime_error {
 public:
  explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

// Bad command-line or config-file input.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace hsi
