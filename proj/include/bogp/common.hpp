#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace bogp {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

// Bad or inconsistent configuration (unknown key, out-of-range value, ...).
class ConfigError : public std::runtime_error {
public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// A computation produced values it cannot vouch for (NaN objective,
// negative variance beyond tolerance, ...).
class NumericError : public std::runtime_error {
public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

// Cholesky breakdown that jitter escalation could not repair.
class SingularModelError : public NumericError {
public:
  SingularModelError(const std::string& what, Index pivot)
      : NumericError(what + " (pivot index " + std::to_string(pivot) + ")"),
        pivot_index(pivot) {}
  Index pivot_index;
};

// Operation whose defining quantity does not exist for the given state,
// e.g. noise weights with sigma = 0.
class UnsupportedError : public std::logic_error {
public:
  explicit UnsupportedError(const std::string& what) : std::logic_error(what) {}
};

}  // namespace bogp
