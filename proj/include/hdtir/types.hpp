#pragma once

#include <Eigen/Core>

#include <stdexcept>
#include <string>

namespace hdtir {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

// Bad tuning values, malformed CLI/config input.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed or unusable data (parse failures, empty tails, size mismatches).
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical breakdown: link overflow, divergence, infeasible projections.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace hdtir
