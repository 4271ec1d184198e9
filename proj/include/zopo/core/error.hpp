#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace zopo {

// Base of every error thrown by the library. Configuration-type errors derive
// from ConfigError so front ends can map them to a distinct exit status.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class InvalidInput : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class DegenerateWeights : public Error {
 public:
  DegenerateWeights() : Error("all importance weights are zero (every log-weight is -inf)") {}
  using Error::Error;
};

class QuadratureNotConverged : public Error {
 public:
  QuadratureNotConverged(double estimate, double error_estimate, std::size_t levels)
      : Error("quadrature did not reach tolerance: estimate " + std::to_string(estimate) +
              ", error estimate " + std::to_string(error_estimate) + ", refinement levels " +
              std::to_string(levels)),
        estimate_(estimate),
        error_estimate_(error_estimate),
        levels_(levels) {}

  double estimate() const { return estimate_; }
  double error_estimate() const { return error_estimate_; }
  std::size_t levels() const { return levels_; }

 private:
  double estimate_;
  double error_estimate_;
  std::size_t levels_;
};

class BracketFailure : public Error {
 public:
  using Error::Error;
};

class NoOracle : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class InvalidSchedule : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class LambdaTooLarge : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class InvalidRadius : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class InvalidEpsilon : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

}  // namespace zopo
