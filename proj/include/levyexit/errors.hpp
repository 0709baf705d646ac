#pragma once

#include <stdexcept>
#include <string>

namespace levyexit {

// Argument outside the mathematical domain of an operation (alpha not in
// (0, 2), negative rates, start point outside the exit domain, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// An analytic quantity does not exist for the requested parameters, e.g. the
// stationary density for lambda >= sqrt(2).
class ThresholdError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Numerical failure: singular systems, series or quadrature that does not
// converge, all Monte Carlo paths censored.
class SolverError : public std::runtime_error {
 public:
  explicit SolverError(const std::string& what, double condition_estimate = 0.0)
      : std::runtime_error(what), condition_estimate_(condition_estimate) {}

  double condition_estimate() const noexcept { return condition_estimate_; }

 private:
  double condition_estimate_;
};

// Invalid or inconsistent run configuration (CLI layer).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace levyexit
