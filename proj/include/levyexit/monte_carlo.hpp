#pragma once

// Euler-Maruyama simulation of the logistic SDE with Brownian and
// alpha-stable noise, used as an independent check on the PDE solvers.

#include <cstddef>
#include <cstdint>

#include "levyexit/field.hpp"
#include "levyexit/model.hpp"

namespace levyexit::mc {

// dX = r X (1 - X/K) dt + lambda g(X) dB + sigma g(X) dL^alpha, where
// g(x) = x (multiplicative noise) or g(x) = 1 (additive noise).
struct SdeModel {
  double r = 1.0;
  double K = 1.0;
  double lambda = 0.0;
  double sigma = 0.0;
  double alpha = 1.0;
  bool multiplicative = true;

  static SdeModel from_params(const ModelParams& params);
  // Zero drift, additive alpha-stable noise of the given intensity.
  static SdeModel drift_free(double alpha, double intensity = 1.0);

  void validate() const;
};

struct MCConfig {
  std::size_t n_paths = 100000;
  double dt = 1e-3;
  double t_max = 1e3;
  std::uint64_t seed = 1;
  double r1 = 0.0;
  double r2 = 1.0;
  unsigned threads = 1;

  void validate() const;
  bool operator==(const MCConfig&) const = default;
};

struct MCEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t n_effective = 0;  // paths that exited before t_max
  std::size_t censored = 0;     // paths still inside at t_max
  bool censoring_warning = false;
  double ci_low = 0.0;  // mean -/+ 1.96 std_error
  double ci_high = 0.0;
};

struct ExitEstimate {
  MCEstimate met;
  MCEstimate ep_left;   // exit landing in (-inf, r1]
  MCEstimate ep_right;  // exit landing in [r2, inf)
};

// One Euler-Maruyama step with standard increments dB ~ N(0, 1) and
// dL ~ S_alpha(1, 0, 0); they are scaled by sqrt(dt) and dt^(1/alpha).
double simulate_step(double x, const ModelParams& params, double dt, double dB, double dL);
double simulate_step(double x, const SdeModel& model, double dt, double dB, double dL);

// Exit time and exit side from the same set of paths. Path i draws from
// RandomStream(seed, i), so results do not depend on config.threads.
ExitEstimate estimate_exit(const SdeModel& model, double x0, const MCConfig& config);
MCEstimate estimate_met(const ModelParams& params, double x0, const MCConfig& config);
MCEstimate estimate_ep(const ModelParams& params, double x0, const MCConfig& config);

// Histogram of positions at time t of the paths that stay in (r1, r2) up to t.
// Starting points are drawn from the normal bump N(x0, 1/80) used by the
// forward solver; starting points outside the domain count as exited. Bin
// values are normalised so that their integral equals the surviving fraction.
ScalarField empirical_density(const SdeModel& model, double x0, double t, const MCConfig& config, std::size_t bins);
ScalarField empirical_density(const ModelParams& params, double x0, double t, const MCConfig& config,
                              std::size_t bins);

}  // namespace levyexit::mc
