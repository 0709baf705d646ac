#pragma once

namespace levyexit {

// Parameters of the stochastic logistic equation
//
//   dX = r X (1 - X/K) dt + lambda X dB + sigma X dL^alpha.
//
// lambda drives the Brownian channel, sigma the symmetric alpha-stable one.
// Either channel may be switched off by setting its intensity to zero.
struct ModelParams {
  double r = 1.0;
  double K = 1.0;
  double lambda = 0.0;
  double sigma = 0.0;
  double alpha = 1.0;

  bool has_gaussian_noise() const { return lambda > 0.0; }
  bool has_levy_noise() const { return sigma > 0.0; }

  // Throws DomainError when an invariant is violated.
  void validate() const;

  bool operator==(const ModelParams&) const = default;
};

// Parameters expressed in dimensionless units plus the factors needed to map
// results back. Physical time = scaled time / time_scale, physical
// population = scaled population * population_scale.
struct ScaledModel {
  ModelParams params;
  double time_scale = 1.0;
  double population_scale = 1.0;

  double to_physical_time(double scaled_t) const { return scaled_t / time_scale; }
  double to_scaled_population(double x) const { return x / population_scale; }
};

// Gaussian-only models are scaled with t = r t~, X = X~/K, lambda = lambda~/sqrt(r)
// so that r' = K' = 1. Models carrying Levy noise only rescale the population
// (K' = 1) and keep r as the drift coefficient.
ScaledModel nondimensionalize(const ModelParams& params);

// Closed-form solution of the deterministic logistic equation.
double deterministic_solution(double x0, double t, double r, double K);

// U(x) = -r x^2 / 2 + r x^3 / (3K), so that dx/dt = -U'(x).
double potential(double x, double r, double K);

}  // namespace levyexit
