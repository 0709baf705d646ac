#pragma once

// Closed-form, series and boundary-value computations for the dimensionless
// Gaussian logistic model dX = X(1 - X) dt + lambda X dB.

#include <cstddef>
#include <span>
#include <vector>

#include "levyexit/field.hpp"

namespace levyexit::gaussian {

// Strong solution along a sampled Brownian path. brownian_increments holds
// B(t_{k+1}) - B(t_k); the returned vector has one more entry than the
// increments (the first entry is x0). The time integral in the denominator
// is integrated exactly with B interpolated linearly between samples.
std::vector<double> exact_path(double x0, double lambda, std::span<const double> brownian_increments, double dt);

// Normalised stationary density
//   q(x) = x^(2/lambda^2 - 2) exp(-2x/lambda^2) / N(lambda),
// which exists only for 0 < lambda < sqrt(2).
class StationaryDensity {
 public:
  explicit StationaryDensity(double lambda);

  double lambda() const { return lambda_; }
  double exponent() const { return exponent_; }
  double normalization() const { return normalization_; }

  double operator()(double x) const;
  // Left-hand side of the stationary Fokker-Planck equation,
  // -(x(1-x) q)' + (lambda^2/2)(x^2 q)'', by central differences with the given step.
  double residual(double x, double step) const;

 private:
  double lambda_;
  double exponent_;  // 2/lambda^2 - 2
  double rate_;      // 2/lambda^2
  double normalization_;
};

StationaryDensity stationary_density(double lambda);

// log of  int_a^b eta^(-2/lambda^2) exp(2 eta/lambda^2) d eta,  0 < a <= b.
double log_scale_integral(double a, double b, double lambda);

// Non-constant fundamental solution u2(x; L) = -int_x^L eta^(-2/lambda^2) exp(2 eta/lambda^2) d eta.
double u2(double x, double L, double lambda);

struct ExitProblemSpec {
  double epsilon;
  double L;
  double lambda;
  double x;

  void validate() const;
};

// Probability of reaching epsilon before L, starting from x.
double exit_prob_left(const ExitProblemSpec& spec);

// Probability of reaching 1 before epsilon, starting from x (requires lambda < sqrt(2)).
double exit_prob_right(double x, double epsilon, double lambda);

// Particular solution of (lambda^2 x^2/2) Y'' + x(1-x) Y' = -1:
//   Y(x) = -(a_0 ln x + sum_{n>=1} a_n x^n),
//   a_0 = a_1 = 1/(1 - lambda^2/2),  a_{n+1} = n a_n / ((n+1)(1 + lambda^2 n/2)).
struct SeriesSolution {
  double lambda = 0.0;
  std::vector<double> coefficients;  // a_0, a_1, ..., a_N
  double tolerance = 0.0;

  std::size_t order() const { return coefficients.empty() ? 0 : coefficients.size() - 1; }
  double log_coefficient() const { return coefficients.front(); }
  // Valid for 0 < x <= 1.
  double operator()(double x) const;
};

inline constexpr double kSeriesTolerance = 1e-12;
inline constexpr std::size_t kSeriesTermCap = 100000;

// Coefficients are generated until |a_n| < tol, which bounds |a_n x^n| on (0, 1].
SeriesSolution met_series(double lambda, double tol = kSeriesTolerance, std::size_t max_terms = kSeriesTermCap);
double met_series_Y(double x, double lambda, double tol = kSeriesTolerance);

// Expected time to reach 1 from x on D = (0, 1): u(x) = Y(x) - Y(1).
double met_gaussian(double x, double lambda);

// Same quantity on (epsilon, 1) with u(epsilon) = 0:
//   Y(x) - Y(1) + [Y(1) - Y(epsilon)] u2(x)/u2(epsilon).
double met_gaussian_finite(double x, double epsilon, double lambda);

// Second-order central differences on a grid that is uniform in s = ln x, for
// (lambda^2 x^2/2) u'' + x(1-x) u' = -1 on (epsilon, L), u(epsilon) = u(L) = 0.
// n_points counts both boundary nodes.
ScalarField met_two_sided(double epsilon, double L, double lambda, std::size_t n_points);
ScalarField met_bvp_solve(double epsilon, double lambda, std::size_t n_points);

inline constexpr double kDefaultEpsilon = 1e-3;

}  // namespace levyexit::gaussian
