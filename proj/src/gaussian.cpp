#include "levyexit/gaussian.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "levyexit/errors.hpp"
#include "levyexit/quadrature.hpp"
#include "levyexit/tridiagonal.hpp"

namespace levyexit::gaussian {

namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;

void require_positive_lambda(double lambda, const char* who) {
  if (!(lambda > 0.0)) throw DomainError(std::string(who) + ": lambda must be positive");
}

void require_subcritical(double lambda, const char* who) {
  require_positive_lambda(lambda, who);
  if (!(lambda < kSqrt2)) {
    throw DomainError(std::string(who) + ": requires lambda < sqrt(2), got " + std::to_string(lambda));
  }
}

}  // namespace

std::vector<double> exact_path(double x0, double lambda, std::span<const double> brownian_increments, double dt) {
  if (!(x0 > 0.0)) throw DomainError("exact_path: x0 must be positive");
  if (!(dt > 0.0)) throw DomainError("exact_path: dt must be positive");
  const double drift = 1.0 - 0.5 * lambda * lambda;
  std::vector<double> path;
  path.reserve(brownian_increments.size() + 1);
  path.push_back(x0);
  // The integral of exp(drift t + lambda B) is exact for B linear on each step.
  double integral = 0.0;
  double prev = 1.0;
  for (double db : brownian_increments) {
    const double z = drift * dt + lambda * db;
    const double ratio = z == 0.0 ? 1.0 : std::expm1(z) / z;
    integral += prev * dt * ratio;
    prev *= std::exp(z);
    path.push_back(x0 * prev / (1.0 + x0 * integral));
  }
  return path;
}

StationaryDensity::StationaryDensity(double lambda) : lambda_(lambda) {
  require_positive_lambda(lambda, "stationary_density");
  if (!(lambda < kSqrt2)) {
    throw ThresholdError("stationary density does not exist for lambda = " + std::to_string(lambda) +
                         ": the normalisation integral is finite if and only if lambda < sqrt(2)");
  }
  rate_ = 2.0 / (lambda * lambda);
  exponent_ = rate_ - 2.0;
  // On (0, 1] substitute x = e^(-u): the integrand becomes exp(-(k+1) u - rate e^(-u)) on [0, inf),
  // smooth for every k > -1.
  const double k1 = exponent_ + 1.0;
  const double rate = rate_;
  const auto near = quad::integrate_to_infinity([=](double u) { return std::exp(-k1 * u - rate * std::exp(-u)); }, 0.0);
  const double k = exponent_;
  const auto far = quad::integrate_to_infinity([=](double x) { return std::exp(k * std::log(x) - rate * x); }, 1.0);
  normalization_ = near.value + far.value;
}

double StationaryDensity::operator()(double x) const {
  if (x < 0.0) return 0.0;
  if (x == 0.0) {
    if (exponent_ > 0.0) return 0.0;
    if (exponent_ == 0.0) return 1.0 / normalization_;
    return std::numeric_limits<double>::infinity();
  }
  return std::exp(exponent_ * std::log(x) - rate_ * x) / normalization_;
}

double StationaryDensity::residual(double x, double step) const {
  const auto flux = [&](double y) { return y * (1.0 - y) * (*this)(y); };
  const auto diff = [&](double y) { return y * y * (*this)(y); };
  const double d_flux = (flux(x + step) - flux(x - step)) / (2.0 * step);
  const double d2_diff = (diff(x + step) - 2.0 * diff(x) + diff(x - step)) / (step * step);
  return -d_flux + 0.5 * lambda_ * lambda_ * d2_diff;
}

StationaryDensity stationary_density(double lambda) { return StationaryDensity(lambda); }

double log_scale_integral(double a, double b, double lambda) {
  require_positive_lambda(lambda, "log_scale_integral");
  if (!(a > 0.0) || !(a <= b)) throw DomainError("log_scale_integral: require 0 < a <= b");
  if (a == b) return -std::numeric_limits<double>::infinity();
  // eta = e^s turns the integrand into exp(G(s)), G(s) = (1 - p) s + p e^s, which is
  // smooth and convex in s, so its maximum on [ln a, ln b] sits at an endpoint.
  const double p = 2.0 / (lambda * lambda);
  const double sa = std::log(a), sb = std::log(b);
  const auto G = [p](double s) { return (1.0 - p) * s + p * std::exp(s); };
  const double shift = std::max(G(sa), G(sb));
  const auto res = quad::integrate([&](double s) { return std::exp(G(s) - shift); }, sa, sb);
  return shift + std::log(res.value);
}

double u2(double x, double L, double lambda) {
  require_positive_lambda(lambda, "u2");
  if (!(x > 0.0) || !(x <= L)) throw DomainError("u2: require 0 < x <= L");
  if (x == L) return 0.0;
  const double log_i = log_scale_integral(x, L, lambda);
  if (!(log_i < std::log(std::numeric_limits<double>::max()))) {
    throw SolverError("u2: integral exceeds the representable range at x = " + std::to_string(x) +
                      " (it diverges as x -> 0 when lambda <= sqrt(2))");
  }
  return -std::exp(log_i);
}

void ExitProblemSpec::validate() const {
  require_positive_lambda(lambda, "ExitProblemSpec");
  if (!(epsilon > 0.0 && epsilon < L)) throw DomainError("ExitProblemSpec: require 0 < epsilon < L");
  if (!(x >= epsilon && x <= L)) throw DomainError("ExitProblemSpec: require epsilon <= x <= L");
}

double exit_prob_left(const ExitProblemSpec& spec) {
  spec.validate();
  if (spec.x == spec.L) return 0.0;
  if (spec.x == spec.epsilon) return 1.0;
  const double p = std::exp(log_scale_integral(spec.x, spec.L, spec.lambda) -
                            log_scale_integral(spec.epsilon, spec.L, spec.lambda));
  return std::min(1.0, std::max(0.0, p));
}

double exit_prob_right(double x, double epsilon, double lambda) {
  require_subcritical(lambda, "exit_prob_right");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw DomainError("exit_prob_right: require 0 < epsilon < 1");
  if (!(x >= epsilon && x <= 1.0)) throw DomainError("exit_prob_right: require epsilon <= x <= 1");
  if (x == 1.0) return 1.0;
  if (x == epsilon) return 0.0;
  const double ratio = std::exp(log_scale_integral(x, 1.0, lambda) - log_scale_integral(epsilon, 1.0, lambda));
  return std::min(1.0, std::max(0.0, 1.0 - ratio));
}

double SeriesSolution::operator()(double x) const {
  if (!(x > 0.0 && x <= 1.0)) throw DomainError("met series: require 0 < x <= 1");
  double poly = 0.0;
  for (std::size_t n = coefficients.size() - 1; n >= 1; --n) poly = (poly + coefficients[n]) * x;
  return -(coefficients[0] * std::log(x) + poly);
}

SeriesSolution met_series(double lambda, double tol, std::size_t max_terms) {
  require_subcritical(lambda, "met_series");
  const double l2 = lambda * lambda;
  SeriesSolution s;
  s.lambda = lambda;
  s.tolerance = tol;
  const double a0 = 1.0 / (1.0 - 0.5 * l2);
  s.coefficients = {a0, a0};
  double a = a0;
  for (std::size_t n = 1; std::abs(a) >= tol; ++n) {
    if (n >= max_terms) {
      throw SolverError("met_series: no convergence within " + std::to_string(max_terms) + " terms");
    }
    const double dn = static_cast<double>(n);
    a = dn * a / ((dn + 1.0) * (1.0 + 0.5 * l2 * dn));
    s.coefficients.push_back(a);
  }
  return s;
}

double met_series_Y(double x, double lambda, double tol) { return met_series(lambda, tol)(x); }

double met_gaussian(double x, double lambda) {
  const SeriesSolution y = met_series(lambda);
  return y(x) - y(1.0);
}

double met_gaussian_finite(double x, double epsilon, double lambda) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw DomainError("met_gaussian_finite: require 0 < epsilon < 1");
  if (!(x >= epsilon && x <= 1.0)) throw DomainError("met_gaussian_finite: require epsilon <= x <= 1");
  const SeriesSolution y = met_series(lambda);
  if (x == 1.0) return 0.0;
  const double ratio = std::exp(log_scale_integral(x, 1.0, lambda) - log_scale_integral(epsilon, 1.0, lambda));
  return y(x) - y(1.0) + (y(1.0) - y(epsilon)) * ratio;
}

ScalarField met_two_sided(double epsilon, double L, double lambda, std::size_t n_points) {
  require_positive_lambda(lambda, "met_two_sided");
  if (!(epsilon > 0.0 && epsilon < L)) throw DomainError("met_two_sided: require 0 < epsilon < L");
  if (n_points < 3) throw DomainError("met_two_sided: need at least 3 grid points");

  const std::size_t m = n_points - 2;
  const double s0 = std::log(epsilon);
  const double ds = (std::log(L) - s0) / static_cast<double>(n_points - 1);
  const double diffusion = 0.5 * lambda * lambda / (ds * ds);

  std::vector<double> lower(m), diag(m), upper(m), rhs(m, -1.0);
  for (std::size_t j = 0; j < m; ++j) {
    const double s = s0 + static_cast<double>(j + 1) * ds;
    const double advection = (1.0 - 0.5 * lambda * lambda - std::exp(s)) / (2.0 * ds);
    lower[j] = diffusion - advection;
    diag[j] = -2.0 * diffusion;
    upper[j] = diffusion + advection;
  }
  lower[0] = 0.0;
  upper[m - 1] = 0.0;
  const std::vector<double> interior = solve_tridiagonal(lower, diag, upper, rhs);

  ScalarField field;
  field.nodes.resize(n_points);
  field.values.assign(n_points, 0.0);
  for (std::size_t j = 0; j < n_points; ++j) field.nodes[j] = std::exp(s0 + static_cast<double>(j) * ds);
  field.nodes.front() = epsilon;
  field.nodes.back() = L;
  for (std::size_t j = 0; j < m; ++j) field.values[j + 1] = interior[j];
  return field;
}

ScalarField met_bvp_solve(double epsilon, double lambda, std::size_t n_points) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw DomainError("met_bvp_solve: require 0 < epsilon < 1");
  return met_two_sided(epsilon, 1.0, lambda, n_points);
}

}  // namespace levyexit::gaussian
