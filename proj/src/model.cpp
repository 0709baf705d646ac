#include "levyexit/model.hpp"

#include <cmath>
#include <string>

#include "levyexit/errors.hpp"

namespace levyexit {

void ModelParams::validate() const {
  if (!(r > 0.0)) throw DomainError("growth rate r must be positive, got " + std::to_string(r));
  if (!(K > 0.0)) throw DomainError("carrying capacity K must be positive, got " + std::to_string(K));
  if (!(lambda >= 0.0)) throw DomainError("lambda must be non-negative");
  if (!(sigma >= 0.0)) throw DomainError("sigma must be non-negative");
  if (sigma > 0.0 && !(alpha > 0.0 && alpha < 2.0)) {
    throw DomainError("alpha must lie in (0, 2) when sigma > 0, got " + std::to_string(alpha));
  }
}

ScaledModel nondimensionalize(const ModelParams& params) {
  params.validate();
  ScaledModel out;
  out.params = params;
  out.params.K = 1.0;
  out.population_scale = params.K;
  if (!params.has_levy_noise()) {
    out.params.r = 1.0;
    out.params.lambda = params.lambda / std::sqrt(params.r);
    out.time_scale = params.r;
  }
  return out;
}

double deterministic_solution(double x0, double t, double r, double K) {
  if (!(x0 >= 0.0)) throw DomainError("deterministic_solution: x0 must be >= 0");
  if (!(t >= 0.0)) throw DomainError("deterministic_solution: t must be >= 0");
  if (x0 == 0.0) return 0.0;
  return x0 * K / (x0 + (K - x0) * std::exp(-r * t));
}

double potential(double x, double r, double K) {
  return -0.5 * r * x * x + r * x * x * x / (3.0 * K);
}

}  // namespace levyexit
