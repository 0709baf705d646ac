#include "levyexit/stable.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "levyexit/errors.hpp"

namespace levyexit {

namespace {

void require_alpha(double alpha, const char* who) {
  if (!(alpha > 0.0 && alpha < 2.0)) {
    throw DomainError(std::string(who) + ": alpha must lie in (0, 2), got " + std::to_string(alpha));
  }
}

}  // namespace

LevyConstant levy_constant(double alpha) {
  require_alpha(alpha, "levy_constant");
  const double num = alpha * std::tgamma(0.5 * (1.0 + alpha));
  const double den = std::pow(2.0, 1.0 - alpha) * std::sqrt(std::numbers::pi) * std::tgamma(1.0 - 0.5 * alpha);
  return {alpha, num / den};
}

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                    0x6c657679u};
  engine_.seed(seq);
}

double RandomStream::uniform_open() {
  // 53 random bits mapped to the cell midpoints (k + 1/2) 2^-53, never 0 or 1.
  const std::uint64_t k = engine_() >> 11;
  return (static_cast<double>(k) + 0.5) * 0x1.0p-53;
}

double RandomStream::gaussian() { return normal_(engine_); }

double RandomStream::stable(double alpha) {
  const double v = std::numbers::pi * (uniform_open() - 0.5);
  const double w = -std::log(uniform_open());
  return chambers_mallows_stuck(alpha, v, w);
}

double chambers_mallows_stuck(double alpha, double v, double w) {
  if (alpha == 1.0) return std::tan(v);
  const double a = std::sin(alpha * v) / std::pow(std::cos(v), 1.0 / alpha);
  const double b = std::pow(std::cos((1.0 - alpha) * v) / w, (1.0 - alpha) / alpha);
  return a * b;
}

std::vector<double> sample_alpha_stable(double alpha, std::size_t n, std::uint64_t seed) {
  require_alpha(alpha, "sample_alpha_stable");
  RandomStream rs(seed, 0);
  std::vector<double> out(n);
  for (auto& x : out) x = rs.stable(alpha);
  return out;
}

std::vector<double> sample_gaussian(std::size_t n, std::uint64_t seed) {
  RandomStream rs(seed, 0);
  std::vector<double> out(n);
  for (auto& x : out) x = rs.gaussian();
  return out;
}

}  // namespace levyexit
