#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace levyexit {

// Normalising constant of the symmetric alpha-stable Levy measure
// nu(dz) = c_alpha |z|^(-1-alpha) dz, chosen so that the jump generator has
// Fourier symbol -|xi|^alpha.
struct LevyConstant {
  double alpha;
  double c_alpha;
};

// c(1, alpha) = alpha Gamma((1+alpha)/2) / (2^(1-alpha) sqrt(pi) Gamma(1-alpha/2)).
LevyConstant levy_constant(double alpha);

// Reproducible random source keyed by (seed, stream). Path i of a Monte Carlo
// run always uses stream i, so results do not depend on how paths are split
// across threads.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t stream);

  // Uniform on the open interval (0, 1).
  double uniform_open();
  double gaussian();
  // Standard symmetric alpha-stable S_alpha(1, 0, 0), E exp(iuX) = exp(-|u|^alpha).
  double stable(double alpha);

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
};

// Chambers-Mallows-Stuck transform of V ~ U(-pi/2, pi/2), W ~ Exp(1).
double chambers_mallows_stuck(double alpha, double v, double w);

std::vector<double> sample_alpha_stable(double alpha, std::size_t n, std::uint64_t seed);
std::vector<double> sample_gaussian(std::size_t n, std::uint64_t seed);

}  // namespace levyexit
