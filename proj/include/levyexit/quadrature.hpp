#pragma once

#include <functional>

namespace levyexit::quad {

struct Result {
  double value;
  double error_estimate;
};

// Adaptive 31-point Gauss-Kronrod on a finite interval.
Result integrate(const std::function<double(double)>& f, double a, double b, double rel_tol = 1e-13);

// Double-exponential rule on [a, infinity).
Result integrate_to_infinity(const std::function<double(double)>& f, double a, double rel_tol = 1e-13);

}  // namespace levyexit::quad
