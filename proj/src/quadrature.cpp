#include "levyexit/quadrature.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>

#include "levyexit/errors.hpp"

namespace levyexit::quad {

Result integrate(const std::function<double(double)>& f, double a, double b, double rel_tol) {
  if (a == b) return {0.0, 0.0};
  double err = 0.0;
  const double v = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 20, rel_tol, &err);
  if (!std::isfinite(v)) throw SolverError("quadrature produced a non-finite value");
  return {v, err};
}

Result integrate_to_infinity(const std::function<double(double)>& f, double a, double rel_tol) {
  boost::math::quadrature::exp_sinh<double> rule;
  double err = 0.0;
  const double v = rule.integrate(f, a, std::numeric_limits<double>::infinity(), rel_tol, &err);
  if (!std::isfinite(v)) throw SolverError("quadrature produced a non-finite value");
  return {v, err};
}

}  // namespace levyexit::quad
