#include "levyexit/tridiagonal.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "levyexit/errors.hpp"

namespace levyexit {

std::vector<double> solve_tridiagonal(std::span<const double> lower, std::span<const double> diag,
                                      std::span<const double> upper, std::span<const double> rhs) {
  const std::size_t n = diag.size();
  if (lower.size() != n || upper.size() != n || rhs.size() != n) {
    throw DomainError("solve_tridiagonal: band and rhs sizes differ");
  }
  std::vector<double> c(n), d(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double pivot = diag[i] - (i > 0 ? lower[i] * c[i - 1] : 0.0);
    const double scale = std::abs(diag[i]) + std::abs(lower[i]) + std::abs(upper[i]);
    if (std::abs(pivot) <= 64.0 * std::numeric_limits<double>::epsilon() * scale) {
      throw SolverError("tridiagonal factorization hit a zero pivot at row " + std::to_string(i));
    }
    c[i] = upper[i] / pivot;
    d[i] = (rhs[i] - (i > 0 ? lower[i] * d[i - 1] : 0.0)) / pivot;
  }
  for (std::size_t i = n - 1; i-- > 0;) d[i] -= c[i] * d[i + 1];
  return d;
}

}  // namespace levyexit
