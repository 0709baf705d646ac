#pragma once

#include <span>
#include <vector>

namespace levyexit {

// Thomas algorithm for a tridiagonal system of size n. lower[0] and upper[n-1]
// are ignored. Throws SolverError on a (numerically) zero pivot.
std::vector<double> solve_tridiagonal(std::span<const double> lower, std::span<const double> diag,
                                      std::span<const double> upper, std::span<const double> rhs);

}  // namespace levyexit
