#include "levyexit/field.hpp"

#include <algorithm>

#include "levyexit/errors.hpp"

namespace levyexit {

Grid1D::Grid1D(double r1, double r2, std::size_t n) : r1_(r1), r2_(r2), n_(n), h_((r2 - r1) / static_cast<double>(n + 1)) {
  if (!(r1 < r2)) throw DomainError("Grid1D: require r1 < r2");
  if (n < 8) throw DomainError("Grid1D: need at least 8 interior nodes");
}

std::vector<double> Grid1D::interior_nodes() const {
  std::vector<double> x(n_);
  for (std::size_t i = 0; i < n_; ++i) x[i] = node(i + 1);
  return x;
}

double ScalarField::at(double x) const {
  if (nodes.empty()) return exterior_left;
  if (x < nodes.front()) return exterior_left;
  if (x > nodes.back()) return exterior_right;
  const auto it = std::upper_bound(nodes.begin(), nodes.end(), x);
  if (it == nodes.end()) return values.back();
  const std::size_t j = static_cast<std::size_t>(it - nodes.begin());
  const double t = (x - nodes[j - 1]) / (nodes[j] - nodes[j - 1]);
  return (1.0 - t) * values[j - 1] + t * values[j];
}

double ScalarField::max_value() const {
  return values.empty() ? 0.0 : *std::max_element(values.begin(), values.end());
}

}  // namespace levyexit
