#pragma once

#include <cstddef>
#include <vector>

namespace levyexit {

// Uniform interior discretisation of D = (r1, r2). Nodes are
// x_i = r1 + i h for i = 1..n; the boundary points belong to the exterior.
class Grid1D {
 public:
  Grid1D(double r1, double r2, std::size_t n);

  double r1() const { return r1_; }
  double r2() const { return r2_; }
  std::size_t size() const { return n_; }
  double spacing() const { return h_; }

  // i is 1-based: node(0) == r1 and node(n + 1) == r2.
  double node(std::size_t i) const { return r1_ + static_cast<double>(i) * h_; }
  std::vector<double> interior_nodes() const;

  // Grid with spacing h/2 on the same domain: its odd nodes are this grid's nodes.
  Grid1D refined() const { return Grid1D(r1_, r2_, 2 * n_ + 1); }

  bool operator==(const Grid1D&) const = default;

 private:
  double r1_, r2_;
  std::size_t n_;
  double h_;
};

// Values of u(x), p_E(x) or p(x, t) at a set of nodes together with the
// Dirichlet-type data prescribed outside the domain.
struct ScalarField {
  std::vector<double> nodes;
  std::vector<double> values;
  double exterior_left = 0.0;
  double exterior_right = 0.0;

  std::size_t size() const { return values.size(); }
  // Piecewise-linear interpolation; outside the node range the exterior value is used.
  double at(double x) const;
  double max_value() const;
};

}  // namespace levyexit
