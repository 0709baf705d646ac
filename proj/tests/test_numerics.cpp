#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "levyexit/errors.hpp"
#include "levyexit/field.hpp"
#include "levyexit/quadrature.hpp"
#include "levyexit/tridiagonal.hpp"

using namespace levyexit;

TEST_CASE("finite and semi-infinite quadrature") {
  CHECK(quad::integrate([](double x) { return std::sin(x); }, 0.0, std::numbers::pi).value == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(quad::integrate([](double x) { return x; }, 1.0, 1.0).value == 0.0);
  CHECK(quad::integrate_to_infinity([](double x) { return std::exp(-x); }, 0.0).value == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(quad::integrate_to_infinity([](double x) { return 1.0 / (x * x); }, 2.0).value == doctest::Approx(0.5).epsilon(1e-10));
  CHECK_THROWS_AS(quad::integrate([](double) { return std::nan(""); }, 0.0, 1.0), SolverError);
}

TEST_CASE("tridiagonal solve reproduces a known solution") {
  const std::size_t n = 50;
  std::vector<double> lo(n, -1.0), di(n, 4.0), up(n, -1.5), x(n), rhs(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = std::sin(0.1 * static_cast<double>(i));
  for (std::size_t i = 0; i < n; ++i) {
    rhs[i] = di[i] * x[i] + (i > 0 ? lo[i] * x[i - 1] : 0.0) + (i + 1 < n ? up[i] * x[i + 1] : 0.0);
  }
  const auto sol = solve_tridiagonal(lo, di, up, rhs);
  for (std::size_t i = 0; i < n; ++i) CHECK(sol[i] == doctest::Approx(x[i]).epsilon(1e-12));
}

TEST_CASE("tridiagonal solve reports zero pivots") {
  std::vector<double> lo{0.0, 1.0}, di{0.0, 1.0}, up{1.0, 0.0}, rhs{1.0, 1.0};
  CHECK_THROWS_AS(solve_tridiagonal(lo, di, up, rhs), SolverError);
}

TEST_CASE("grid geometry") {
  const Grid1D g(0.0, 1.0, 9);
  CHECK(g.spacing() == doctest::Approx(0.1));
  CHECK(g.node(0) == 0.0);
  CHECK(g.node(10) == doctest::Approx(1.0));
  CHECK(g.interior_nodes().size() == 9);
  const Grid1D f = g.refined();
  CHECK(f.size() == 19);
  CHECK(f.spacing() == doctest::Approx(0.05));
  for (std::size_t i = 1; i <= 9; ++i) CHECK(f.node(2 * i) == doctest::Approx(g.node(i)));
  CHECK(g == Grid1D(0.0, 1.0, 9));
  CHECK_THROWS_AS(Grid1D(1.0, 0.0, 10), DomainError);
  CHECK_THROWS_AS(Grid1D(0.0, 1.0, 7), DomainError);
}

TEST_CASE("field interpolation uses exterior data outside the nodes") {
  ScalarField f;
  f.nodes = {0.25, 0.5, 0.75};
  f.values = {1.0, 2.0, 4.0};
  f.exterior_left = -1.0;
  f.exterior_right = 7.0;
  CHECK(f.at(0.5) == 2.0);
  CHECK(f.at(0.625) == doctest::Approx(3.0));
  CHECK(f.at(0.75) == 4.0);
  CHECK(f.at(0.1) == -1.0);
  CHECK(f.at(0.9) == 7.0);
  CHECK(f.max_value() == 4.0);
  CHECK(f.size() == 3);
}
