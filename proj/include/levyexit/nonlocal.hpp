#pragma once

// Finite-difference discretisation of the generator of
//   dX = f(X) dt + g(X) dL^alpha
// on a bounded interval, with solvers for the mean exit time, the escape
// probability and the forward (Fokker-Planck) equation.

#include <cstddef>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "levyexit/field.hpp"
#include "levyexit/model.hpp"

namespace levyexit::nonlocal {

enum class DriftScheme {
  Central,
  Upwind,
  // Central where the neighbouring jump weights dominate the drift (the row
  // stays an M-matrix row), first-order upwind elsewhere.
  Hybrid,
};

// Coefficients of a pure-jump equation: drift f(x) and jump intensity g(x).
struct JumpModel {
  double alpha = 1.0;
  std::function<double(double)> drift;
  std::function<double(double)> intensity;

  // f(x) = r x (1 - x/K), g(x) = sigma x. Requires lambda = 0, sigma > 0.
  static JumpModel logistic(const ModelParams& params);
  // f = 0, g = constant: the generator becomes -c (-Laplacian)^(alpha/2).
  static JumpModel drift_free(double alpha, double intensity = 1.0);

  void validate() const;
};

// Generator restricted to the interior nodes. Interior-exterior couplings are
// kept apart so that Dirichlet data outside D become a right-hand side:
//   (A u)_i = sum_j M_ij u_j + left_i u(r1-) + right_i u(r2+).
struct GeneratorMatrix {
  explicit GeneratorMatrix(const Grid1D& g) : grid(g) {}

  Grid1D grid;
  double alpha = 1.0;
  double sigma = 0.0;
  double r = 0.0;
  DriftScheme scheme = DriftScheme::Hybrid;

  Eigen::MatrixXd jump;   // nonlocal part, including the killing diagonal
  Eigen::MatrixXd drift;  // tridiagonal drift part
  Eigen::VectorXd exterior_left;
  Eigen::VectorXd exterior_right;

  std::size_t size() const { return grid.size(); }
  Eigen::MatrixXd combined() const { return jump + drift; }
  // Contribution of constant exterior data moved to the right-hand side.
  Eigen::VectorXd exterior_rhs(double left_value, double right_value) const;
};

GeneratorMatrix assemble_generator(const JumpModel& model, const Grid1D& grid,
                                   DriftScheme scheme = DriftScheme::Hybrid, unsigned threads = 1);
GeneratorMatrix assemble_generator(const ModelParams& params, const Grid1D& grid,
                                   DriftScheme scheme = DriftScheme::Hybrid, unsigned threads = 1);

struct Solution {
  ScalarField field;
  double rcond = 0.0;  // reciprocal condition estimate of the LU factorisation
};

// Systems whose reciprocal condition estimate falls below this are rejected.
inline constexpr double kMinRcond = 1e-14;

// A u = -rhs_scale with u = 0 outside D.
Solution solve_met(const GeneratorMatrix& a, double rhs_scale = 1.0);
Solution solve_met(const ModelParams& params, const Grid1D& grid);

enum class ExitSide { Left, Right };

// A p = 0 with p = 1 on the target side of D's complement and 0 on the other.
Solution solve_ep(const GeneratorMatrix& a, ExitSide target = ExitSide::Left);
Solution solve_ep(const ModelParams& params, const Grid1D& grid, ExitSide target = ExitSide::Left);

struct DensitySnapshot {
  ScalarField field;
  double time = 0.0;
  double mass = 0.0;
  double leaked_mass = 0.0;
};

// Initial density: sqrt(40/pi) exp(-40 (x - x0)^2), a normal bump with variance 1/80.
double initial_bump(double x, double x0);
double bump_mass_inside(double x0, double r1, double r2);
inline constexpr double kMinInitialMass = 0.999;

// Crank-Nicolson in time on the adjoint of the upwind generator. dt <= 0 picks
// dt = h; snapshot_interval <= 0 records only t = 0 and t = T. The step is
// shrunk slightly so that T is a whole number of steps.
std::vector<DensitySnapshot> evolve_fpe(const JumpModel& model, const Grid1D& grid, double x0, double T,
                                        double dt = 0.0, double snapshot_interval = 0.0);
std::vector<DensitySnapshot> evolve_fpe(const ModelParams& params, const Grid1D& grid, double x0, double T,
                                        double dt = 0.0, double snapshot_interval = 0.0);

double trapezoid_mass(const ScalarField& density);

struct ConvergenceRow {
  std::size_t n = 0;
  double h = 0.0;
  double difference = 0.0;  // max |u_h - u_{h/2}| at shared nodes; NaN on the finest level
  double order = 0.0;       // log2 of consecutive difference ratios; NaN when undefined
};

inline constexpr double kDefaultTrim = 0.1;

// Max-norm difference at nodes common to both fields, skipping a fraction
// `trim` of the domain next to each boundary. The fields must share a grid or
// the second must be the first one refined once.
double shared_node_difference(const ScalarField& coarse, const ScalarField& fine, double r1, double r2,
                              double trim = kDefaultTrim);

// MET on base_grid refined levels - 1 times (n -> 2n + 1).
std::vector<ConvergenceRow> convergence_study(const ModelParams& params, const Grid1D& base_grid,
                                              std::size_t levels, double trim = kDefaultTrim);

}  // namespace levyexit::nonlocal
