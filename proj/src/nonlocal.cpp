#include "levyexit/nonlocal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <thread>

#include "levyexit/errors.hpp"
#include "levyexit/stable.hpp"

namespace levyexit::nonlocal {

namespace {

// int_a^b z^p dz for 0 <= a < b.
double power_integral(double a, double b, double p) {
  if (std::abs(p + 1.0) < 1e-12) return std::log(b / a);
  return (std::pow(b, p + 1.0) - std::pow(a, p + 1.0)) / (p + 1.0);
}

struct HatWeights {
  double left;   // weight of the value at a
  double right;  // weight of the value at b
};

// Exact integral of the linear interpolant on [a, b] against z^p.
HatWeights hat_weights(double a, double b, double p) {
  const double i0 = power_integral(a, b, p);
  const double i1 = power_integral(a, b, p + 1.0);
  const double width = b - a;
  return {(b * i0 - i1) / width, (i1 - a * i0) / width};
}

// Panel weights on the unit lattice; the physical ones follow by a factor h^-alpha.
struct UnitWeights {
  // Window, g(z) = [u(x+z) + u(x-z) - 2u(x)] / z^2 against z^(1-alpha).
  // Node k collects inner[k] from panel [k-1, k] and outer[k] from panel [k, k+1].
  std::vector<double> inner, outer;
  // Tails, u(x+z) - u(x) against z^(-1-alpha) on panel [k, k+1].
  std::vector<double> tail_left, tail_right;
};

UnitWeights unit_weights(double alpha, std::size_t n) {
  UnitWeights w;
  const std::size_t kmax = n + 2;
  w.inner.assign(kmax, 0.0);
  w.outer.assign(kmax, 0.0);
  w.tail_left.assign(kmax, 0.0);
  w.tail_right.assign(kmax, 0.0);
  // g is taken constant, equal to g(h), on the first panel.
  w.inner[1] = 1.0 / (2.0 - alpha);
  for (std::size_t k = 1; k + 1 < kmax; ++k) {
    const double a = static_cast<double>(k), b = a + 1.0;
    const HatWeights win = hat_weights(a, b, 1.0 - alpha);
    w.outer[k] = win.left;
    w.inner[k + 1] = win.right;
    const HatWeights tail = hat_weights(a, b, -1.0 - alpha);
    w.tail_left[k] = tail.left;
    w.tail_right[k] = tail.right;
  }
  return w;
}

void require_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 2.0)) {
    throw DomainError("nonlocal generator: alpha must lie in (0, 2), got " + std::to_string(alpha));
  }
}

Solution solve_system(const GeneratorMatrix& a, const Eigen::VectorXd& rhs, double left, double right,
                      const char* what) {
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(a.combined());
  const double rcond = lu.rcond();
  if (!(rcond >= kMinRcond)) {
    throw SolverError(std::string(what) + ": generator matrix is numerically singular (rcond = " +
                          std::to_string(rcond) + ")",
                      rcond);
  }
  const Eigen::VectorXd u = lu.solve(rhs);
  if (!u.allFinite()) throw SolverError(std::string(what) + ": non-finite solution", rcond);
  Solution s;
  s.rcond = rcond;
  s.field.nodes = a.grid.interior_nodes();
  s.field.values.assign(u.data(), u.data() + u.size());
  s.field.exterior_left = left;
  s.field.exterior_right = right;
  return s;
}

}  // namespace

JumpModel JumpModel::logistic(const ModelParams& params) {
  params.validate();
  if (params.lambda != 0.0) throw DomainError("nonlocal generator: requires lambda = 0 (pure jump noise)");
  if (!(params.sigma > 0.0)) throw DomainError("nonlocal generator: sigma must be positive");
  require_alpha(params.alpha);
  const double r = params.r, K = params.K, sigma = params.sigma;
  JumpModel m;
  m.alpha = params.alpha;
  m.drift = [r, K](double x) { return r * x * (1.0 - x / K); };
  m.intensity = [sigma](double x) { return sigma * x; };
  return m;
}

JumpModel JumpModel::drift_free(double alpha, double intensity) {
  require_alpha(alpha);
  if (!(intensity > 0.0)) throw DomainError("drift-free model: intensity must be positive");
  JumpModel m;
  m.alpha = alpha;
  m.drift = [](double) { return 0.0; };
  m.intensity = [intensity](double) { return intensity; };
  return m;
}

void JumpModel::validate() const {
  require_alpha(alpha);
  if (!drift || !intensity) throw DomainError("JumpModel: drift and intensity must be set");
}

Eigen::VectorXd GeneratorMatrix::exterior_rhs(double left_value, double right_value) const {
  return -(exterior_left * left_value + exterior_right * right_value);
}

GeneratorMatrix assemble_generator(const JumpModel& model, const Grid1D& grid, DriftScheme scheme,
                                   unsigned threads) {
  model.validate();
  const std::size_t n = grid.size();
  const double alpha = model.alpha;
  const double h = grid.spacing();
  const double h_scale = std::pow(h, -alpha);
  const double c_alpha = levy_constant(alpha).c_alpha;
  const UnitWeights w = unit_weights(alpha, n);
  const bool degenerate_left = model.intensity(grid.r1()) == 0.0;
  const bool degenerate_right = model.intensity(grid.r2()) == 0.0;

  GeneratorMatrix g(grid);
  g.alpha = alpha;
  g.scheme = scheme;
  g.jump = Eigen::MatrixXd::Zero(n, n);
  g.drift = Eigen::MatrixXd::Zero(n, n);
  g.exterior_left = Eigen::VectorXd::Zero(n);
  g.exterior_right = Eigen::VectorXd::Zero(n);

  const auto assemble_rows = [&](std::size_t first, std::size_t last) {
    // row[0] and row[n + 1] hold the couplings to the left and right exterior.
    std::vector<double> row(n + 2);
    for (std::size_t i = first; i <= last; ++i) {
      std::fill(row.begin(), row.end(), 0.0);
      const double x = grid.node(i);
      const std::size_t m = std::min(i, n + 1 - i);

      // Symmetric window (-m h, m h): second differences over z^2.
      for (std::size_t k = 1; k <= m; ++k) {
        const double weight = w.inner[k] + (k < m ? w.outer[k] : 0.0);
        const double dk = static_cast<double>(k);
        const double c = weight / (dk * dk);
        row[i + k] += c;
        row[i - k] += c;
        row[i] -= 2.0 * c;
      }

      // One-sided tail from the window edge to the far boundary.
      if (i <= n + 1 - i) {
        for (std::size_t k = m; k < n + 1 - i; ++k) {
          row[i + k] += w.tail_left[k];
          row[i + k + 1] += w.tail_right[k];
          row[i] -= w.tail_left[k] + w.tail_right[k];
        }
      } else {
        for (std::size_t k = m; k < i; ++k) {
          row[i - k] += w.tail_left[k];
          row[i - k - 1] += w.tail_right[k];
          row[i] -= w.tail_left[k] + w.tail_right[k];
        }
      }
      // Where the intensity vanishes at an endpoint the solution has a jump there, so the panel
      // touching that endpoint interpolates with the interior limit rather than the exterior value.
      if (degenerate_left) {
        row[1] += row[0];
        row[0] = 0.0;
      }
      if (degenerate_right) {
        row[n] += row[n + 1];
        row[n + 1] = 0.0;
      }
      for (auto& v : row) v *= h_scale;

      // Jumps leaving D: integral of (u_ext - u(x)) |z|^(-1-alpha) over the exterior.
      const double kill_left = std::pow(x - grid.r1(), -alpha) / alpha;
      const double kill_right = std::pow(grid.r2() - x, -alpha) / alpha;
      row[0] += kill_left;
      row[n + 1] += kill_right;
      row[i] -= kill_left + kill_right;

      const double scale = c_alpha * std::pow(std::abs(model.intensity(x)), alpha);
      for (auto& v : row) v *= scale;

      for (std::size_t j = 1; j <= n; ++j) g.jump(i - 1, j - 1) = row[j];
      double ext_left = row[0], ext_right = row[n + 1];

      const double f = model.drift(x);
      if (f != 0.0) {
        const bool central =
            scheme == DriftScheme::Central ||
            (scheme == DriftScheme::Hybrid && std::abs(f) / (2.0 * h) <= std::min(row[i - 1], row[i + 1]));
        // Coefficients of u_{i-1}, u_i, u_{i+1}.
        double cm = 0.0, c0 = 0.0, cp = 0.0;
        if (central) {
          cp = f / (2.0 * h);
          cm = -f / (2.0 * h);
        } else if (f > 0.0) {
          cp = f / h;
          c0 = -f / h;
        } else {
          cm = -f / h;
          c0 = f / h;
        }
        g.drift(i - 1, i - 1) = c0;
        if (i > 1) g.drift(i - 1, i - 2) = cm; else ext_left += cm;
        if (i < n) g.drift(i - 1, i) = cp; else ext_right += cp;
      }
      g.exterior_left(i - 1) = ext_left;
      g.exterior_right(i - 1) = ext_right;
    }
  };

  const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n)));
  if (workers == 1) {
    assemble_rows(1, n);
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (n + workers - 1) / workers;
    for (std::size_t first = 1; first <= n; first += chunk) {
      pool.emplace_back(assemble_rows, first, std::min(n, first + chunk - 1));
    }
    for (auto& t : pool) t.join();
  }
  return g;
}

GeneratorMatrix assemble_generator(const ModelParams& params, const Grid1D& grid, DriftScheme scheme,
                                   unsigned threads) {
  GeneratorMatrix g = assemble_generator(JumpModel::logistic(params), grid, scheme, threads);
  g.sigma = params.sigma;
  g.r = params.r;
  return g;
}

Solution solve_met(const GeneratorMatrix& a, double rhs_scale) {
  const Eigen::VectorXd rhs = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(a.size()), -rhs_scale);
  return solve_system(a, rhs, 0.0, 0.0, "solve_met");
}

Solution solve_met(const ModelParams& params, const Grid1D& grid) {
  return solve_met(assemble_generator(params, grid));
}

Solution solve_ep(const GeneratorMatrix& a, ExitSide target) {
  const double left = target == ExitSide::Left ? 1.0 : 0.0;
  const double right = 1.0 - left;
  return solve_system(a, a.exterior_rhs(left, right), left, right, "solve_ep");
}

Solution solve_ep(const ModelParams& params, const Grid1D& grid, ExitSide target) {
  return solve_ep(assemble_generator(params, grid), target);
}

double initial_bump(double x, double x0) {
  const double d = x - x0;
  return std::sqrt(40.0 / std::numbers::pi) * std::exp(-40.0 * d * d);
}

double bump_mass_inside(double x0, double r1, double r2) {
  const double s = std::sqrt(40.0);
  return 0.5 * (std::erf((r2 - x0) * s) - std::erf((r1 - x0) * s));
}

double trapezoid_mass(const ScalarField& density) {
  // Interior nodes are equally spaced and the density vanishes at the boundary.
  if (density.nodes.size() < 2) return 0.0;
  const double h = density.nodes[1] - density.nodes[0];
  double sum = 0.0;
  for (double v : density.values) sum += v;
  return h * sum;
}

std::vector<DensitySnapshot> evolve_fpe(const JumpModel& model, const Grid1D& grid, double x0, double T, double dt,
                                        double snapshot_interval) {
  if (!(x0 > grid.r1() && x0 < grid.r2())) throw DomainError("evolve_fpe: x0 must lie inside (r1, r2)");
  if (!(T > 0.0)) throw DomainError("evolve_fpe: T must be positive");
  const double inside = bump_mass_inside(x0, grid.r1(), grid.r2());
  if (inside < kMinInitialMass) {
    throw DomainError("evolve_fpe: initial density has mass " + std::to_string(inside) +
                      " inside D (need at least 0.999); move x0 away from the boundary");
  }
  if (!(dt > 0.0)) dt = grid.spacing();
  const auto steps = static_cast<std::size_t>(std::ceil(T / dt - 1e-9));
  dt = T / static_cast<double>(steps);
  std::size_t every = steps;
  if (snapshot_interval > 0.0) {
    every = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(snapshot_interval / dt)));
  }

  const GeneratorMatrix g = assemble_generator(model, grid, DriftScheme::Upwind);
  const auto n = static_cast<Eigen::Index>(grid.size());
  const Eigen::MatrixXd adjoint = g.combined().transpose();
  const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(n, n);
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(identity - 0.5 * dt * adjoint);
  const double rcond = lu.rcond();
  if (!(rcond >= kMinRcond)) throw SolverError("evolve_fpe: implicit step matrix is singular", rcond);
  const Eigen::MatrixXd propagator = lu.solve(identity + 0.5 * dt * adjoint);

  const std::vector<double> nodes = grid.interior_nodes();
  Eigen::VectorXd p(n);
  for (Eigen::Index i = 0; i < n; ++i) p(i) = initial_bump(nodes[static_cast<std::size_t>(i)], x0);

  std::vector<DensitySnapshot> out;
  const auto record = [&](double t) {
    DensitySnapshot s;
    s.field.nodes = nodes;
    s.field.values.assign(p.data(), p.data() + p.size());
    s.time = t;
    s.mass = trapezoid_mass(s.field);
    s.leaked_mass = 1.0 - s.mass;
    out.push_back(std::move(s));
  };
  record(0.0);
  for (std::size_t k = 1; k <= steps; ++k) {
    p = propagator * p;
    if (!p.allFinite()) throw SolverError("evolve_fpe: step " + std::to_string(k) + " produced non-finite values", rcond);
    if (k % every == 0 || k == steps) record(k == steps ? T : static_cast<double>(k) * dt);
  }
  return out;
}

std::vector<DensitySnapshot> evolve_fpe(const ModelParams& params, const Grid1D& grid, double x0, double T, double dt,
                                        double snapshot_interval) {
  return evolve_fpe(JumpModel::logistic(params), grid, x0, T, dt, snapshot_interval);
}

double shared_node_difference(const ScalarField& coarse, const ScalarField& fine, double r1, double r2, double trim) {
  const std::size_t nc = coarse.size(), nf = fine.size();
  std::size_t stride = 0, offset = 0;
  if (nf == nc) {
    stride = 1;
  } else if (nf == 2 * nc + 1) {
    stride = 2;
    offset = 1;
  } else {
    throw DomainError("shared_node_difference: grids are not nested");
  }
  const double lo = r1 + trim * (r2 - r1), hi = r2 - trim * (r2 - r1);
  double diff = 0.0;
  for (std::size_t i = 0; i < nc; ++i) {
    const double x = coarse.nodes[i];
    if (x < lo || x > hi) continue;
    diff = std::max(diff, std::abs(coarse.values[i] - fine.values[stride * i + offset]));
  }
  return diff;
}

std::vector<ConvergenceRow> convergence_study(const ModelParams& params, const Grid1D& base_grid, std::size_t levels,
                                              double trim) {
  if (levels < 2) throw DomainError("convergence_study: need at least 2 levels");
  std::vector<Grid1D> grids{base_grid};
  for (std::size_t k = 1; k < levels; ++k) grids.push_back(grids.back().refined());
  std::vector<ScalarField> fields;
  for (const auto& g : grids) fields.push_back(solve_met(params, g).field);

  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<ConvergenceRow> rows(levels);
  for (std::size_t k = 0; k < levels; ++k) {
    rows[k].n = grids[k].size();
    rows[k].h = grids[k].spacing();
    rows[k].difference =
        k + 1 < levels ? shared_node_difference(fields[k], fields[k + 1], base_grid.r1(), base_grid.r2(), trim) : nan;
    rows[k].order = nan;
    if (k >= 1 && k + 1 < levels && rows[k].difference > 0.0) {
      rows[k].order = std::log2(rows[k - 1].difference / rows[k].difference);
    }
  }
  return rows;
}

}  // namespace levyexit::nonlocal
