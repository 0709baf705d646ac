#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <ostream>
#include <sstream>
#include <thread>

#include "io.hpp"
#include "levyexit/errors.hpp"
#include "levyexit/gaussian.hpp"
#include "levyexit/nonlocal.hpp"
#include "levyexit/stable.hpp"

namespace levyexit::cli {

namespace {

constexpr double kZGate = 3.0;
constexpr std::size_t kMaxPathRows = 1000;

Row make_row(const ModelParams& p, double x, double value, const std::string& quantity,
             std::optional<double> t = std::nullopt) {
  return Row{x, value, quantity, p.alpha, p.sigma, p.lambda, p.r, t};
}

std::vector<double> log_grid(double a, double b, std::size_t n) {
  std::vector<double> x(n);
  const double la = std::log(a), lb = std::log(b);
  for (std::size_t j = 0; j < n; ++j) x[j] = std::exp(la + (lb - la) * static_cast<double>(j) / static_cast<double>(n - 1));
  x.front() = a;
  x.back() = b;
  return x;
}

void add_field(Outcome& o, const ModelParams& p, const ScalarField& f, const std::string& quantity) {
  for (std::size_t i = 0; i < f.size(); ++i) o.rows.push_back(make_row(p, f.nodes[i], f.values[i], quantity));
}

Outcome compute_met(const RunConfig& cfg, const ModelParams& p) {
  Outcome o;
  if (p.has_levy_noise()) {
    const Grid1D grid(cfg.r1, cfg.r2, cfg.n);
    const auto sol = nonlocal::solve_met(nonlocal::assemble_generator(p, grid));
    add_field(o, p, sol.field, "u");
    o.diagnostics = {{"solver", "nonlocal_fd"}, {"n", cfg.n}, {"h", grid.spacing()}, {"rcond", sol.rcond}};
    return o;
  }
  const ScalarField bvp = gaussian::met_two_sided(cfg.epsilon, cfg.r2, p.lambda, cfg.n);
  add_field(o, p, bvp, "u");
  o.diagnostics = {{"solver", "log_grid_bvp"}, {"n_points", cfg.n}};
  if (cfg.r2 == 1.0 && p.lambda < std::sqrt(2.0)) {
    const auto series = gaussian::met_series(p.lambda);
    for (double x : bvp.nodes) o.rows.push_back(make_row(p, x, series(x) - series(1.0), "u_series"));
    for (double x : bvp.nodes) {
      o.rows.push_back(make_row(p, x, gaussian::met_gaussian_finite(x, cfg.epsilon, p.lambda), "u_finite"));
    }
    o.diagnostics["series_terms"] = series.order();
  }
  return o;
}

Outcome compute_gaussian_exit(const RunConfig& cfg, const ModelParams& p, bool with_right) {
  Outcome o;
  const auto xs = log_grid(cfg.epsilon, cfg.r2, cfg.n);
  for (double x : xs) {
    o.rows.push_back(make_row(p, x, gaussian::exit_prob_left({cfg.epsilon, cfg.r2, p.lambda, x}), "p_left"));
  }
  if (with_right && cfg.r2 == 1.0 && p.lambda < std::sqrt(2.0)) {
    for (double x : xs) o.rows.push_back(make_row(p, x, gaussian::exit_prob_right(x, cfg.epsilon, p.lambda), "p_right"));
  }
  o.diagnostics = {{"solver", "scale_function_quadrature"}, {"n_points", cfg.n}};
  return o;
}

Outcome compute_ep(const RunConfig& cfg, const ModelParams& p) {
  if (!p.has_levy_noise()) return compute_gaussian_exit(cfg, p, false);
  Outcome o;
  const Grid1D grid(cfg.r1, cfg.r2, cfg.n);
  const auto sol = nonlocal::solve_ep(nonlocal::assemble_generator(p, grid), nonlocal::ExitSide::Left);
  add_field(o, p, sol.field, "p_left");
  o.diagnostics = {{"solver", "nonlocal_fd"}, {"n", cfg.n}, {"h", grid.spacing()}, {"rcond", sol.rcond}};
  return o;
}

Outcome compute_fpe(const RunConfig& cfg, const ModelParams& p) {
  Outcome o;
  const Grid1D grid(cfg.r1, cfg.r2, cfg.n);
  const auto snaps = nonlocal::evolve_fpe(p, grid, cfg.x0, cfg.time, 0.0, cfg.snapshot_interval);
  nlohmann::json list = nlohmann::json::array();
  for (const auto& s : snaps) {
    double min_value = 0.0;
    for (std::size_t i = 0; i < s.field.size(); ++i) {
      min_value = std::min(min_value, s.field.values[i]);
      o.rows.push_back(make_row(p, s.field.nodes[i], std::max(0.0, s.field.values[i]), "density", s.time));
    }
    list.push_back({{"t", s.time}, {"mass", s.mass}, {"leaked_mass", s.leaked_mass}, {"min_value", min_value}});
  }
  o.diagnostics = {{"solver", "crank_nicolson"},
                   {"n", cfg.n},
                   {"steps", static_cast<std::size_t>(std::ceil(cfg.time / grid.spacing() - 1e-9))},
                   {"snapshots", list}};
  return o;
}

Outcome compute_stationary(const RunConfig& cfg, const ModelParams& p) {
  Outcome o;
  const auto q = gaussian::stationary_density(p.lambda);
  const Grid1D grid(cfg.r1, cfg.r2, cfg.n);
  for (double x : grid.interior_nodes()) o.rows.push_back(make_row(p, x, q(x), "q"));
  o.diagnostics = {{"normalization", q.normalization()}, {"exponent", q.exponent()}};
  return o;
}

Outcome compute_path(const RunConfig& cfg, const ModelParams& p) {
  Outcome o;
  const double dt = cfg.mc.dt;
  const auto steps = static_cast<std::size_t>(std::llround(cfg.time / dt));
  const std::size_t stride = std::max<std::size_t>(1, steps / kMaxPathRows);
  RandomStream rs(cfg.mc.seed, 0);
  std::vector<double> db(steps), em(steps + 1);
  em[0] = cfg.x0;
  std::optional<double> exit_time;
  for (std::size_t k = 0; k < steps; ++k) {
    const double z = p.has_gaussian_noise() ? rs.gaussian() : 0.0;
    const double l = p.has_levy_noise() ? rs.stable(p.alpha) : 0.0;
    db[k] = std::sqrt(dt) * z;
    em[k + 1] = mc::simulate_step(em[k], p, dt, z, l);
    if (!exit_time && (em[k + 1] <= cfg.r1 || em[k + 1] >= cfg.r2)) exit_time = static_cast<double>(k + 1) * dt;
  }
  for (std::size_t k = 0; k <= steps; k += stride) {
    o.rows.push_back(make_row(p, cfg.x0, em[k], "path_em", static_cast<double>(k) * dt));
  }
  if (p.has_gaussian_noise()) {
    const auto exact = gaussian::exact_path(cfg.x0, p.lambda, db, dt);
    for (std::size_t k = 0; k <= steps; k += stride) {
      o.rows.push_back(make_row(p, cfg.x0, exact[k], "path_exact", static_cast<double>(k) * dt));
    }
  }
  o.diagnostics = {{"steps", steps}, {"stride", stride},
                   {"first_exit_time", exit_time ? nlohmann::json(*exit_time) : nlohmann::json()}};
  return o;
}

struct Pairing {
  std::string name;
  double pde = 0.0;
  mc::MCEstimate mc;
};

double z_score(double a, const mc::MCEstimate& e) {
  const double d = std::abs(a - e.mean);
  if (e.std_error > 0.0) return d / e.std_error;
  return d == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
}

Outcome compute_validate(const RunConfig& cfg, const ModelParams& p) {
  std::vector<Pairing> pairs;
  mc::MCConfig mcc = cfg.mc;
  mc::SdeModel sde;
  if (cfg.drift_free || p.has_levy_noise()) {
    const Grid1D grid(cfg.r1, cfg.r2, cfg.n);
    const auto model = cfg.drift_free ? nonlocal::JumpModel::drift_free(p.alpha, p.sigma) : nonlocal::JumpModel::logistic(p);
    const auto a = nonlocal::assemble_generator(model, grid);
    sde = cfg.drift_free ? mc::SdeModel::drift_free(p.alpha, p.sigma) : mc::SdeModel::from_params(p);
    const auto est = mc::estimate_exit(sde, cfg.x0, mcc);
    pairs.push_back({"met", nonlocal::solve_met(a).field.at(cfg.x0), est.met});
    pairs.push_back({"ep", nonlocal::solve_ep(a).field.at(cfg.x0), est.ep_left});
  } else {
    mcc.r1 = cfg.epsilon;
    sde = mc::SdeModel::from_params(p);
    const auto est = mc::estimate_exit(sde, cfg.x0, mcc);
    const ScalarField met = gaussian::met_two_sided(cfg.epsilon, cfg.r2, p.lambda, std::max<std::size_t>(cfg.n, 2000));
    pairs.push_back({"met", met.at(cfg.x0), est.met});
    pairs.push_back({"ep", gaussian::exit_prob_left({cfg.epsilon, cfg.r2, p.lambda, cfg.x0}), est.ep_left});
  }

  Outcome o;
  std::ostringstream report;
  nlohmann::json diag = nlohmann::json::object();
  for (const auto& pr : pairs) {
    const double z = z_score(pr.pde, pr.mc);
    const bool pass = z < kZGate;
    o.rows.push_back(make_row(p, cfg.x0, pr.pde, pr.name + "_pde"));
    o.rows.push_back(make_row(p, cfg.x0, pr.mc.mean, pr.name + "_mc"));
    o.rows.push_back(make_row(p, cfg.x0, pr.mc.std_error, pr.name + "_se"));
    o.rows.push_back(make_row(p, cfg.x0, z, pr.name + "_z"));
    report << "validate " << pr.name << ": solver=" << format_number(pr.pde) << " oracle=" << format_number(pr.mc.mean)
           << " se=" << format_number(pr.mc.std_error) << " z=" << format_number(z) << " "
           << (pass ? "PASS" : "FAIL");
    if (pr.mc.censoring_warning) report << " (warning: " << pr.mc.censored << " censored paths)";
    report << "\n";
    diag[pr.name] = {{"solver", pr.pde},           {"oracle", pr.mc.mean},
                     {"std_error", pr.mc.std_error}, {"z", z},
                     {"pass", pass},                {"n_effective", pr.mc.n_effective},
                     {"censored", pr.mc.censored}};
  }
  diag["gate"] = kZGate;
  diag["oracle_domain"] = {mcc.r1, mcc.r2};
  o.diagnostics = diag;
  o.report = report.str();
  return o;
}

struct SingleResult {
  int code = kOk;
  Outcome outcome;
  std::string csv_path;
  std::string error;
};

template <typename F>
int guarded(F&& f, std::string& error) {
  try {
    f();
    return kOk;
  } catch (const ConfigError& e) {
    error = std::string("error[config]: ") + e.what();
    return kConfigError;
  } catch (const DomainError& e) {
    error = std::string("error[config]: ") + e.what();
    return kConfigError;
  } catch (const ThresholdError& e) {
    error = std::string("error[threshold]: ") + e.what();
    return kThresholdError;
  } catch (const SolverError& e) {
    error = std::string("error[solver]: ") + e.what();
    if (e.condition_estimate() > 0.0) error += " (rcond " + format_number(e.condition_estimate()) + ")";
    return kSolverError;
  } catch (const std::exception& e) {
    error = std::string("error[solver]: ") + e.what();
    return kSolverError;
  }
}

nlohmann::json sidecar(const RunConfig& cfg, const ScaledModel& scaled, const nlohmann::json& diagnostics,
                       double seconds, const std::string& csv_path) {
  return {{"version", LEVYEXIT_VERSION},
          {"config_hash", config_hash(cfg)},
          {"config", to_json(cfg)},
          {"scaling", {{"time_scale", scaled.time_scale}, {"population_scale", scaled.population_scale}}},
          {"diagnostics", diagnostics},
          {"wall_clock_seconds", seconds},
          {"csv", std::filesystem::path(csv_path).filename().string()}};
}

SingleResult run_single(const RunConfig& cfg) {
  SingleResult res;
  const auto start = std::chrono::steady_clock::now();
  res.code = guarded(
      [&] {
        cfg.validate();
        const ScaledModel scaled = nondimensionalize(cfg.params);
        res.outcome = compute(cfg);
        res.csv_path = resolve_output_path(cfg);
        write_csv(res.csv_path, csv_header_comment(cfg), res.outcome.rows);
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        write_json(sibling_path(res.csv_path, ".json"), sidecar(cfg, scaled, res.outcome.diagnostics, seconds, res.csv_path));
        if (cfg.gnuplot) write_gnuplot(sibling_path(res.csv_path, ".gp"), res.csv_path, res.outcome.rows);
      },
      res.error);
  return res;
}

RunConfig sweep_child(const RunConfig& cfg, double value) {
  RunConfig child = sweep_point(cfg, value);
  const std::string& name = cfg.sweep_axis->name;

  std::filesystem::path base(cfg.output_path.empty() ? to_string(cfg.command) + "_" + to_string(cfg.sweep_target) + ".csv"
                                                     : cfg.output_path);
  const std::string ext = base.has_extension() ? base.extension().string() : ".csv";
  base.replace_filename(base.stem().string() + "_" + name + "_" + format_number(value) + ext);
  child.output_path = base.string();
  return child;
}

int run_sweep(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto start = std::chrono::steady_clock::now();
  const auto& values = cfg.sweep_axis->values;
  std::vector<SingleResult> results(values.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t k = next++; k < values.size(); k = next++) results[k] = run_single(sweep_child(cfg, values[k]));
  };
  const unsigned jobs = std::max(1u, std::min<unsigned>(cfg.jobs, static_cast<unsigned>(values.size())));
  std::vector<std::thread> pool;
  for (unsigned j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  int code = kOk;
  std::vector<Row> combined;
  nlohmann::json runs = nlohmann::json::array();
  for (std::size_t k = 0; k < values.size(); ++k) {
    const auto& r = results[k];
    if (r.code != kOk) {
      err << cfg.sweep_axis->name << "=" << format_number(values[k]) << ": " << r.error << "\n";
      if (code == kOk) code = r.code;
    } else {
      out << "wrote " << r.csv_path << "\n";
      combined.insert(combined.end(), r.outcome.rows.begin(), r.outcome.rows.end());
    }
    runs.push_back({{"value", values[k]}, {"status", r.code}, {"csv", r.csv_path}});
  }
  std::string error;
  const int write_code = guarded(
      [&] {
        const std::string path = resolve_output_path(cfg);
        write_csv(path, csv_header_comment(cfg), combined);
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        write_json(sibling_path(path, ".json"), sidecar(cfg, nondimensionalize(cfg.params), {{"runs", runs}}, seconds, path));
        if (cfg.gnuplot) write_gnuplot(sibling_path(path, ".gp"), path, combined);
        out << "wrote " << path << "\n";
      },
      error);
  if (write_code != kOk) {
    err << error << "\n";
    return code == kOk ? write_code : code;
  }
  return code;
}

}  // namespace

Outcome compute(const RunConfig& cfg) {
  const ModelParams p = nondimensionalize(cfg.params).params;
  switch (cfg.command) {
    case Command::Met: return compute_met(cfg, p);
    case Command::Ep: return compute_ep(cfg, p);
    case Command::Fpe: return compute_fpe(cfg, p);
    case Command::Stationary: return compute_stationary(cfg, p);
    case Command::ExitProb: return compute_gaussian_exit(cfg, p, true);
    case Command::Path: return compute_path(cfg, p);
    case Command::Validate: return compute_validate(cfg, p);
    case Command::Sweep: break;
  }
  throw ConfigError("compute: 'sweep' runs through run()");
}

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if (cfg.command == Command::Sweep) {
    std::string error;
    const int code = guarded([&] { cfg.validate(); }, error);
    if (code != kOk) {
      err << error << "\n";
      return code;
    }
    return run_sweep(cfg, out, err);
  }
  const SingleResult r = run_single(cfg);
  if (r.code != kOk) {
    err << r.error << "\n";
    return r.code;
  }
  out << r.outcome.report;
  out << "wrote " << r.csv_path << "\n";
  return kOk;
}

}  // namespace levyexit::cli
