#include "levyexit/monte_carlo.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <thread>
#include <vector>

#include "levyexit/errors.hpp"
#include "levyexit/stable.hpp"

namespace levyexit::mc {

namespace {

struct PathOutcome {
  double time = 0.0;
  int side = 0;  // -1 left, +1 right, 0 censored
};

class KahanSum {
 public:
  void add(double v) {
    const double y = v - c_;
    const double t = s_ + y;
    c_ = (t - s_) - y;
    s_ = t;
  }
  double value() const { return s_; }

 private:
  double s_ = 0.0, c_ = 0.0;
};

// Runs body(i) for every path index, split into contiguous blocks.
template <typename Body>
void for_each_path(std::size_t n, unsigned threads, Body body) {
  const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::min<std::size_t>(n, 1024))));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t first = 0; first < n; first += chunk) {
    const std::size_t last = std::min(n, first + chunk);
    pool.emplace_back([first, last, &body] {
      for (std::size_t i = first; i < last; ++i) body(i);
    });
  }
  for (auto& t : pool) t.join();
}

double noise_coefficient(const SdeModel& m, double x) { return m.multiplicative ? x : 1.0; }

MCEstimate finish(double mean, double std_error, std::size_t n_eff, std::size_t censored) {
  MCEstimate e;
  e.mean = mean;
  e.std_error = std_error;
  e.n_effective = n_eff;
  e.censored = censored;
  e.censoring_warning = censored > 0;
  e.ci_low = mean - 1.96 * std_error;
  e.ci_high = mean + 1.96 * std_error;
  return e;
}

MCEstimate binomial(std::size_t hits, std::size_t n_eff, std::size_t censored) {
  const double p = static_cast<double>(hits) / static_cast<double>(n_eff);
  return finish(p, std::sqrt(p * (1.0 - p) / static_cast<double>(n_eff)), n_eff, censored);
}

}  // namespace

SdeModel SdeModel::from_params(const ModelParams& params) {
  params.validate();
  SdeModel m;
  m.r = params.r;
  m.K = params.K;
  m.lambda = params.lambda;
  m.sigma = params.sigma;
  m.alpha = params.alpha;
  return m;
}

SdeModel SdeModel::drift_free(double alpha, double intensity) {
  SdeModel m;
  m.r = 0.0;
  m.sigma = intensity;
  m.alpha = alpha;
  m.multiplicative = false;
  m.validate();
  return m;
}

void SdeModel::validate() const {
  if (!(K > 0.0)) throw DomainError("SdeModel: K must be positive");
  if (lambda < 0.0 || sigma < 0.0) throw DomainError("SdeModel: noise intensities must be non-negative");
  if (sigma > 0.0 && !(alpha > 0.0 && alpha < 2.0)) throw DomainError("SdeModel: alpha must lie in (0, 2)");
}

void MCConfig::validate() const {
  if (n_paths < 1) throw DomainError("MCConfig: n_paths must be at least 1");
  if (!(dt > 0.0)) throw DomainError("MCConfig: dt must be positive");
  if (!(t_max > 0.0)) throw DomainError("MCConfig: t_max must be positive");
  if (!(r1 < r2)) throw DomainError("MCConfig: require r1 < r2");
}

double simulate_step(double x, const SdeModel& m, double dt, double dB, double dL) {
  const double g = noise_coefficient(m, x);
  double next = x + m.r * x * (1.0 - x / m.K) * dt;
  if (m.lambda != 0.0) next += m.lambda * g * std::sqrt(dt) * dB;
  if (m.sigma != 0.0) next += m.sigma * g * std::pow(dt, 1.0 / m.alpha) * dL;
  return next;
}

double simulate_step(double x, const ModelParams& params, double dt, double dB, double dL) {
  SdeModel m;
  m.r = params.r;
  m.K = params.K;
  m.lambda = params.lambda;
  m.sigma = params.sigma;
  m.alpha = params.alpha;
  return simulate_step(x, m, dt, dB, dL);
}

ExitEstimate estimate_exit(const SdeModel& model, double x0, const MCConfig& config) {
  model.validate();
  config.validate();
  if (!(x0 > config.r1 && x0 < config.r2)) {
    throw DomainError("estimate_exit: x0 = " + std::to_string(x0) + " lies outside the domain");
  }
  const auto max_steps = static_cast<std::size_t>(std::ceil(config.t_max / config.dt - 1e-9));
  const double sqrt_dt = std::sqrt(config.dt);
  const double jump_scale = model.sigma > 0.0 ? std::pow(config.dt, 1.0 / model.alpha) : 0.0;
  const double drift_dt = model.r * config.dt;

  std::vector<PathOutcome> outcomes(config.n_paths);
  for_each_path(config.n_paths, config.threads, [&](std::size_t i) {
    RandomStream rs(config.seed, i);
    double x = x0;
    for (std::size_t step = 1; step <= max_steps; ++step) {
      const double g = noise_coefficient(model, x);
      double next = x + drift_dt * x * (1.0 - x / model.K);
      if (model.lambda != 0.0) next += model.lambda * g * sqrt_dt * rs.gaussian();
      if (model.sigma != 0.0) next += model.sigma * g * jump_scale * rs.stable(model.alpha);
      x = next;
      if (x <= config.r1 || x >= config.r2) {
        outcomes[i] = {static_cast<double>(step) * config.dt, x <= config.r1 ? -1 : 1};
        return;
      }
    }
    outcomes[i] = {config.t_max, 0};
  });

  KahanSum sum, sum_sq;
  std::size_t exited = 0, left = 0, right = 0;
  for (const auto& o : outcomes) {
    if (o.side == 0) continue;
    ++exited;
    (o.side < 0 ? left : right) += 1;
    sum.add(o.time);
    sum_sq.add(o.time * o.time);
  }
  const std::size_t censored = config.n_paths - exited;
  if (exited == 0) {
    throw SolverError("Monte Carlo: all " + std::to_string(config.n_paths) + " paths censored at t_max = " +
                      std::to_string(config.t_max));
  }
  const double n = static_cast<double>(exited);
  const double mean = sum.value() / n;
  const double var = exited > 1 ? std::max(0.0, (sum_sq.value() - n * mean * mean) / (n - 1.0)) : 0.0;

  ExitEstimate est;
  est.met = finish(mean, std::sqrt(var / n), exited, censored);
  est.ep_left = binomial(left, exited, censored);
  est.ep_right = binomial(right, exited, censored);
  return est;
}

MCEstimate estimate_met(const ModelParams& params, double x0, const MCConfig& config) {
  return estimate_exit(SdeModel::from_params(params), x0, config).met;
}

MCEstimate estimate_ep(const ModelParams& params, double x0, const MCConfig& config) {
  return estimate_exit(SdeModel::from_params(params), x0, config).ep_left;
}

ScalarField empirical_density(const SdeModel& model, double x0, double t, const MCConfig& config, std::size_t bins) {
  model.validate();
  config.validate();
  if (bins < 1) throw DomainError("empirical_density: need at least one bin");
  if (t < 0.0 || t > config.t_max) throw DomainError("empirical_density: require 0 <= t <= t_max");
  const auto steps = static_cast<std::size_t>(std::llround(t / config.dt));
  const double sqrt_dt = std::sqrt(config.dt);
  const double jump_scale = model.sigma > 0.0 ? std::pow(config.dt, 1.0 / model.alpha) : 0.0;
  const double drift_dt = model.r * config.dt;
  const double bump_sd = 1.0 / std::sqrt(80.0);

  // Final position of each path, NaN once it has left the domain.
  std::vector<double> final_x(config.n_paths);
  for_each_path(config.n_paths, config.threads, [&](std::size_t i) {
    RandomStream rs(config.seed, i);
    double x = x0 + bump_sd * rs.gaussian();
    const auto outside = [&](double y) { return y <= config.r1 || y >= config.r2; };
    if (outside(x)) {
      final_x[i] = std::nan("");
      return;
    }
    for (std::size_t step = 0; step < steps; ++step) {
      const double g = noise_coefficient(model, x);
      double next = x + drift_dt * x * (1.0 - x / model.K);
      if (model.lambda != 0.0) next += model.lambda * g * sqrt_dt * rs.gaussian();
      if (model.sigma != 0.0) next += model.sigma * g * jump_scale * rs.stable(model.alpha);
      x = next;
      if (outside(x)) {
        final_x[i] = std::nan("");
        return;
      }
    }
    final_x[i] = x;
  });

  const double width = (config.r2 - config.r1) / static_cast<double>(bins);
  std::vector<std::size_t> counts(bins, 0);
  for (double x : final_x) {
    if (std::isnan(x)) continue;
    auto b = static_cast<std::size_t>((x - config.r1) / width);
    counts[std::min(b, bins - 1)] += 1;
  }
  ScalarField hist;
  hist.nodes.resize(bins);
  hist.values.resize(bins);
  const double norm = 1.0 / (static_cast<double>(config.n_paths) * width);
  for (std::size_t b = 0; b < bins; ++b) {
    hist.nodes[b] = config.r1 + (static_cast<double>(b) + 0.5) * width;
    hist.values[b] = static_cast<double>(counts[b]) * norm;
  }
  return hist;
}

ScalarField empirical_density(const ModelParams& params, double x0, double t, const MCConfig& config,
                              std::size_t bins) {
  return empirical_density(SdeModel::from_params(params), x0, t, config, bins);
}

}  // namespace levyexit::mc
