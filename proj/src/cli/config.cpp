#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "CLI11.hpp"
#include "levyexit/cli.hpp"
#include "levyexit/errors.hpp"

namespace levyexit::cli {

namespace {

const std::vector<std::pair<Command, std::string>>& command_names() {
  static const std::vector<std::pair<Command, std::string>> names = {
      {Command::Met, "met"},           {Command::Ep, "ep"},     {Command::Fpe, "fpe"},
      {Command::Stationary, "stationary"}, {Command::ExitProb, "exitprob"}, {Command::Path, "path"},
      {Command::Validate, "validate"}, {Command::Sweep, "sweep"},
  };
  return names;
}

const std::vector<std::string> kAxisNames = {"alpha", "sigma", "lambda", "r", "x0", "epsilon"};

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_number(const std::string& text, const std::string& what) {
  const std::string t = trim(text);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(t, &used);
  } catch (const std::exception&) {
    throw ConfigError(what + ": '" + text + "' is not a number");
  }
  if (used != t.size()) throw ConfigError(what + ": '" + text + "' is not a number");
  return v;
}

std::vector<double> parse_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_number(item, what));
  return out;
}

std::pair<double, double> parse_domain(const std::string& text, const std::string& what) {
  const auto v = parse_list(text, what);
  if (v.size() != 2) throw ConfigError(what + ": expected 'r1,r2', got '" + text + "'");
  return {v[0], v[1]};
}

bool is_levy(const RunConfig& c) { return c.params.sigma > 0.0; }
bool is_gaussian(const RunConfig& c) { return c.params.lambda > 0.0; }

void sync_mc_domain(RunConfig& cfg) {
  const auto d = cfg.mc_domain.value_or(std::pair{cfg.r1, cfg.r2});
  cfg.mc.r1 = d.first;
  cfg.mc.r2 = d.second;
}

class HelpRequested : public std::exception {
 public:
  explicit HelpRequested(std::string text, int code) : text_(std::move(text)), code_(code) {}
  const char* what() const noexcept override { return text_.c_str(); }
  int code() const { return code_; }

 private:
  std::string text_;
  int code_;
};

}  // namespace

std::string to_string(Command c) {
  for (const auto& [cmd, name] : command_names()) {
    if (cmd == c) return name;
  }
  return "unknown";
}

Command parse_command(const std::string& name) {
  for (const auto& [cmd, n] : command_names()) {
    if (n == name) return cmd;
  }
  throw ConfigError("unknown command '" + name + "'");
}

SweepAxis parse_axis(const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos) throw ConfigError("--axis: expected name=v1,v2,...");
  SweepAxis axis;
  axis.name = trim(spec.substr(0, eq));
  if (std::find(kAxisNames.begin(), kAxisNames.end(), axis.name) == kAxisNames.end()) {
    throw ConfigError("--axis: '" + axis.name + "' is not a sweepable parameter (alpha, sigma, lambda, r, x0, epsilon)");
  }
  axis.values = parse_list(spec.substr(eq + 1), "--axis");
  if (axis.values.empty()) throw ConfigError("--axis: no values given");
  return axis;
}

RunConfig sweep_point(const RunConfig& sweep, double value) {
  RunConfig child = sweep;
  child.command = sweep.sweep_target;
  child.sweep_target = Command::Met;
  child.sweep_axis.reset();
  child.jobs = 1;
  const std::string& name = sweep.sweep_axis->name;
  if (name == "alpha") child.params.alpha = value;
  else if (name == "sigma") child.params.sigma = value;
  else if (name == "lambda") child.params.lambda = value;
  else if (name == "r") child.params.r = value;
  else if (name == "x0") child.x0 = value;
  else if (name == "epsilon") child.epsilon = value;
  return child;
}

void RunConfig::validate() const {
  if (command == Command::Sweep) {
    if (!sweep_axis) throw ConfigError("sweep: --axis name=v1,v2,... is required");
    if (sweep_target == Command::Validate || sweep_target == Command::Path || sweep_target == Command::Sweep) {
      throw ConfigError("sweep: supported targets are met, ep, fpe, stationary, exitprob");
    }
    if (jobs < 1) throw ConfigError("--jobs: need at least one worker");
    // Every point must be well formed; the swept value replaces the base one.
    for (double v : sweep_axis->values) sweep_point(*this, v).validate();
    return;
  }
  try {
    params.validate();
    mc.validate();
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  if (!(r1 < r2)) throw ConfigError("--domain: require r1 < r2");
  if (n < 8) throw ConfigError("--n: need at least 8 grid points");
  if (jobs < 1) throw ConfigError("--jobs: need at least one worker");
  if (is_levy(*this) && is_gaussian(*this)) {
    throw ConfigError("mixed Brownian and Levy noise is not supported; set either --lambda or --sigma to 0");
  }

  const Command c = command;
  const auto need_noise = [&] {
    if (!is_levy(*this) && !is_gaussian(*this)) throw ConfigError(to_string(c) + ": set --lambda or --sigma");
  };
  const auto need_gaussian = [&] {
    if (!is_gaussian(*this) || is_levy(*this)) throw ConfigError(to_string(c) + ": requires --lambda > 0 and --sigma 0");
  };
  const auto need_epsilon = [&] {
    if (!(epsilon > 0.0 && epsilon < r2)) throw ConfigError("--epsilon: require 0 < epsilon < r2");
  };
  const auto need_x0 = [&](double lo, double hi) {
    if (!(x0 > lo && x0 < hi)) throw ConfigError("--x0: must lie inside the domain");
  };

  switch (c) {
    case Command::Met:
    case Command::Ep:
      need_noise();
      if (is_gaussian(*this)) need_epsilon();
      break;
    case Command::Fpe:
      if (!is_levy(*this)) throw ConfigError("fpe: requires --sigma > 0");
      need_x0(r1, r2);
      if (!(time > 0.0)) throw ConfigError("--time: must be positive");
      break;
    case Command::Stationary:
      need_gaussian();
      break;
    case Command::ExitProb:
      need_gaussian();
      need_epsilon();
      break;
    case Command::Path:
      need_noise();
      if (!(time > 0.0)) throw ConfigError("--time: must be positive");
      if (!(x0 > 0.0)) throw ConfigError("--x0: must be positive");
      break;
    case Command::Validate:
      if (!drift_free) need_noise();
      if (drift_free && !is_levy(*this)) throw ConfigError("validate --drift-free: requires --sigma > 0");
      if (mc_domain && (mc_domain->first != r1 || mc_domain->second != r2)) {
        throw ConfigError("validate: solver domain (" + format_number(r1) + "," + format_number(r2) +
                          ") and oracle domain (" + format_number(mc_domain->first) + "," +
                          format_number(mc_domain->second) + ") differ");
      }
      if (is_gaussian(*this)) {
        need_epsilon();
        need_x0(epsilon, r2);
      } else {
        need_x0(r1, r2);
      }
      break;
    case Command::Sweep:
      break;
  }
}

nlohmann::json to_json(const RunConfig& cfg) {
  nlohmann::json j;
  j["command"] = to_string(cfg.command);
  j["sweep_target"] = to_string(cfg.sweep_target);
  j["alpha"] = cfg.params.alpha;
  j["sigma"] = cfg.params.sigma;
  j["lambda"] = cfg.params.lambda;
  j["r"] = cfg.params.r;
  j["kcap"] = cfg.params.K;
  j["domain"] = {cfg.r1, cfg.r2};
  j["n"] = cfg.n;
  j["x0"] = cfg.x0;
  j["epsilon"] = cfg.epsilon;
  j["time"] = cfg.time;
  j["snapshot"] = cfg.snapshot_interval;
  j["mc"] = {{"paths", cfg.mc.n_paths}, {"dt", cfg.mc.dt}, {"t_max", cfg.mc.t_max},
             {"seed", cfg.mc.seed},     {"threads", cfg.mc.threads}};
  j["mc_domain"] = cfg.mc_domain ? nlohmann::json{cfg.mc_domain->first, cfg.mc_domain->second} : nlohmann::json();
  j["drift_free"] = cfg.drift_free;
  j["out"] = cfg.output_path;
  j["axis"] = cfg.sweep_axis ? nlohmann::json{{"name", cfg.sweep_axis->name}, {"values", cfg.sweep_axis->values}}
                             : nlohmann::json();
  j["jobs"] = cfg.jobs;
  j["gnuplot"] = cfg.gnuplot;
  return j;
}

RunConfig from_json(const nlohmann::json& j) {
  try {
    RunConfig cfg;
    cfg.command = parse_command(j.at("command").get<std::string>());
    cfg.sweep_target = parse_command(j.at("sweep_target").get<std::string>());
    cfg.params.alpha = j.at("alpha").get<double>();
    cfg.params.sigma = j.at("sigma").get<double>();
    cfg.params.lambda = j.at("lambda").get<double>();
    cfg.params.r = j.at("r").get<double>();
    cfg.params.K = j.at("kcap").get<double>();
    cfg.r1 = j.at("domain").at(0).get<double>();
    cfg.r2 = j.at("domain").at(1).get<double>();
    cfg.n = j.at("n").get<std::size_t>();
    cfg.x0 = j.at("x0").get<double>();
    cfg.epsilon = j.at("epsilon").get<double>();
    cfg.time = j.at("time").get<double>();
    cfg.snapshot_interval = j.at("snapshot").get<double>();
    const auto& m = j.at("mc");
    cfg.mc.n_paths = m.at("paths").get<std::size_t>();
    cfg.mc.dt = m.at("dt").get<double>();
    cfg.mc.t_max = m.at("t_max").get<double>();
    cfg.mc.seed = m.at("seed").get<std::uint64_t>();
    cfg.mc.threads = m.at("threads").get<unsigned>();
    if (!j.at("mc_domain").is_null()) {
      cfg.mc_domain = std::pair{j["mc_domain"].at(0).get<double>(), j["mc_domain"].at(1).get<double>()};
    }
    cfg.drift_free = j.at("drift_free").get<bool>();
    cfg.output_path = j.at("out").get<std::string>();
    if (!j.at("axis").is_null()) {
      cfg.sweep_axis = SweepAxis{j["axis"].at("name").get<std::string>(), j["axis"].at("values").get<std::vector<double>>()};
    }
    cfg.jobs = j.at("jobs").get<unsigned>();
    cfg.gnuplot = j.at("gnuplot").get<bool>();
    sync_mc_domain(cfg);
    return cfg;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config JSON: ") + e.what());
  }
}

std::string config_hash(const RunConfig& cfg) {
  nlohmann::json j = to_json(cfg);
  j.erase("out");
  j.erase("jobs");
  j["mc"].erase("threads");
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : j.dump()) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::vector<std::pair<std::string, std::string>> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  for (int lineno = 1; std::getline(in, line); ++lineno) {
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key=value");
    }
    out.emplace_back(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
  }
  return out;
}

namespace {

RunConfig parse_args_impl(const std::vector<std::string>& args) {
  RunConfig cfg;
  CLI::App app{"Exit times, escape probabilities and densities for the stochastic logistic model", "levyexit"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.set_version_flag("--version", std::string(LEVYEXIT_VERSION));

  std::string command, target, domain, mc_domain, axis, config_path;
  app.add_option("command", command, "met | ep | fpe | stationary | exitprob | path | validate | sweep")->required();
  app.add_option("target", target, "command run by 'sweep'");
  app.add_option("--alpha", cfg.params.alpha, "stability index of the Levy noise");
  app.add_option("--sigma", cfg.params.sigma, "Levy noise intensity");
  app.add_option("--lambda", cfg.params.lambda, "Brownian noise intensity");
  app.add_option("--r", cfg.params.r, "growth rate");
  app.add_option("--kcap", cfg.params.K, "carrying capacity");
  app.add_option("--x0", cfg.x0, "initial population");
  app.add_option("--domain", domain, "r1,r2");
  app.add_option("--mc-domain", mc_domain, "r1,r2 used by the Monte Carlo oracle in 'validate'");
  app.add_option("--n", cfg.n, "grid points");
  app.add_option("--epsilon", cfg.epsilon, "lower cut-off for the Gaussian model");
  app.add_option("--time", cfg.time, "fpe horizon / path length");
  app.add_option("--snapshot", cfg.snapshot_interval, "fpe snapshot interval");
  app.add_option("--t-max", cfg.mc.t_max, "Monte Carlo horizon");
  app.add_option("--dt", cfg.mc.dt, "Monte Carlo time step");
  app.add_option("--paths", cfg.mc.n_paths, "Monte Carlo paths");
  app.add_option("--seed", cfg.mc.seed, "random seed");
  app.add_option("--threads", cfg.mc.threads, "Monte Carlo worker threads");
  app.add_option("--axis", axis, "name=v1,v2,... swept parameter");
  app.add_option("--jobs", cfg.jobs, "concurrent sweep runs");
  app.add_option("--out", cfg.output_path, "output CSV path");
  app.add_option("--config", config_path, "key=value configuration file");
  app.add_flag("--drift-free", cfg.drift_free, "validate against zero drift and additive noise");
  app.add_flag("--gnuplot", cfg.gnuplot, "also write a gnuplot script");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    std::ostringstream out, err;
    const int code = app.exit(e, out, err);
    if (code == 0) throw HelpRequested(out.str(), 0);
    throw ConfigError(e.what());
  }

  cfg.command = parse_command(command);
  if (cfg.command == Command::Sweep) {
    if (target.empty()) throw ConfigError("sweep: name the command to sweep, e.g. 'sweep met'");
    cfg.sweep_target = parse_command(target);
  } else if (!target.empty()) {
    throw ConfigError("unexpected argument '" + target + "'");
  }
  if (!domain.empty()) std::tie(cfg.r1, cfg.r2) = parse_domain(domain, "--domain");
  if (!mc_domain.empty()) cfg.mc_domain = parse_domain(mc_domain, "--mc-domain");
  if (!axis.empty()) cfg.sweep_axis = parse_axis(axis);
  sync_mc_domain(cfg);
  return cfg;
}

}  // namespace

RunConfig parse_args(int argc, const char* const* argv) {
  std::vector<std::string> cli(argv + 1, argv + argc);
  // Values from --config go first so that later flags take precedence.
  std::vector<std::string> args;
  for (std::size_t i = 0; i < cli.size(); ++i) {
    std::string path;
    if (cli[i] == "--config" && i + 1 < cli.size()) {
      path = cli[i + 1];
    } else if (cli[i].rfind("--config=", 0) == 0) {
      path = cli[i].substr(9);
    }
    if (path.empty()) continue;
    for (const auto& [key, value] : read_config_file(path)) {
      if (key == "command" || key == "target" || key == "config") {
        throw ConfigError(path + ": '" + key + "' cannot be set from a config file");
      }
      if (value == "true") {
        args.push_back("--" + key);
      } else if (value != "false") {
        args.push_back("--" + key);
        args.push_back(value);
      }
    }
  }
  args.insert(args.end(), cli.begin(), cli.end());
  return parse_args_impl(args);
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  try {
    cfg = parse_args(argc, argv);
    cfg.validate();
  } catch (const HelpRequested& h) {
    out << h.what();
    return h.code();
  } catch (const ConfigError& e) {
    err << "error[config]: " << e.what() << "\n";
    return kConfigError;
  }
  return run(cfg, out, err);
}

}  // namespace levyexit::cli
