#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "levyexit/model.hpp"
#include "levyexit/monte_carlo.hpp"

namespace levyexit::cli {

enum class Command { Met, Ep, Fpe, Stationary, ExitProb, Path, Validate, Sweep };

std::string to_string(Command c);
Command parse_command(const std::string& name);  // throws ConfigError

struct SweepAxis {
  std::string name;  // alpha | sigma | lambda | r | x0 | epsilon
  std::vector<double> values;

  bool operator==(const SweepAxis&) const = default;
};

// "name=v1,v2,..."; throws ConfigError on unknown names or bad numbers.
SweepAxis parse_axis(const std::string& spec);

struct RunConfig;
// Single-run configuration for one value of a sweep (output path left unchanged).
RunConfig sweep_point(const RunConfig& sweep, double value);

struct RunConfig {
  Command command = Command::Met;
  Command sweep_target = Command::Met;  // used when command == Sweep
  ModelParams params;
  double r1 = 0.0;
  double r2 = 1.0;
  std::size_t n = 400;
  double x0 = 0.5;
  double epsilon = 1e-3;
  double time = 1.0;               // fpe horizon / path length
  double snapshot_interval = 0.0;  // fpe; 0 = final time only
  mc::MCConfig mc;
  std::optional<std::pair<double, double>> mc_domain;  // validate: oracle domain if it differs
  bool drift_free = false;  // validate: zero drift, additive stable noise of intensity sigma
  std::string output_path;
  std::optional<SweepAxis> sweep_axis;
  unsigned jobs = 1;
  bool gnuplot = false;

  // Throws ConfigError when command-specific fields are missing or inconsistent.
  void validate() const;
  bool operator==(const RunConfig&) const = default;
};

nlohmann::json to_json(const RunConfig& cfg);
RunConfig from_json(const nlohmann::json& j);

// FNV-1a over the canonical JSON form, excluding output location and job count.
std::string config_hash(const RunConfig& cfg);

// Parses argv; flags override values read from --config. Throws ConfigError.
RunConfig parse_args(int argc, const char* const* argv);

// Reads a flat key=value file (keys are long flag names without dashes).
std::vector<std::pair<std::string, std::string>> read_config_file(const std::string& path);

// One long-format CSV row.
struct Row {
  double x = 0.0;
  double value = 0.0;
  std::string quantity;
  double alpha = 0.0;
  double sigma = 0.0;
  double lambda = 0.0;
  double r = 0.0;
  std::optional<double> t;
};

std::string csv_header_comment(const RunConfig& cfg);
inline constexpr const char* kCsvColumns = "x,value,quantity,alpha,sigma,lambda,r,t";
std::string format_number(double v);
std::string format_row(const Row& row);

struct Outcome {
  std::vector<Row> rows;
  nlohmann::json diagnostics = nlohmann::json::object();
  std::string report;  // human-readable text for stdout
};

// Runs the computation without touching the filesystem.
Outcome compute(const RunConfig& cfg);

// Resolves output_path against the output-directory environment variable.
std::string resolve_output_path(const RunConfig& cfg);
inline constexpr const char* kOutputDirEnv = "LEVYEXIT_OUTPUT_DIR";

enum ExitCode { kOk = 0, kConfigError = 2, kSolverError = 3, kThresholdError = 4 };

// Executes the run, writes CSV + JSON sidecar (and optional gnuplot stub) and
// returns the process exit status. Errors are reported on err.
int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

// Entry point used by the executable.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace levyexit::cli
