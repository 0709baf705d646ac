#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "io.hpp"
#include "levyexit/errors.hpp"

namespace levyexit::cli {

namespace fs = std::filesystem;

namespace {

std::ofstream open_for_writing(const std::string& path) {
  const fs::path p(path);
  if (p.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(p.parent_path(), ec);
    if (ec) throw ConfigError("cannot create directory '" + p.parent_path().string() + "': " + ec.message());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot open '" + path + "' for writing");
  return out;
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string format_row(const Row& row) {
  std::string s;
  s += format_number(row.x);
  s += ',';
  s += format_number(row.value);
  s += ',';
  s += row.quantity;
  for (double v : {row.alpha, row.sigma, row.lambda, row.r}) {
    s += ',';
    s += format_number(v);
  }
  s += ',';
  if (row.t) s += format_number(*row.t);
  return s;
}

std::string csv_header_comment(const RunConfig& cfg) {
  return "# levyexit " + std::string(LEVYEXIT_VERSION) + " config_hash=" + config_hash(cfg);
}

std::string resolve_output_path(const RunConfig& cfg) {
  std::string name = cfg.output_path;
  if (name.empty()) {
    name = to_string(cfg.command);
    if (cfg.command == Command::Sweep) name += "_" + to_string(cfg.sweep_target);
    name += ".csv";
  }
  fs::path p(name);
  if (p.is_relative()) {
    if (const char* root = std::getenv(kOutputDirEnv); root != nullptr && *root != '\0') p = fs::path(root) / p;
  }
  return p.string();
}

std::string sibling_path(const std::string& csv_path, const std::string& extension) {
  fs::path p(csv_path);
  p.replace_extension(extension);
  return p.string();
}

void write_csv(const std::string& path, const std::string& header_comment, const std::vector<Row>& rows) {
  auto out = open_for_writing(path);
  out << header_comment << '\n' << kCsvColumns << '\n';
  for (const auto& row : rows) out << format_row(row) << '\n';
  if (!out) throw ConfigError("failed writing '" + path + "'");
}

void write_json(const std::string& path, const nlohmann::json& j) {
  auto out = open_for_writing(path);
  out << j.dump(2) << '\n';
  if (!out) throw ConfigError("failed writing '" + path + "'");
}

void write_gnuplot(const std::string& path, const std::string& csv_path, const std::vector<Row>& rows) {
  std::vector<std::string> quantities;
  for (const auto& r : rows) {
    if (std::find(quantities.begin(), quantities.end(), r.quantity) == quantities.end()) quantities.push_back(r.quantity);
  }
  auto out = open_for_writing(path);
  const std::string data = fs::path(csv_path).filename().string();
  out << "set datafile separator ','\n"
      << "set key autotitle columnhead\n"
      << "set xlabel 'x'\n";
  out << "plot";
  for (std::size_t k = 0; k < quantities.size(); ++k) {
    out << (k ? ", \\\n    " : " ") << "'" << data << "' using 1:(strcol(3) eq '" << quantities[k]
        << "' ? $2 : 1/0) with lines title '" << quantities[k] << "'";
  }
  out << "\n";
}

}  // namespace levyexit::cli
