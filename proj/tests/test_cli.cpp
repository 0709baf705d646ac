#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>
#include <unistd.h>

#include "doctest.h"
#include "levyexit/cli.hpp"
#include "levyexit/errors.hpp"

using namespace levyexit;
using namespace levyexit::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / ("levyexit_cli_test_" + std::to_string(::getpid()));
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

struct Invocation {
  int code;
  std::string out;
  std::string err;
};

Invocation invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "levyexit");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = main_entry(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  for (std::string l; std::getline(ss, l);) out.push_back(l);
  return out;
}

RunConfig parse(std::vector<std::string> args) {
  args.insert(args.begin(), "levyexit");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  return parse_args(static_cast<int>(argv.size()), argv.data());
}

std::string out_path(const std::string& name) { return (scratch_dir() / name).string(); }

}  // namespace

TEST_CASE("flags populate the run configuration") {
  const RunConfig c = parse({"met", "--alpha", "0.5", "--sigma", "0.5", "--r", "1.0", "--domain", "0,1", "--n", "400"});
  CHECK(c.command == Command::Met);
  CHECK(c.params.alpha == 0.5);
  CHECK(c.params.sigma == 0.5);
  CHECK(c.params.r == 1.0);
  CHECK(c.r1 == 0.0);
  CHECK(c.r2 == 1.0);
  CHECK(c.n == 400);
  CHECK(c.mc.r1 == 0.0);
  CHECK_NOTHROW(c.validate());

  const RunConfig s = parse({"sweep", "met", "--axis", "alpha=0.1,0.4,0.7,1.0", "--sigma", "0.5", "--jobs", "2"});
  CHECK(s.command == Command::Sweep);
  CHECK(s.sweep_target == Command::Met);
  REQUIRE(s.sweep_axis);
  CHECK(s.sweep_axis->name == "alpha");
  CHECK(s.sweep_axis->values == std::vector<double>{0.1, 0.4, 0.7, 1.0});
  CHECK(s.jobs == 2);

  const RunConfig m = parse({"validate", "--kcap", "2", "--x0", "0.3", "--epsilon", "1e-4", "--t-max", "50", "--dt", "1e-4",
                             "--paths", "123", "--seed", "9", "--mc-domain", "0,2", "--drift-free"});
  CHECK(m.params.K == 2.0);
  CHECK(m.x0 == 0.3);
  CHECK(m.epsilon == 1e-4);
  CHECK(m.mc.t_max == 50.0);
  CHECK(m.mc.dt == 1e-4);
  CHECK(m.mc.n_paths == 123);
  CHECK(m.mc.seed == 9);
  CHECK(m.mc.r2 == 2.0);
  CHECK(m.drift_free);
}

TEST_CASE("malformed arguments are configuration errors") {
  CHECK_THROWS_AS(parse({"fly"}), ConfigError);
  CHECK_THROWS_AS(parse({"met", "--alpha", "abc"}), ConfigError);
  CHECK_THROWS_AS(parse({"met", "--domain", "0"}), ConfigError);
  CHECK_THROWS_AS(parse({"sweep", "met", "--axis", "kappa=1,2"}), ConfigError);
  CHECK_THROWS_AS(parse({"sweep"}), ConfigError);
  CHECK_THROWS_AS(parse({"met", "--bogus", "1"}), ConfigError);
  CHECK_THROWS_AS(parse_axis("alpha"), ConfigError);
  CHECK_THROWS_AS(parse_axis("alpha=0.1,x"), ConfigError);
  CHECK(parse_axis("x0=0.2,0.8").values.size() == 2);
}

TEST_CASE("command-specific validation") {
  CHECK_THROWS_AS(parse({"met"}).validate(), ConfigError);
  CHECK_THROWS_AS(parse({"met", "--sigma", "0.5", "--lambda", "0.5"}).validate(), ConfigError);
  CHECK_THROWS_AS(parse({"fpe", "--lambda", "0.5"}).validate(), ConfigError);
  CHECK_THROWS_AS(parse({"stationary", "--sigma", "0.5"}).validate(), ConfigError);
  CHECK_THROWS_AS(parse({"met", "--sigma", "0.5", "--alpha", "2.5"}).validate(), ConfigError);
  CHECK_THROWS_AS(parse({"met", "--sigma", "0.5", "--n", "4"}).validate(), ConfigError);
  CHECK_THROWS_AS(parse({"sweep", "met", "--sigma", "0.5"}).validate(), ConfigError);
  CHECK_THROWS_AS(parse({"validate", "--sigma", "0.5", "--mc-domain", "0,2"}).validate(), ConfigError);
  CHECK_NOTHROW(parse({"validate", "--sigma", "0.5", "--mc-domain", "0,1"}).validate());
  CHECK_NOTHROW(parse({"stationary", "--lambda", "1.5"}).validate());
}

TEST_CASE("config file values are overridden by flags") {
  const fs::path file = scratch_dir() / "run.cfg";
  {
    std::ofstream f(file);
    f << "# comment\nalpha = 0.7\nsigma=0.3\ndomain=0,2\nn=120\ngnuplot=true\n";
  }
  const RunConfig c = parse({"met", "--config", file.string(), "--alpha", "0.5"});
  CHECK(c.params.alpha == 0.5);
  CHECK(c.params.sigma == 0.3);
  CHECK(c.r2 == 2.0);
  CHECK(c.n == 120);
  CHECK(c.gnuplot);
  const RunConfig d = parse({"met", "--alpha", "0.5", "--config=" + file.string()});
  CHECK(d.params.alpha == 0.5);
  CHECK_THROWS_AS(parse({"met", "--config", (scratch_dir() / "missing.cfg").string()}), ConfigError);
  {
    std::ofstream f(scratch_dir() / "bad.cfg");
    f << "alpha 0.5\n";
  }
  CHECK_THROWS_AS(read_config_file((scratch_dir() / "bad.cfg").string()), ConfigError);
}

TEST_CASE("JSON form round-trips") {
  RunConfig c = parse({"sweep", "ep", "--axis", "sigma=0.2,0.4", "--alpha", "0.5", "--sigma", "1", "--mc-domain", "0,1",
                       "--seed", "18446744073709551557", "--out", "x/y.csv", "--dt", "0.000123456789"});
  CHECK(from_json(to_json(c)) == c);
  CHECK(from_json(nlohmann::json::parse(to_json(c).dump())) == c);
  const RunConfig plain = parse({"met", "--sigma", "0.5"});
  CHECK(from_json(to_json(plain)) == plain);
  CHECK_THROWS_AS(from_json(nlohmann::json{{"command", "met"}}), ConfigError);
}

TEST_CASE("config hash ignores output location only") {
  const RunConfig a = parse({"met", "--sigma", "0.5", "--out", "a.csv", "--jobs", "3"});
  const RunConfig b = parse({"met", "--sigma", "0.5", "--out", "b.csv"});
  const RunConfig c = parse({"met", "--sigma", "0.6"});
  CHECK(config_hash(a) == config_hash(b));
  CHECK(config_hash(a) != config_hash(c));
  CHECK(config_hash(a).size() == 16);
}

TEST_CASE("number formatting") {
  CHECK(format_number(0.5) == "0.5");
  CHECK(format_number(1e-12) == "1e-12");
  CHECK(format_number(1.0 / 3.0) == "0.333333333333");
  Row r{0.25, 1.5, "u", 0.5, 0.5, 0.0, 1.0, std::nullopt};
  CHECK(format_row(r) == "0.25,1.5,u,0.5,0.5,0,1,");
  r.t = 2.0;
  CHECK(format_row(r) == "0.25,1.5,u,0.5,0.5,0,1,2");
}

TEST_CASE("met run writes a long-format CSV and a round-tripping sidecar") {
  const std::string csv = out_path("met.csv");
  const auto res = invoke({"met", "--alpha", "0.5", "--sigma", "0.5", "--r", "1.0", "--domain", "0,1", "--n", "400",
                           "--out", csv, "--gnuplot"});
  REQUIRE(res.code == 0);
  const auto text = lines(slurp(csv));
  REQUIRE(text.size() == 402);
  CHECK(text[0].rfind("# levyexit " LEVYEXIT_VERSION " config_hash=", 0) == 0);
  CHECK(text[1] == "x,value,quantity,alpha,sigma,lambda,r,t");
  CHECK(text[2].find(",u,0.5,0.5,0,1,") != std::string::npos);

  const auto side = nlohmann::json::parse(slurp(scratch_dir() / "met.json"));
  const RunConfig original = parse({"met", "--alpha", "0.5", "--sigma", "0.5", "--r", "1.0", "--domain", "0,1", "--n",
                                    "400", "--out", csv, "--gnuplot"});
  CHECK(from_json(side.at("config")) == original);
  CHECK(side.at("config_hash") == config_hash(original));
  CHECK(side.at("diagnostics").at("rcond").get<double>() > 0.0);
  CHECK(side.contains("wall_clock_seconds"));
  CHECK(fs::exists(scratch_dir() / "met.gp"));
}

TEST_CASE("repeated runs produce byte-identical CSV files") {
  const std::vector<std::vector<std::string>> commands{
      {"met", "--alpha", "0.7", "--sigma", "0.5", "--n", "100"},
      {"ep", "--alpha", "1.5", "--sigma", "1", "--n", "100"},
      {"fpe", "--alpha", "1", "--sigma", "1", "--r", "0.1", "--n", "100", "--snapshot", "0.5"},
      {"stationary", "--lambda", "0.5", "--domain", "0,3"},
      {"exitprob", "--lambda", "1", "--n", "50"},
      {"met", "--lambda", "1", "--n", "200"},
      {"path", "--lambda", "1", "--time", "1", "--dt", "1e-3", "--seed", "4"},
      {"path", "--alpha", "1.2", "--sigma", "0.5", "--time", "1"},
      {"validate", "--alpha", "0.5", "--sigma", "0.5", "--paths", "500", "--n", "100", "--seed", "2"},
  };
  int k = 0;
  for (auto args : commands) {
    const std::string a = out_path("det_a" + std::to_string(k) + ".csv");
    const std::string b = out_path("det_b" + std::to_string(k) + ".csv");
    ++k;
    auto first = args, second = args;
    first.insert(first.end(), {"--out", a});
    second.insert(second.end(), {"--out", b});
    const auto r1 = invoke(first);
    const auto r2 = invoke(second);
    CAPTURE(args[0]);
    CAPTURE(r1.err);
    REQUIRE(r1.code == 0);
    REQUIRE(r2.code == 0);
    CHECK(slurp(a) == slurp(b));
    CHECK(lines(slurp(a)).size() > 2);
  }
}

TEST_CASE("exit codes") {
  const auto threshold = invoke({"stationary", "--lambda", "1.5", "--out", out_path("st.csv")});
  CHECK(threshold.code == kThresholdError);
  CHECK(threshold.err.find("lambda < sqrt(2)") != std::string::npos);
  CHECK(threshold.err.find("error[threshold]") != std::string::npos);
  CHECK_FALSE(fs::exists(scratch_dir() / "st.csv"));

  const auto mismatch = invoke({"validate", "--sigma", "0.5", "--alpha", "0.5", "--domain", "0,1", "--mc-domain", "0,2"});
  CHECK(mismatch.code == kConfigError);
  CHECK(mismatch.err.find("error[config]") != std::string::npos);

  CHECK(invoke({"nonsense"}).code == kConfigError);
  CHECK(invoke({"met", "--sigma", "0.5", "--lambda", "1"}).code == kConfigError);
  CHECK(invoke({"fpe", "--sigma", "1", "--x0", "0.02", "--out", out_path("fpe_edge.csv")}).code == kConfigError);
  CHECK(invoke({"validate", "--sigma", "1e-9", "--alpha", "1.5", "--paths", "10", "--t-max", "0.01", "--n", "20",
                "--out", out_path("cens.csv")})
            .code == kSolverError);
  const auto help = invoke({"--help"});
  CHECK(help.code == 0);
  CHECK(help.out.find("--alpha") != std::string::npos);
}

TEST_CASE("validate reports the oracle pairing") {
  const auto res = invoke({"validate", "--alpha", "0.5", "--sigma", "0.5", "--r", "1", "--x0", "0.5", "--paths", "4000",
                           "--n", "200", "--out", out_path("val.csv")});
  REQUIRE(res.code == 0);
  CHECK(res.out.find("validate met:") != std::string::npos);
  CHECK(res.out.find("validate ep:") != std::string::npos);
  CHECK(res.out.find("FAIL") == std::string::npos);
  const auto side = nlohmann::json::parse(slurp(scratch_dir() / "val.json"));
  CHECK(side["diagnostics"]["met"]["pass"].get<bool>());

  const auto gauss = invoke({"validate", "--lambda", "1", "--x0", "0.5", "--epsilon", "1e-3", "--paths", "2000",
                             "--out", out_path("valg.csv")});
  REQUIRE(gauss.code == 0);
  CHECK(gauss.out.find("validate ep:") != std::string::npos);
  CHECK(gauss.out.find("FAIL") == std::string::npos);
}

TEST_CASE("sweep writes one CSV per value and a combined file") {
  const std::string base = out_path("sw/met.csv");
  const auto res = invoke({"sweep", "met", "--axis", "alpha=0.1,0.4,0.7,1.0", "--sigma", "0.5", "--n", "60", "--out", base});
  REQUIRE(res.code == 0);
  for (const char* v : {"0.1", "0.4", "0.7", "1"}) {
    CHECK(fs::exists(scratch_dir() / "sw" / (std::string("met_alpha_") + v + ".csv")));
    CHECK(fs::exists(scratch_dir() / "sw" / (std::string("met_alpha_") + v + ".json")));
  }
  const auto combined = lines(slurp(base));
  CHECK(combined.size() == 2 + 4 * 60);
  CHECK(fs::exists(scratch_dir() / "sw" / "met.json"));

  const std::string par = out_path("sw2/met.csv");
  REQUIRE(invoke({"sweep", "met", "--axis", "alpha=0.1,0.4,0.7,1.0", "--sigma", "0.5", "--n", "60", "--out", par, "--jobs", "3"})
              .code == 0);
  const auto parallel = lines(slurp(par));
  CHECK(std::vector<std::string>(parallel.begin() + 1, parallel.end()) ==
        std::vector<std::string>(combined.begin() + 1, combined.end()));

  const auto bad = invoke({"sweep", "stationary", "--axis", "lambda=0.5,1.5", "--out", out_path("sw3/st.csv")});
  CHECK(bad.code == kThresholdError);
  CHECK(fs::exists(scratch_dir() / "sw3" / "st_lambda_0.5.csv"));
}

TEST_CASE("output directory environment variable") {
  const fs::path root = scratch_dir() / "envroot";
  ::setenv(kOutputDirEnv, root.c_str(), 1);
  const auto res = invoke({"stationary", "--lambda", "1", "--out", "nested/q.csv"});
  ::unsetenv(kOutputDirEnv);
  REQUIRE(res.code == 0);
  CHECK(fs::exists(root / "nested" / "q.csv"));
  CHECK(fs::exists(root / "nested" / "q.json"));
}

TEST_CASE("the executable maps errors to exit statuses") {
  const char* exe = std::getenv("LEVYEXIT_CLI");
  if (exe == nullptr) return;
  const std::string quiet = " > /dev/null 2>&1";
  const int st = std::system((std::string(exe) + " stationary --lambda 1.5" + quiet).c_str());
  CHECK(WEXITSTATUS(st) == 4);
  const int cfg = std::system((std::string(exe) + " met --alpha 7 --sigma 1" + quiet).c_str());
  CHECK(WEXITSTATUS(cfg) == 2);
  const std::string ok = std::string(exe) + " stationary --lambda 1 --out " + out_path("exe_q.csv") + quiet;
  CHECK(WEXITSTATUS(std::system(ok.c_str())) == 0);
}
