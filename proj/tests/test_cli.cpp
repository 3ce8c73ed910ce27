#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "json.hpp"
#include "mgw/run_config.hpp"
#include "test_util.hpp"

using namespace mgw;
using nlohmann::json;

namespace {

namespace fs = std::filesystem;

fs::path data_dir() {
  if (const char* env = std::getenv("MGW_DATA")) return fs::path(env);
  return fs::path(MGW_TEST_DATA_DIR);
}

std::string law_path(const char* name) {
  return (data_dir() / name).string();
}

struct CapturedRun {
  int exit_code = 0;
  std::string out;
};

CapturedRun run_cli(const std::vector<std::string>& args) {
  std::ostringstream captured;
  auto* old = std::cout.rdbuf(captured.rdbuf());
  CapturedRun result;
  result.exit_code = mgw::cli::run(args);
  std::cout.rdbuf(old);
  result.out = captured.str();
  return result;
}

}  // namespace

TEST_CASE("validate reports the law constants") {
  auto result = run_cli({"validate", "--law", law_path("lawA.json")});
  CHECK(result.exit_code == 0);
  json doc = json::parse(result.out);
  CHECK(doc["valid"] == true);
  CHECK(doc["mu"] == doctest::Approx(0.8));
  CHECK(doc["mu_exact"] == "4/5");
  CHECK(doc["criticality"] == "subcritical");
  CHECK(doc["r"] == 0);
  CHECK(doc["r_tilde"] == 0);
}

TEST_CASE("validate rejects a degenerate law with exit code 1") {
  auto tmp = fs::temp_directory_path() / "mgw_degenerate_law.json";
  {
    std::ofstream out(tmp);
    out << R"({"p": {"0": "1/2", "1": "1/2"}, "q": {"0": "1"}})";
  }
  auto result = run_cli({"validate", "--law", tmp.string()});
  CHECK(result.exit_code == 1);
  json doc = json::parse(result.out);
  CHECK(doc["valid"] == false);
  fs::remove(tmp);
}

TEST_CASE("usage errors exit with code 2") {
  CHECK(run_cli({"validate"}).exit_code == 2);
  CHECK(run_cli({"sample", "--law", law_path("lawA.json"), "--measure",
                 "nonsense"})
            .exit_code == 2);
  CHECK(run_cli({"frobnicate"}).exit_code == 2);
  CHECK(run_cli({"verify", "--law", law_path("lawA.json"), "--regime",
                 "poly-crit", "--depth", "2"})
            .exit_code == 2);  // regime mismatch: law A is subcritical
}

TEST_CASE("verify: exact subcritical change of measure passes") {
  auto result =
      run_cli({"verify", "--law", law_path("lawA.json"), "--regime",
               "poly-sub", "--ell", "1", "--depth", "2", "--exact"});
  CHECK(result.exit_code == 0);
  json doc = json::parse(result.out);
  CHECK(doc["pass"] == true);
  CHECK(doc["max_gap"] == 0.0);
  CHECK(doc["checks"].size() == 2);
}

TEST_CASE("sample runs are replayable byte for byte") {
  auto tmp1 = fs::temp_directory_path() / "mgw_sample_1.txt";
  auto tmp2 = fs::temp_directory_path() / "mgw_sample_2.txt";
  std::vector<std::string> args = {
      "sample", "--law", law_path("lawA.json"), "--measure", "poly-ell",
      "--ell", "1",     "--depth", "3",         "--count",   "10",
      "--seed", "42",   "--out",   tmp1.string()};
  CHECK(run_cli(args).exit_code == 0);
  args.back() = tmp2.string();
  CHECK(run_cli(args).exit_code == 0);
  std::ifstream in1(tmp1), in2(tmp2);
  std::stringstream buf1, buf2;
  buf1 << in1.rdbuf();
  buf2 << in2.rdbuf();
  CHECK(buf1.str() == buf2.str());
  CHECK(!buf1.str().empty());
  fs::remove(tmp1);
  fs::remove(tmp2);
}

TEST_CASE("thread fan-out does not change the sampled bytes") {
  auto base = run_cli({"sample", "--law", law_path("lawA.json"), "--measure",
                       "base", "--depth", "2", "--count", "20", "--seed",
                       "7"});
  setenv("MGW_THREADS", "4", 1);
  auto threaded = run_cli({"sample", "--law", law_path("lawA.json"),
                           "--measure", "base", "--depth", "2", "--count",
                           "20", "--seed", "7"});
  unsetenv("MGW_THREADS");
  CHECK(base.exit_code == 0);
  CHECK(threaded.exit_code == 0);
  CHECK(base.out == threaded.out);
}

TEST_CASE("moments emits the documented CSV header") {
  auto result = run_cli({"moments", "--law", law_path("lawC.json"), "--ell",
                         "2", "--p-max", "5"});
  CHECK(result.exit_code == 0);
  CHECK(result.out.rfind("regime,ell,p,exact_value,asymptotic_prediction,"
                         "ratio\n", 0) == 0);
  CHECK(result.out.find("supercritical,1,1,") != std::string::npos);
}

TEST_CASE("kappa prints 17 significant digits") {
  auto result = run_cli(
      {"kappa", "--law", law_path("lawB.json"), "--s", "0.5"});
  CHECK(result.exit_code == 0);
  json doc = json::parse(result.out);
  double kappa = doc["kappa"];
  CHECK(std::abs(kappa - (2.0 - std::sqrt(3.0))) < 1e-12);
  CHECK(result.out.find("0.2679491924311") != std::string::npos);
  // 17 significant digits requested from the formatter
  auto start = result.out.find("0.2679491924311");
  int digits = 0;
  for (std::size_t i = start; i < result.out.size(); ++i) {
    if (std::isdigit(static_cast<unsigned char>(result.out[i]))) {
      ++digits;
    } else if (result.out[i] != '.') {
      break;
    }
  }
  CHECK(digits >= 17);
}

TEST_CASE("asymptotics emits CSV plus a verdict object") {
  auto result = run_cli({"asymptotics", "--law", law_path("lawB.json"),
                         "--kind", "gf", "--ell", "1", "--s", "0.5", "--t",
                         "0.9", "--p-max", "60"});
  CHECK(result.exit_code == 0);
  CHECK(result.out.rfind("p,value,predicted,ratio\n", 0) == 0);
  auto brace = result.out.find('{');
  REQUIRE(brace != std::string::npos);
  json verdict = json::parse(result.out.substr(brace));
  CHECK(verdict["verdict"] == "stabilized");
}

TEST_CASE("run configs round-trip through JSON") {
  mgw::cli::RunConfig config;
  config.subcommand = "verify";
  config.law_path = "x.json";
  config.regime = "poly-sub";
  config.ell = 3;
  config.s = 0.25;
  config.depth = 2;
  config.exact = true;
  config.seed = 99;
  auto restored =
      mgw::cli::RunConfig::from_json_text(config.to_json_text());
  CHECK(restored == config);
}
