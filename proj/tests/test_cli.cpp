#include <doctest.h>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "chainlab/cli.hpp"
#include "chainlab/scenario.hpp"
#include "chainlab/spectral.hpp"
#include "chainlab/verify.hpp"

using namespace chainlab;

namespace {

const std::string kConfigs = CHAINLAB_CONFIG_DIR;

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "chainlab");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Run r;
  r.code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string write_temp(const std::string& name, const std::string& body) {
  std::ofstream f(name);
  f << body;
  return name;
}

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

const char* kSmall = "alpha = 4\nomega = 1\nd = 1\nn_cars = 20\nleader.v = 1\nic.kind = perturbed\n"
                     "ic.theta = 0.1\nhorizon = 20\ndt = 0.01\nsample_stride = 50\n";

}  // namespace

TEST_CASE("help lists every key and exit code") {
  const Run r = run({"--help"});
  CHECK(r.code == kExitOk);
  for (const auto& k : config_keys()) CHECK(r.out.find(k.name) != std::string::npos);
  for (const char* code : {"  0  ", "  1  ", "  2  ", "  3  "}) CHECK(r.out.find(code) != std::string::npos);
  for (const auto& s : suite_names()) CHECK(r.out.find(s) != std::string::npos);
}

TEST_CASE("command line errors") {
  CHECK(run({}).code == kExitParseError);
  CHECK(run({"bogus"}).code == kExitParseError);
  CHECK(run({"simulate"}).code == kExitParseError);
  CHECK(run({"simulate", "--config", "no/such/file.conf"}).code == kExitParseError);
}

TEST_CASE("simulate a stable scenario") {
  const std::string out_path = "test_cli_traj.csv";
  const Run r = run({"simulate", "--config", kConfigs + "/stable.conf", "--out", out_path});
  REQUIRE(r.code == kExitOk);
  const auto j = nlohmann::json::parse(r.out);
  const Margin m = margin_theorem1(0.1, 0.0, 0.0, ControlParams{4.0, 1.0, 1.0}, 1.0);
  CHECK(j["I_hat"].get<double>() >= m.lower_bound - 1e-6);
  CHECK(j["S_hat"].get<double>() <= m.upper_bound + 1e-6);
  CHECK(j["cars"].get<int>() == 100);
  CHECK(j["first_collision"].is_null());
  const std::string csv = slurp(out_path);
  CHECK(csv.rfind("t,k,r,v,q\n", 0) == 0);
  std::remove(out_path.c_str());
}

TEST_CASE("simulate is a pure function of its config") {
  const std::string cfg = write_temp("test_cli_small.conf", kSmall);
  const Run a = run({"simulate", "--config", cfg});
  const Run b = run({"simulate", "--config", cfg});
  CHECK(a.code == kExitOk);
  CHECK(a.out == b.out);
  CHECK(a.out.size() > 100);

  const std::string report = "test_cli_report.json";
  CHECK(run({"simulate", "--config", cfg, "--report", report, "--out", "test_cli_small.csv"}).code == kExitOk);
  CHECK(nlohmann::json::parse(slurp(report))["cars"].get<int>() == 20);
  std::remove(report.c_str());
  std::remove("test_cli_small.csv");
  std::remove(cfg.c_str());
}

TEST_CASE("simulate reports parse and domain errors") {
  const std::string missing = write_temp("test_cli_missing.conf",
                                         "alpha = 4\nd = 1\nn_cars = 5\nic.kind = equilibrium\nhorizon = 1\n");
  const Run r1 = run({"simulate", "--config", missing});
  CHECK(r1.code == kExitParseError);
  CHECK(r1.err.find("omega") != std::string::npos);

  const std::string syntax = write_temp("test_cli_syntax.conf", "alpha = 4\nomega = 1\nd 1\n");
  const Run r2 = run({"simulate", "--config", syntax});
  CHECK(r2.code == kExitParseError);
  CHECK(r2.err.find("line 3") != std::string::npos);

  for (const char* alpha : {"0", "-1"}) {
    const std::string bad = write_temp("test_cli_alpha.conf", std::string("alpha = ") + alpha +
                                                                  "\nomega = 1\nd = 1\nn_cars = 5\nic.kind = equilibrium\nhorizon = 1\n");
    const Run r3 = run({"simulate", "--config", bad});
    CHECK(r3.code == kExitDomainError);
    CHECK(r3.err.find("alpha") != std::string::npos);
  }

  const std::string dt = write_temp("test_cli_dt.conf",
                                    "alpha = 4\nomega = 1\nd = 1\nn_cars = 5\nic.kind = equilibrium\nhorizon = 1\ndt = 0.1\n");
  CHECK(run({"simulate", "--config", dt}).code == kExitDomainError);

  for (const char* f : {"test_cli_missing.conf", "test_cli_syntax.conf", "test_cli_alpha.conf", "test_cli_dt.conf"}) {
    std::remove(f);
  }
}

TEST_CASE("verify") {
  const Run ok = run({"verify", "oracle", "--seed", "42"});
  CHECK(ok.code == kExitOk);
  CHECK(ok.out.find("[PASS]") != std::string::npos);
  CHECK(ok.out.find("[FAIL]") == std::string::npos);
  CHECK(ok.out.find("42") != std::string::npos);
  CHECK(run({"verify", "resonance"}).code == kExitOk);

  const Run unknown = run({"verify", "nonsense"});
  CHECK(unknown.code == kExitParseError);
  CHECK(unknown.err.find("oracle") != std::string::npos);
  CHECK(run({"verify"}).code == kExitParseError);
}

TEST_CASE("spectrum") {
  const Run r = run({"spectrum", "--config", kConfigs + "/spectrum.conf"});
  REQUIRE(r.code == kExitOk);
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  CHECK(line == "re,im,inside");
  bool witness = false;
  long rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    const double re = std::stod(line.substr(0, line.find(',')));
    if (re > 0.0 && line.back() == '1') witness = true;
  }
  CHECK(witness);
  CHECK(rows == 201 * 201);
}

TEST_CASE("density") {
  const std::string out_path = "test_cli_density.csv";
  const Run r = run({"density", "--config", kConfigs + "/density.conf", "--out", out_path});
  REQUIRE(r.code == kExitOk);
  const auto grab = [&](const std::string& key) {
    const auto pos = r.out.find(key + "=");
    REQUIRE(pos != std::string::npos);
    return std::stod(r.out.substr(pos + key.size() + 1));
  };
  CHECK(grab("L0dot") == doctest::Approx(0.0));
  CHECK(grab("max|L_N-L_N(0)|") <= grab("5a/N"));
  CHECK(slurp(out_path).rfind("t,mean_length,law,abs_error\n", 0) == 0);
  std::remove(out_path.c_str());
}

TEST_CASE("saddle table") {
  const std::string cfg = write_temp("test_cli_saddle.conf",
                                     "alpha = 1\nomega = 1\nd = 1\nn_cars = 60\nleader.v = 1\nic.kind = kick\n"
                                     "ic.epsilon = 0.001\nhorizon = 100\ndt = 0.01\nsample_stride = 10\nsaddle.k_max = 40\n");
  const Run r = run({"saddle", "--config", cfg});
  REQUIRE(r.code == kExitOk);
  CHECK(r.out.rfind("k,predicted,simulated\n1,", 0) == 0);
  CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 41);

  const std::string nokick = write_temp("test_cli_saddle.conf", kSmall);
  CHECK(run({"saddle", "--config", nokick}).code == kExitDomainError);
  std::remove(cfg.c_str());
}

TEST_CASE("sweep is deterministic across worker counts") {
  const Run a = run({"sweep", "--config", kConfigs + "/sweep_small.conf"});
  const Run b = run({"sweep", "--config", kConfigs + "/sweep_small.conf", "--workers", "3"});
  REQUIRE(a.code == kExitOk);
  CHECK(a.out == b.out);
  CHECK(std::count(a.out.begin(), a.out.end(), '\n') == 13);
  CHECK(run({"sweep", "--workers", "0"}).code == kExitParseError);
}

TEST_CASE("output file errors") {
  CHECK(run({"spectrum", "--config", kConfigs + "/spectrum.conf", "--out", "no/such/dir/x.csv"}).code ==
        kExitParseError);
}
