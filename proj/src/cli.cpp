#include "chainlab/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <functional>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>

#include "chainlab/format.hpp"
#include "chainlab/integrator.hpp"
#include "chainlab/metrics.hpp"
#include "chainlab/oracle.hpp"
#include "chainlab/phase_sweep.hpp"
#include "chainlab/scenario.hpp"
#include "chainlab/spectral.hpp"
#include "chainlab/verify.hpp"

namespace chainlab {

namespace {

struct Options {
  std::string config;
  std::string out;
  std::string report;
  std::string suite;
  std::optional<std::uint64_t> seed;
  int workers = 1;
};

class OutputError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Writes to --out when given, otherwise to the console stream.
void emit(const std::string& path, std::ostream& console, const std::function<void(std::ostream&)>& body) {
  if (path.empty()) {
    body(console);
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw OutputError("cannot open output file '" + path + "'");
  body(f);
  if (!f) throw OutputError("failed writing '" + path + "'");
}

std::string help_footer() {
  std::ostringstream os;
  os << "\nScenario file keys (`key = value`, `#` comments):\n";
  for (const ConfigKey& k : config_keys()) os << "  " << k.name << "  " << k.help << '\n';
  os << "\nVerify suites:";
  for (const std::string& s : suite_names()) os << ' ' << s;
  os << " all\n";
  os << "\nExit codes:\n"
        "  0  success (all checks passed)\n"
        "  1  a verification check failed\n"
        "  2  command line or config parse error, unknown suite, I/O error\n"
        "  3  invalid parameter combination (violated model precondition)\n";
  return os.str();
}

int cmd_simulate(const Options& o, std::ostream& out) {
  const Config cfg = Config::load(o.config);
  const Scenario s = scenario_from_config(cfg);
  s.params.validate();
  const TrajectoryRecord rec = simulate(s.ic, s.params, s.leader, s.horizon, s.dt, s.stride);
  const StabilityReport rep = gap_extrema(rec);
  emit(o.out, out, [&](std::ostream& os) { write_trajectory_csv(os, rec); });
  if (!o.report.empty()) emit(o.report, out, [&](std::ostream& os) { write_report_json(os, rep); });
  if (!o.out.empty()) write_report_json(out, rep);
  return kExitOk;
}

int cmd_verify(const Options& o, std::ostream& out) {
  std::uint64_t seed = kDefaultSeed;
  if (!o.config.empty()) seed = Config::load(o.config).get_u64_or("seed", seed);
  if (o.seed) seed = *o.seed;
  std::vector<std::string> suites;
  if (o.suite == "all") {
    suites = suite_names();
  } else {
    suites.push_back(o.suite);
  }
  bool ok = true;
  for (const std::string& name : suites) {
    const SuiteResult r = run_suite(name, seed);
    print_suite(out, r);
    ok = ok && r.passed();
  }
  return ok ? kExitOk : kExitCheckFailed;
}

int cmd_spectrum(const Options& o, std::ostream& out) {
  const Config cfg = Config::load(o.config);
  const ControlParams p{cfg.get_double("alpha"), cfg.get_double("omega"), cfg.get_double_or("d", 1.0)};
  p.validate_allow_undamped();
  const double box = cfg.get_double_or("spectrum.box", 2.0 * p.omega);
  const double res = cfg.get_double_or("spectrum.resolution", box / 200.0);
  if (!(box > 0.0) || !(res > 0.0)) throw DomainError("spectrum.box and spectrum.resolution must be positive");
  const long steps = static_cast<long>(std::floor(box / res + 1e-9));
  emit(o.out, out, [&](std::ostream& os) {
    os << "re,im,inside\n";
    std::string line;
    for (long i = -steps; i <= steps; ++i) {
      for (long j = -steps; j <= steps; ++j) {
        const double re = static_cast<double>(i) * res;
        const double im = static_cast<double>(j) * res;
        line.clear();
        append_number(line, re);
        line += ',';
        append_number(line, im);
        line += in_spectrum(Complex{re, im}, p) ? ",1\n" : ",0\n";
        os << line;
      }
    }
  });
  return kExitOk;
}

int cmd_saddle(const Options& o, std::ostream& out) {
  const Config cfg = Config::load(o.config);
  const Scenario s = scenario_from_config(cfg);
  const auto* kick = std::get_if<SingleVelocityKick>(&s.ic);
  if (!kick) throw DomainError("saddle requires ic.kind = kick");
  const double mu = cfg.get_double_or("saddle.mu", 2.0 / s.params.alpha);
  const SaddleData sd = saddle_analysis(mu, s.params, kick->epsilon);
  const TrajectoryRecord rec = simulate(s.ic, s.params, s.leader, s.horizon, s.dt, s.stride);
  const std::vector<double> ray = ray_samples(rec, mu);
  const int k_min = std::max(1, cfg.get_int_or("saddle.k_min", 1));
  const int k_max = std::min(static_cast<int>(ray.size()), cfg.get_int_or("saddle.k_max", static_cast<int>(ray.size())));
  emit(o.out, out, [&](std::ostream& os) {
    os << "k,predicted,simulated\n";
    std::string line;
    for (int k = k_min; k <= k_max; ++k) {
      line = std::to_string(k) + ',';
      append_number(line, asymptotic_envelope(k, sd));
      line += ',';
      append_number(line, ray[k - 1]);
      line += '\n';
      os << line;
    }
  });
  return kExitOk;
}

int cmd_sweep(const Options& o, std::ostream& out) {
  Config cfg;
  if (!o.config.empty()) cfg = Config::load(o.config);
  const auto cells = run_sweep(sweep_grid_from_config(cfg), sweep_template_from_config(cfg),
                               sweep_thresholds_from_config(cfg), o.workers);
  emit(o.out, out, [&](std::ostream& os) { write_sweep_csv(os, cells); });
  return kExitOk;
}

int cmd_density(const Options& o, std::ostream& out) {
  Config cfg = Config::load(o.config);
  if (!cfg.has("horizon")) cfg.set("horizon", format_number(cfg.get_double_or("density.t_max", 10.0)));
  const Scenario s = scenario_from_config(cfg);
  s.params.validate();
  const double t_max = cfg.get_double_or("density.t_max", 10.0);
  const ChainState s0 = build_initial_state(s.ic, s.params, s.leader);
  const auto n = static_cast<double>(s0.cars());
  const double L0 = (s0.z.front() - s0.z.back()) / n;
  const double L0dot = (s0.v.front() - s0.v.back()) / n;
  const TrajectoryRecord rec = simulate(s.ic, s.params, s.leader, t_max, s.dt, s.stride);
  double worst = 0.0, drift = 0.0;
  emit(o.out, out, [&](std::ostream& os) {
    os << "t,mean_length,law,abs_error\n";
    std::string line;
    for (double t : rec.times) {
      const double ln = mean_length(rec, t);
      const double law = mean_length_law(L0, L0dot, s.params.alpha, t);
      worst = std::max(worst, std::abs(ln - law));
      drift = std::max(drift, std::abs(ln - L0));
      line.clear();
      append_number(line, t);
      line += ',';
      append_number(line, ln);
      line += ',';
      append_number(line, law);
      line += ',';
      append_number(line, std::abs(ln - law));
      line += '\n';
      os << line;
    }
  });
  if (!o.out.empty()) {
    const auto vref = reference_velocity(s.ic);
    const double a = vref ? equilibrium_spacing(s.params, *vref) : s.params.d;
    out << "N=" << s0.cars() << " L0=" << format_number(L0) << " L0dot=" << format_number(L0dot)
        << " max|L_N-L|=" << format_number(worst) << " max|L_N-L_N(0)|=" << format_number(drift)
        << " 5a/N=" << format_number(5.0 * a / n) << '\n';
  }
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Numerical lab for the one-way damped car-following chain"};
  app.require_subcommand(1);
  app.footer(help_footer());
  Options o;

  auto add_config = [&](CLI::App* sub, bool required) {
    auto* opt = sub->add_option("--config", o.config, "scenario file");
    if (required) opt->required();
  };
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--out", o.out, "output file (default: stdout)");
    sub->add_option("--seed", o.seed, "RNG seed");
  };

  std::function<int(const Options&, std::ostream&)> action;

  auto* simulate_cmd = app.add_subcommand("simulate", "integrate a scenario; CSV t,k,r,v,q plus a JSON report");
  add_config(simulate_cmd, true);
  add_common(simulate_cmd);
  simulate_cmd->add_option("--report", o.report, "also write the JSON report here");
  simulate_cmd->callback([&] { action = cmd_simulate; });

  auto* verify_cmd = app.add_subcommand("verify", "run a verification suite");
  verify_cmd->add_option("suite", o.suite, "suite name or 'all'")->required();
  add_config(verify_cmd, false);
  add_common(verify_cmd);
  verify_cmd->callback([&] { action = cmd_verify; });

  auto* spectrum_cmd = app.add_subcommand("spectrum", "CSV re,im,inside over a square grid");
  add_config(spectrum_cmd, true);
  add_common(spectrum_cmd);
  spectrum_cmd->callback([&] { action = cmd_spectrum; });

  auto* saddle_cmd = app.add_subcommand("saddle", "CSV k,predicted,simulated along the ray t = mu k");
  add_config(saddle_cmd, true);
  add_common(saddle_cmd);
  saddle_cmd->callback([&] { action = cmd_saddle; });

  auto* sweep_cmd = app.add_subcommand("sweep", "phase-diagram sweep over (alpha, omega)");
  add_config(sweep_cmd, false);
  add_common(sweep_cmd);
  sweep_cmd->add_option("--workers", o.workers, "worker threads")->check(CLI::PositiveNumber);
  sweep_cmd->callback([&] { action = cmd_sweep; });

  auto* density_cmd = app.add_subcommand("density", "mean chain length against its limit law");
  add_config(density_cmd, true);
  add_common(density_cmd);
  density_cmd->callback([&] { action = cmd_density; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitParseError;
  }

  try {
    return action(o, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitParseError;
  } catch (const UnknownSuite& e) {
    err << e.what() << "; known suites:";
    for (const auto& s : suite_names()) err << ' ' << s;
    err << " all\n";
    return kExitParseError;
  } catch (const DomainError& e) {
    err << "invalid parameters: " << e.what() << '\n';
    return kExitDomainError;
  } catch (const OutputError& e) {
    err << e.what() << '\n';
    return kExitParseError;
  }
}

}  // namespace chainlab
