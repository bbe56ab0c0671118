#include "chainlab/scenario.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "chainlab/integrator.hpp"

namespace chainlab {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string where(int line) { return line > 0 ? "line " + std::to_string(line) + ": " : ""; }

bool known_key(const std::string& key) {
  for (const auto& k : config_keys()) {
    if (k.name == key) return true;
  }
  return false;
}

PerturbationPattern pattern_from(const Config& cfg) {
  const std::string p = cfg.get_string_or("ic.pattern", "alternating");
  if (p == "alternating") return PerturbationPattern::Alternating;
  if (p == "uniform") return PerturbationPattern::Uniform;
  throw ConfigError("ic.pattern must be 'alternating' or 'uniform', got '" + p + "'", 0);
}

}  // namespace

ConfigError::ConfigError(const std::string& message, int line)
    : std::runtime_error(where(line) + message), line_(line) {}

const std::vector<ConfigKey>& config_keys() {
  static const std::vector<ConfigKey> keys = {
      {"alpha", "friction coefficient alpha (1/time)"},
      {"omega", "stiffness root omega (1/time)"},
      {"d", "target headway d (length)"},
      {"n_cars", "number of following cars N"},
      {"leader.kind", "constant | sinusoid | raised_cosine | gaussian_bump (default constant)"},
      {"leader.v", "leader cruise velocity v (default 0)"},
      {"leader.amplitude", "leader deviation amplitude A (length)"},
      {"leader.omega0", "leader angular frequency (sinusoid) or rate (bump profiles)"},
      {"ic.kind", "equilibrium | perturbed | gap_perturbed | summable | kick"},
      {"ic.theta", "position (or gap) perturbation theta (default 0)"},
      {"ic.beta", "velocity perturbation beta (default 0)"},
      {"ic.epsilon", "velocity kick of car 1 (kick only)"},
      {"ic.rho", "geometric decay ratio (summable only, default 0.5)"},
      {"ic.pattern", "alternating | uniform sign pattern (default alternating)"},
      {"horizon", "simulated time span"},
      {"dt", "integration step (default 1e-3)"},
      {"sample_stride", "store every n-th step (default 10)"},
      {"seed", "RNG seed for randomized verification suites"},
      {"spectrum.box", "half-width of the spectrum grid (default 2 omega)"},
      {"spectrum.resolution", "spectrum grid spacing (default box / 200)"},
      {"saddle.mu", "ray slope mu (default 2 / alpha)"},
      {"saddle.k_min", "first index of the saddle table (default 1)"},
      {"saddle.k_max", "last index of the saddle table (default: all covered indices)"},
      {"sweep.alpha_min", "sweep grid lower alpha (default 0.2)"},
      {"sweep.alpha_max", "sweep grid upper alpha (default 4)"},
      {"sweep.alpha_steps", "sweep grid alpha points (default 20)"},
      {"sweep.omega_min", "sweep grid lower omega (default 0.2)"},
      {"sweep.omega_max", "sweep grid upper omega (default 2)"},
      {"sweep.omega_steps", "sweep grid omega points (default 20)"},
      {"sweep.slope_pos", "Unstable threshold on the growth slope (default 0.02)"},
      {"sweep.slope_neg", "Stable threshold on the growth slope (default -0.02)"},
      {"sweep.k_cap", "upper index of the growth fit (default 80)"},
      {"density.t_max", "end of the mean-length comparison window (default 10)"},
  };
  return keys;
}

Config Config::parse(std::istream& in) {
  Config cfg;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string body = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ConfigError("expected 'key = value', got '" + body + "'", line);
    const std::string key = trim(body.substr(0, eq));
    const std::string value = trim(body.substr(eq + 1));
    if (key.empty()) throw ConfigError("empty key", line);
    if (value.empty()) throw ConfigError("empty value for '" + key + "'", line);
    if (!known_key(key)) throw ConfigError("unknown key '" + key + "'", line);
    if (cfg.entries_.count(key)) throw ConfigError("duplicate key '" + key + "'", line);
    cfg.entries_[key] = Entry{value, line};
  }
  return cfg;
}

Config Config::parse_string(const std::string& text) {
  std::istringstream in(text);
  return parse(in);
}

Config Config::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'", 0);
  return parse(in);
}

bool Config::has(const std::string& key) const { return entries_.count(key) != 0; }

const Config::Entry& Config::require(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) throw ConfigError("missing required key '" + key + "'", 0);
  return it->second;
}

std::string Config::get_string(const std::string& key) const { return require(key).value; }

std::string Config::get_string_or(const std::string& key, const std::string& fallback) const {
  return has(key) ? get_string(key) : fallback;
}

double Config::get_double(const std::string& key) const {
  const Entry& e = require(key);
  double x = 0.0;
  const char* first = e.value.data();
  const char* last = first + e.value.size();
  const auto res = std::from_chars(first, last, x);
  if (res.ec != std::errc() || res.ptr != last || !std::isfinite(x)) {
    throw ConfigError("'" + key + "' expects a finite number, got '" + e.value + "'", e.line);
  }
  return x;
}

double Config::get_double_or(const std::string& key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

int Config::get_int(const std::string& key) const {
  const Entry& e = require(key);
  int x = 0;
  const char* first = e.value.data();
  const char* last = first + e.value.size();
  const auto res = std::from_chars(first, last, x);
  if (res.ec != std::errc() || res.ptr != last) {
    throw ConfigError("'" + key + "' expects an integer, got '" + e.value + "'", e.line);
  }
  return x;
}

int Config::get_int_or(const std::string& key, int fallback) const {
  return has(key) ? get_int(key) : fallback;
}

std::uint64_t Config::get_u64_or(const std::string& key, std::uint64_t fallback) const {
  if (!has(key)) return fallback;
  const Entry& e = require(key);
  std::uint64_t x = 0;
  const char* first = e.value.data();
  const char* last = first + e.value.size();
  const auto res = std::from_chars(first, last, x);
  if (res.ec != std::errc() || res.ptr != last) {
    throw ConfigError("'" + key + "' expects an unsigned integer, got '" + e.value + "'", e.line);
  }
  return x;
}

void Config::set(const std::string& key, const std::string& value) {
  if (!known_key(key)) throw ConfigError("unknown key '" + key + "'", 0);
  entries_[key] = Entry{value, 0};
}

LeaderSpec leader_from_config(const Config& cfg) {
  const std::string kind = cfg.get_string_or("leader.kind", "constant");
  const double v = cfg.get_double_or("leader.v", 0.0);
  if (kind == "constant") return ConstantVelocity{v};
  if (kind == "sinusoid") {
    return Sinusoid{v, cfg.get_double("leader.amplitude"), cfg.get_double("leader.omega0")};
  }
  if (kind == "raised_cosine" || kind == "gaussian_bump") {
    return BoundedDeviation{v, cfg.get_double("leader.amplitude"),
                            kind == "raised_cosine" ? BumpShape::RaisedCosineTrain : BumpShape::GaussianBump,
                            cfg.get_double("leader.omega0")};
  }
  throw ConfigError("unknown leader.kind '" + kind + "'", 0);
}

InitialConditionSpec initial_condition_from_config(const Config& cfg) {
  const int n = cfg.get_int("n_cars");
  const std::string kind = cfg.get_string("ic.kind");
  const double v = cfg.get_double_or("leader.v", 0.0);
  const double theta = cfg.get_double_or("ic.theta", 0.0);
  const double beta = cfg.get_double_or("ic.beta", 0.0);
  if (kind == "equilibrium") return EquilibriumLattice{n, v};
  if (kind == "perturbed") return PerturbedLattice{n, v, theta, beta, pattern_from(cfg)};
  if (kind == "gap_perturbed") return GapPerturbed{n, theta, beta, pattern_from(cfg)};
  if (kind == "summable") return SummableDecay{n, v, theta, beta, cfg.get_double_or("ic.rho", 0.5)};
  if (kind == "kick") return SingleVelocityKick{n, v, cfg.get_double("ic.epsilon")};
  throw ConfigError("unknown ic.kind '" + kind + "'", 0);
}

Scenario scenario_from_config(const Config& cfg) {
  Scenario s;
  s.params = ControlParams{cfg.get_double("alpha"), cfg.get_double("omega"), cfg.get_double("d")};
  s.leader = leader_from_config(cfg);
  s.ic = initial_condition_from_config(cfg);
  s.horizon = cfg.get_double("horizon");
  s.dt = cfg.get_double_or("dt", kDefaultDt);
  s.stride = cfg.get_int_or("sample_stride", kDefaultStride);
  return s;
}

SweepGrid sweep_grid_from_config(const Config& cfg) {
  SweepGrid g;
  g.alpha_min = cfg.get_double_or("sweep.alpha_min", g.alpha_min);
  g.alpha_max = cfg.get_double_or("sweep.alpha_max", g.alpha_max);
  g.alpha_steps = cfg.get_int_or("sweep.alpha_steps", g.alpha_steps);
  g.omega_min = cfg.get_double_or("sweep.omega_min", g.omega_min);
  g.omega_max = cfg.get_double_or("sweep.omega_max", g.omega_max);
  g.omega_steps = cfg.get_int_or("sweep.omega_steps", g.omega_steps);
  return g;
}

SweepTemplate sweep_template_from_config(const Config& cfg) {
  SweepTemplate t;
  t.d = cfg.get_double_or("d", t.d);
  if (cfg.has("leader.kind") || cfg.has("leader.v")) t.leader = leader_from_config(cfg);
  if (cfg.has("ic.kind")) t.ic = initial_condition_from_config(cfg);
  t.horizon = cfg.get_double_or("horizon", t.horizon);
  t.dt = cfg.get_double_or("dt", t.dt);
  t.stride = cfg.get_int_or("sample_stride", t.stride);
  t.k_cap = cfg.get_int_or("sweep.k_cap", t.k_cap);
  return t;
}

SweepThresholds sweep_thresholds_from_config(const Config& cfg) {
  SweepThresholds th;
  th.slope_pos = cfg.get_double_or("sweep.slope_pos", th.slope_pos);
  th.slope_neg = cfg.get_double_or("sweep.slope_neg", th.slope_neg);
  return th;
}

}  // namespace chainlab
