#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "chainlab/model.hpp"
#include "chainlab/phase_sweep.hpp"

namespace chainlab {

/// Malformed or incomplete scenario file. line() is 1-based, or 0 when the
/// problem is not tied to a line (a missing key).
class ConfigError : public std::runtime_error {
public:
  ConfigError(const std::string& message, int line);
  int line() const { return line_; }

private:
  int line_;
};

struct ConfigKey {
  std::string name;
  std::string help;
};

/// Every key accepted in a scenario file.
const std::vector<ConfigKey>& config_keys();

/// Flat `key = value` file; `#` starts a comment; blank lines are ignored.
/// Unknown and duplicate keys are errors.
class Config {
public:
  static Config parse(std::istream& in);
  static Config parse_string(const std::string& text);
  static Config load(const std::string& path);

  bool has(const std::string& key) const;
  std::string get_string(const std::string& key) const;
  std::string get_string_or(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key) const;
  double get_double_or(const std::string& key, double fallback) const;
  int get_int(const std::string& key) const;
  int get_int_or(const std::string& key, int fallback) const;
  std::uint64_t get_u64_or(const std::string& key, std::uint64_t fallback) const;

  /// Overrides or adds a key programmatically (line 0).
  void set(const std::string& key, const std::string& value);

private:
  struct Entry {
    std::string value;
    int line = 0;
  };
  const Entry& require(const std::string& key) const;
  std::map<std::string, Entry> entries_;
};

/// Everything simulate() needs.
struct Scenario {
  ControlParams params;
  LeaderSpec leader;
  InitialConditionSpec ic;
  double horizon = 0.0;
  double dt = 0.0;
  int stride = 1;
};

inline constexpr std::uint64_t kDefaultSeed = 20240917;
inline constexpr int kDefaultStride = 10;

/// Leader from `leader.*`; kind defaults to constant, v to 0.
LeaderSpec leader_from_config(const Config& cfg);

/// Initial condition from `ic.*` and `n_cars`; lattice families take their
/// reference velocity from `leader.v`.
InitialConditionSpec initial_condition_from_config(const Config& cfg);

/// Requires alpha, omega, d, n_cars, ic.kind and horizon; dt defaults to
/// 1e-3 and sample_stride to 10. Only the file format is checked here: value
/// ranges are left to the model.
Scenario scenario_from_config(const Config& cfg);

/// Sweep grid, template and thresholds from `sweep.*` plus the shared
/// scenario keys (alpha and omega are ignored; the grid supplies them).
SweepGrid sweep_grid_from_config(const Config& cfg);
SweepTemplate sweep_template_from_config(const Config& cfg);
SweepThresholds sweep_thresholds_from_config(const Config& cfg);

}  // namespace chainlab
