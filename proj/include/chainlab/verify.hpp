#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace chainlab {

struct CheckResult {
  std::string name;
  double measured = 0.0;
  double bound = 0.0;
  std::string relation;  // "<=", ">=", "<", ">", "==" or "true"
  bool passed = false;
};

struct SuiteResult {
  std::string suite;
  std::uint64_t seed = 0;
  std::vector<CheckResult> checks;
  std::vector<std::string> notes;  // informational lines, never asserted
  double seconds = 0.0;

  bool passed() const;
};

class UnknownSuite : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// theorem1..theorem5, density, resonance, spectrum, saddle, oracle, sweep,
/// corollary2.
const std::vector<std::string>& suite_names();

/// Runs one suite. The seed only affects randomized suites (oracle).
/// Throws UnknownSuite for names not in suite_names().
SuiteResult run_suite(const std::string& name, std::uint64_t seed);

/// One line per check: `[PASS] name: measured <= bound`, then notes.
void print_suite(std::ostream& out, const SuiteResult& result);

}  // namespace chainlab
