#include "chainlab/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include "chainlab/format.hpp"
#include "chainlab/integrator.hpp"
#include "chainlab/metrics.hpp"
#include "chainlab/oracle.hpp"
#include "chainlab/phase_sweep.hpp"
#include "chainlab/spectral.hpp"

namespace chainlab {

namespace {

constexpr double kSlack = 1e-6;

class Checks {
public:
  explicit Checks(SuiteResult& r) : r_(r) {}

  void le(const std::string& name, double measured, double bound) { add(name, measured, bound, "<=", measured <= bound); }
  void ge(const std::string& name, double measured, double bound) { add(name, measured, bound, ">=", measured >= bound); }
  void lt(const std::string& name, double measured, double bound) { add(name, measured, bound, "<", measured < bound); }
  void gt(const std::string& name, double measured, double bound) { add(name, measured, bound, ">", measured > bound); }
  void eq(const std::string& name, double measured, double expected) {
    add(name, measured, expected, "==", measured == expected);
  }
  void near(const std::string& name, double measured, double expected, double tol) {
    add(name + " (tol " + format_short(tol) + ")", measured, expected, "~", std::abs(measured - expected) <= tol);
  }
  void truth(const std::string& name, bool ok) { add(name, ok ? 1.0 : 0.0, 1.0, "true", ok); }
  void note(const std::string& line) { r_.notes.push_back(line); }

  /// Gap window [lower - slack, upper + slack] against the report.
  void gap_window(const std::string& label, const StabilityReport& rep, double lower, double upper) {
    ge(label + ": I_hat >= lower bound - 1e-6", rep.I_hat, lower - kSlack);
    le(label + ": S_hat <= upper bound + 1e-6", rep.S_hat, upper + kSlack);
  }

private:
  void add(const std::string& name, double m, double b, const char* rel, bool ok) {
    r_.checks.push_back(CheckResult{name, m, b, rel, ok});
  }
  SuiteResult& r_;
};

// Gaps r_k(0) = d (1 + s theta (1 - rho) rho^{k-1}) and velocity steps
// s beta (1 - rho) rho^{k-1}, alternating s, measured from the leader at t = 0.
ExplicitState summable_gap_state(int cars, double d, double theta, double beta, double rho,
                                 const LeaderSpec& leader) {
  const Kinematics k0 = leader_kinematics(leader, 0.0);
  ExplicitState s;
  s.z.assign(static_cast<std::size_t>(cars) + 1, 0.0);
  s.v.assign(static_cast<std::size_t>(cars) + 1, 0.0);
  s.z[0] = k0.position;
  s.v[0] = k0.velocity;
  double w = 1.0 - rho;
  for (int k = 1; k <= cars; ++k) {
    const double sign = (k % 2 == 1) ? 1.0 : -1.0;
    s.z[k] = s.z[k - 1] - d * (1.0 + sign * theta * w);
    s.v[k] = s.v[k - 1] - sign * beta * w;
    w *= rho;
  }
  return s;
}

void suite_theorem1(Checks& c) {
  const ControlParams p{4.0, 1.0, 1.0};
  const double v = 1.0;
  const double a = equilibrium_spacing(p, v);
  const Margin m = margin_theorem1(0.1, 0.0, 0.0, p, v);
  c.near("epsilon for alpha=4, omega=1, theta=0.1", m.value, 0.2 / std::sqrt(0.75), 1e-12);
  c.truth("hypothesis epsilon < 1", m.hypothesis_satisfied);
  const auto rec = simulate(PerturbedLattice{100, v, 0.1, 0.0, PerturbationPattern::Alternating}, p,
                            ConstantVelocity{v}, 200.0, 1e-3, 100);
  c.gap_window("theta=0.1, N=100, T=200", gap_extrema(rec), m.lower_bound, m.upper_bound);

  const auto eq = gap_extrema(simulate(EquilibriumLattice{100, v}, p, ConstantVelocity{v}, 50.0, 1e-3, 100));
  c.near("stationary run I_hat = a", eq.I_hat, a, 1e-9);
  c.near("stationary run S_hat = a", eq.S_hat, a, 1e-9);

  // Bounded leader deviation (delta > 0) with mixed perturbations.
  const BoundedDeviation lead = make_bounded_deviation(p, v, 0.05, BumpShape::RaisedCosineTrain, 0.5);
  const double delta = deviation_fraction(lead, p);
  const Margin md = margin_theorem1(0.05, 0.02, delta, p, v);
  c.truth("hypothesis with delta = 0.05", md.hypothesis_satisfied);
  const auto rec_d = simulate(PerturbedLattice{100, v, 0.05, 0.02, PerturbationPattern::Alternating}, p, lead,
                              200.0, 1e-3, 100);
  c.gap_window("delta=0.05, theta=0.05, beta=0.02", gap_extrema(rec_d), md.lower_bound, md.upper_bound);
}

void suite_theorem2(Checks& c) {
  const ControlParams p{3.0, 1.0, 1.0};
  const double v = 1.0;
  const Sinusoid lead{v, 0.1, 1.0};
  const auto rec = simulate(EquilibriumLattice{100, v}, p, lead, 200.0, 1e-3, 100);
  const double leader_sup = std::abs(lead.amplitude) * lead.omega0;
  c.le("sup |v_k - v| <= sup |z0' - v| + 1e-6", velocity_deviation(rec, v), leader_sup + kSlack);
  c.gt("min v_k > 0", *std::min_element(rec.velocities.begin(), rec.velocities.end()), 0.0);

  // Part 2: constant leader, perturbed lattice, zeta < 1.
  const double theta = 0.1, beta = 0.05;
  const Margin z = margin_theorem2_zeta(theta, beta, p, v);
  c.eq("zeta equals epsilon with delta = 0", z.value, margin_theorem1(theta, beta, 0.0, p, v).value);
  c.truth("hypothesis zeta < 1", z.hypothesis_satisfied);
  const double T = 300.0;
  const auto rec2 = simulate(PerturbedLattice{50, v, theta, beta, PerturbationPattern::Alternating}, p,
                             ConstantVelocity{v}, T, 1e-3, 100);
  c.gap_window("theta=0.1, beta=0.05, N=50", gap_extrema(rec2), z.lower_bound, z.upper_bound);
  double q_end = 0.0, q_start = 0.0;
  const std::size_t last = rec2.samples() - 1;
  for (std::size_t k = 1; k <= rec2.cars; ++k) {
    q_start = std::max(q_start, std::abs(rec2.deviation(0, k)));
    q_end = std::max(q_end, std::abs(rec2.deviation(last, k)));
  }
  c.le("max_k |q_k(T)| / max_k |q_k(0)| at T=300", q_end / q_start, 1e-6);
}

void suite_theorem3(Checks& c) {
  // Equal gaps, leader scaled so that d* = 0.3.
  const ControlParams p{3.0, 1.0, 1.0};
  const Sinusoid lead{0.05, 0.0375, 1.0};
  const double ds = d_star(p, lead);
  c.near("d* of the scaled sinusoid leader", ds, 0.3, 1e-12);
  const auto rep = gap_extrema(simulate(GapPerturbed{100, 0.0, 0.0}, p, lead, 200.0, 1e-3, 100));
  c.gap_window("equal gaps, d*=0.3", rep, p.d - ds, p.d + ds);

  // Perturbed gaps and relative speeds.
  const ConstantVelocity slow{0.1};
  const Margin m = margin_theorem3(0.1, 0.05, p, LeaderSpec{slow});
  c.truth("hypothesis eta < 1 (theta=0.1, beta=0.05)", m.hypothesis_satisfied);
  const auto rep2 = gap_extrema(simulate(GapPerturbed{100, 0.1, 0.05}, p, slow, 200.0, 1e-3, 100));
  c.gap_window("theta=0.1, beta=0.05", rep2, m.lower_bound, m.upper_bound);

  // alpha = 2 omega with theta = beta = 0.
  const ControlParams pb{2.0, 1.0, 1.0};
  const Sinusoid lead_b{0.05, 0.2 / 3.0, 1.0};
  const Margin mb = margin_theorem3(0.0, 0.0, pb, LeaderSpec{lead_b});
  c.near("d* at alpha = 2 omega", mb.value, 0.3, 1e-12);
  const auto rep3 = gap_extrema(simulate(GapPerturbed{100, 0.0, 0.0}, pb, lead_b, 200.0, 1e-3, 100));
  c.gap_window("alpha = 2 omega, equal gaps", rep3, mb.lower_bound, mb.upper_bound);

  // Synthesized parameters for gaps in [0.8, 1.2] and relative speeds <= 0.1.
  const ConstantVelocity cruise{1.0};
  const ControlParams ps = synthesize_stabilizing_params(0.8, 1.2, 0.1, cruise);
  const Margin ms = margin_theorem3(0.2, 0.1, ps, LeaderSpec{cruise});
  c.gt("synthesized alpha - 2 omega", ps.alpha - 2.0 * ps.omega, 0.0);
  c.lt("synthesized eta", ms.value, 1.0);
  const double dt = std::min(1e-3, max_stable_dt(ps));
  const auto rep4 = gap_extrema(simulate(GapPerturbed{100, 0.2, 0.1}, ps, cruise, 200.0, dt, 100));
  c.gap_window("synthesized parameters", rep4, ms.lower_bound, ms.upper_bound);
}

void suite_theorem4(Checks& c) {
  const ControlParams p{1.8, 1.0, 1.0};
  const double v = 1.0;
  const double a = equilibrium_spacing(p, v);
  const SummableDecay ic{100, v, 0.05, 0.05, 0.5};

  const Margin m = margin_theorem4(ic.theta, ic.beta, 0.0, p, v);
  c.lt("eta, constant leader", m.value, 0.25);
  c.gap_window("summable decay, constant leader", gap_extrema(simulate(ic, p, ConstantVelocity{v}, 200.0, 1e-3, 100)),
               m.lower_bound, m.upper_bound);

  const BoundedDeviation bump{v, 0.05, BumpShape::GaussianBump, 1.0};
  const double sigma = p.omega * leader_deviation_integral(bump) / a;
  const Margin mb = margin_theorem4(ic.theta, ic.beta, sigma, p, v);
  c.truth("safety eta < 1/2, Gaussian bump leader", mb.hypothesis_satisfied);
  c.gap_window("summable decay, Gaussian bump leader", gap_extrema(simulate(ic, p, bump, 200.0, 1e-3, 100)),
               mb.lower_bound, mb.upper_bound);
}

void suite_theorem5(Checks& c) {
  const ControlParams p{1.8, 1.0, 1.0};
  const double theta = 0.05, beta = 0.05;
  auto run = [&](const std::string& label, const LeaderSpec& lead) {
    const ExplicitState ic = summable_gap_state(100, p.d, theta, beta, 0.5, lead);
    double gap_sum = 0.0, speed_sum = 0.0;
    for (std::size_t k = 1; k < ic.z.size(); ++k) {
      gap_sum += std::abs(ic.z[k - 1] - ic.z[k] - p.d);
      speed_sum += std::abs(ic.v[k - 1] - ic.v[k]);
    }
    const double sigma = leader_forcing_integral_bound(lead, p.alpha) / (p.omega * p.d);
    const Margin m = margin_theorem5(gap_sum / p.d, speed_sum, sigma, p);
    c.truth(label + ": safety eta < 1", m.hypothesis_satisfied);
    c.gap_window(label, gap_extrema(simulate(ic, p, lead, 200.0, 1e-3, 100)), m.lower_bound, m.upper_bound);
  };
  run("summable gaps, resting leader", ConstantVelocity{0.0});
  run("summable gaps, Gaussian bump leader", BoundedDeviation{0.0, 0.02, BumpShape::GaussianBump, 1.0});
}

void suite_density(Checks& c) {
  const ControlParams p{2.0, 1.0, 1.0};
  const ConstantVelocity lead{1.0};
  const double t = 10.0;
  double err[2] = {0.0, 0.0};
  const int sizes[2] = {100, 400};
  for (int i = 0; i < 2; ++i) {
    const GapPerturbed ic{sizes[i], 0.0, 0.01, PerturbationPattern::Uniform};
    const ChainState s0 = build_initial_state(ic, p, lead);
    const auto n = static_cast<double>(s0.cars());
    const double L0 = (s0.z.front() - s0.z.back()) / n;
    const double L0dot = (s0.v.front() - s0.v.back()) / n;
    const auto rec = simulate(ic, p, lead, t, 1e-3, 100);
    err[i] = std::abs(mean_length(rec, t) - mean_length_law(L0, L0dot, p.alpha, t));
    c.note("N=" + std::to_string(sizes[i]) + ": |L_N(10) - L(10)| = " + format_number(err[i]));
  }
  c.ge("error ratio N=100 -> 400 at t=10", err[0] / err[1], 3.0);

  const ControlParams p3{3.0, 1.0, 1.0};
  const double v = 1.0;
  const double a = equilibrium_spacing(p3, v);
  const int n = 100;
  const auto rec = simulate(PerturbedLattice{n, v, 0.1, 0.1, PerturbationPattern::Alternating}, p3,
                            ConstantVelocity{v}, 10.0, 1e-3, 10);
  const double L0 = mean_length(rec, 0.0);
  double drift = 0.0;
  for (double ts : rec.times) drift = std::max(drift, std::abs(mean_length(rec, std::min(ts, rec.horizon())) - L0));
  c.le("max |L_N(t) - L_N(0)| on [0,10], bounded initial speeds", drift, 5.0 * a / n);
}

void suite_resonance(Checks& c) {
  const ControlParams p{0.0, 1.0, 1.0};
  const auto rec = simulate(EquilibriumLattice{10, 1.0}, p, Sinusoid{1.0, 1.0, 1.0}, 300.0, 1e-3, 100);
  const StabilityReport rep = gap_extrema(rec);
  c.lt("min gap, alpha=0, omega=omega0=1", rep.I_hat, 0.0);
  if (rep.first_collision) {
    c.note("first collision at t=" + format_number(rep.first_collision->time) + " for car " +
           std::to_string(rep.first_collision->car));
  }
  bool resonant_signalled = false;
  try {
    resonance_x1(1.0, 1.0, 1.0);
  } catch (const ResonantCase&) {
    resonant_signalled = true;
  }
  c.truth("omega == omega0 reported as resonant", resonant_signalled);

  // Direct integration: one car, undamped, leader z0 = sin(t), no initial gap error.
  const double omega = 2.0, omega0 = 1.0, amp = 1.0;
  const ControlParams p2{0.0, omega, 1.0};
  const Sinusoid lead{0.0, amp, omega0};
  const ExplicitState ic{{0.0, -p2.d}, {0.0, amp * omega0}};
  const auto rec2 = simulate(ic, p2, lead, 50.0, 1e-3, 10);
  double err = 0.0;
  for (std::size_t s = 0; s < rec2.samples(); ++s) {
    const double x1 = rec2.gap(s, 1) - p2.d;
    const double predicted = -amp * omega0 * omega0 * resonance_x1(rec2.times[s], omega, omega0);
    err = std::max(err, std::abs(x1 - predicted));
  }
  c.le("max |x_1 - closed form|, omega=2, omega0=1", err, 1e-4);
}

void suite_spectrum(Checks& c) {
  for (double ratio : {0.5, 1.0, 1.3}) {
    const ControlParams p{ratio, 1.0, 1.0};
    const auto w = spectrum_positive_real_witness(p, p.omega, 1e-3);
    c.truth("Re z > 0 spectrum point found, alpha/omega=" + format_short(ratio), w.has_value());
    if (w) c.note("alpha/omega=" + format_short(ratio) + ": witness " + format_short(w->real()) + " + (" +
                  format_short(w->imag()) + ")i");
  }
  for (double ratio : {1.42, 1.6, 2.5}) {
    const ControlParams p{ratio, 1.0, 1.0};
    c.truth("no Re z > 0 spectrum point, alpha/omega=" + format_short(ratio),
            !spectrum_positive_real_witness(p, p.omega, 1e-3).has_value());
  }
  c.near("h(0) = 1 - ln 2", h_function(0.0), 1.0 - std::numbers::ln2, 1e-12);
  c.near("h(1/sqrt 2) = 0", h_function(1.0 / std::numbers::sqrt2), 0.0, 1e-12);
}

void suite_saddle(Checks& c) {
  const ControlParams p{1.0, 1.0, 1.0};
  const double mu = 2.0, eps = 1e-3;
  const SaddleData sd = saddle_analysis(mu, p, eps);
  const auto rec = simulate(SingleVelocityKick{300, 1.0, eps}, p, ConstantVelocity{1.0}, 600.0, 1e-3, 100);
  const GrowthFit g = ray_growth_fit(rec, mu, 50, 200);
  const PhaseFit ph = ray_phase_fit(rec, mu, 50, 200);
  c.le("|slope - f| / f over k in [50,200]", std::abs(g.slope - sd.f) / sd.f, 0.05);
  c.le("|phase increment - Omega| (rad)", std::abs(ph.omega - sd.Omega), 0.05);
  c.note("f = " + format_number(sd.f) + ", fitted slope = " + format_number(g.slope));
  c.note("Omega = " + format_number(sd.Omega) + ", fitted = " + format_number(ph.omega) + " from " +
         std::to_string(ph.crossings) + " sign changes");
  c.note("phi0 = " + format_number(sd.phi0) + ", fitted phase mod pi = " + format_number(ph.phase_mod_pi));
  c.note("ln c = " + format_number(std::log(sd.c)) + ", fitted intercept = " + format_number(g.intercept));
}

void suite_oracle(Checks& c, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto uni = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
  double worst = 0.0;
  for (int scenario = 0; scenario < 20; ++scenario) {
    const int n = std::uniform_int_distribution<int>(1, 5)(rng);
    const double omega = uni(0.5, 1.5);
    const ControlParams p{2.0 * omega * uni(1.05, 1.8), omega, uni(0.5, 2.0)};
    const double v = uni(0.5, 2.0);
    const LeaderSpec lead = (rng() % 2 == 0) ? LeaderSpec{ConstantVelocity{v}}
                                             : LeaderSpec{Sinusoid{v, uni(0.0, 0.2), uni(0.3, 1.5)}};
    const auto pattern = (rng() % 2 == 0) ? PerturbationPattern::Alternating : PerturbationPattern::Uniform;
    const PerturbedLattice ic{n, v, uni(0.0, 0.2), uni(0.0, 0.2), pattern};

    const ChainState s0 = build_initial_state(ic, p, lead);
    const auto rec = simulate(ic, p, lead, 20.0, 1e-3, 10);
    std::vector<double> prev(rec.samples());
    for (std::size_t s = 0; s < rec.samples(); ++s) prev[s] = leader_forcing(lead, p, rec.times[s]);
    for (std::size_t k = 1; k <= rec.cars; ++k) {
      const double x0 = s0.gap(k) - p.d;
      const double xd0 = s0.v[k - 1] - s0.v[k];
      std::vector<double> next = vc_solve_next(prev, x0, xd0, p, rec.times);
      double diff = 0.0, scale = 0.0;
      for (std::size_t s = 0; s < rec.samples(); ++s) {
        diff = std::max(diff, std::abs(rec.gap(s, k) - p.d - next[s]));
        scale = std::max(scale, std::abs(next[s]));
      }
      worst = std::max(worst, diff / scale);
      prev = std::move(next);
    }
  }
  c.le("max relative |x_k integrator - x_k oracle|, 20 scenarios", worst, 1e-5);
}

void suite_sweep(Checks& c) {
  const SweepGrid grid;
  const SweepTemplate tmpl;
  const SweepThresholds th;
  const auto cells = run_sweep(grid, tmpl, th, 1);
  std::ostringstream a, b;
  write_sweep_csv(a, cells);
  write_sweep_csv(b, run_sweep(grid, tmpl, th, 4));
  c.truth("CSV identical with 1 and 4 workers", a.str() == b.str());
  int stable_sector_unstable = 0, inner = 0, inner_unstable = 0;
  for (const SweepCell& cell : cells) {
    if (cell.sector == SectorClass::Stable && cell.label == EmpiricalLabel::Unstable) ++stable_sector_unstable;
    if (cell.alpha < 1.3 * cell.omega) {
      ++inner;
      if (cell.label == EmpiricalLabel::Unstable) ++inner_unstable;
      else c.note("not Unstable: alpha=" + format_short(cell.alpha) + " omega=" + format_short(cell.omega) +
                  " slope=" + format_number(cell.slope) + " (" + cell.reason + ")");
    }
  }
  c.eq("Unstable labels in the Stable sector", stable_sector_unstable, 0.0);
  c.ge("fraction Unstable where alpha < 1.3 omega", static_cast<double>(inner_unstable) / inner, 0.9);
  c.note(std::to_string(inner_unstable) + " of " + std::to_string(inner) + " cells with alpha < 1.3 omega labelled Unstable");
}

void suite_corollary2(Checks& c) {
  const ControlParams p{1.0, 1.0, 1.0};
  const SingleVelocityKick ic{300, 1.0, 0.01};
  double prev = std::numeric_limits<double>::infinity();
  for (double horizon : {150.0, 300.0, 600.0}) {
    const double i_hat = gap_extrema(simulate(ic, p, ConstantVelocity{1.0}, horizon, 5e-3, 200)).I_hat;
    c.lt("running min gap at T=" + format_short(horizon) + " below the previous horizon", i_hat, prev);
    prev = i_hat;
  }
  c.lt("running min gap at T=600", prev, 0.0);
}

using SuiteFn = std::function<void(Checks&, std::uint64_t)>;

const std::map<std::string, SuiteFn>& registry() {
  static const std::map<std::string, SuiteFn> r = {
      {"theorem1", [](Checks& c, std::uint64_t) { suite_theorem1(c); }},
      {"theorem2", [](Checks& c, std::uint64_t) { suite_theorem2(c); }},
      {"theorem3", [](Checks& c, std::uint64_t) { suite_theorem3(c); }},
      {"theorem4", [](Checks& c, std::uint64_t) { suite_theorem4(c); }},
      {"theorem5", [](Checks& c, std::uint64_t) { suite_theorem5(c); }},
      {"density", [](Checks& c, std::uint64_t) { suite_density(c); }},
      {"resonance", [](Checks& c, std::uint64_t) { suite_resonance(c); }},
      {"spectrum", [](Checks& c, std::uint64_t) { suite_spectrum(c); }},
      {"saddle", [](Checks& c, std::uint64_t) { suite_saddle(c); }},
      {"oracle", suite_oracle},
      {"sweep", [](Checks& c, std::uint64_t) { suite_sweep(c); }},
      {"corollary2", [](Checks& c, std::uint64_t) { suite_corollary2(c); }},
  };
  return r;
}

}  // namespace

bool SuiteResult::passed() const {
  return !checks.empty() && std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {"theorem1", "theorem2", "theorem3",  "theorem4",
                                                 "theorem5", "density",  "resonance", "spectrum",
                                                 "saddle",   "oracle",   "sweep",     "corollary2"};
  return names;
}

SuiteResult run_suite(const std::string& name, std::uint64_t seed) {
  const auto it = registry().find(name);
  if (it == registry().end()) throw UnknownSuite("unknown suite '" + name + "'");
  SuiteResult result;
  result.suite = name;
  result.seed = seed;
  Checks checks(result);
  const auto start = std::chrono::steady_clock::now();
  it->second(checks, seed);
  result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

void print_suite(std::ostream& out, const SuiteResult& result) {
  out << "suite " << result.suite << " (seed " << result.seed << ")\n";
  for (const CheckResult& c : result.checks) {
    out << (c.passed ? "[PASS] " : "[FAIL] ") << c.name;
    if (c.relation == "true") {
      out << (c.passed ? ": holds\n" : ": does not hold\n");
    } else {
      out << ": " << format_number(c.measured) << ' ' << c.relation << ' ' << format_number(c.bound) << '\n';
    }
  }
  for (const std::string& n : result.notes) out << "  note: " << n << '\n';
  out << (result.passed() ? "PASSED " : "FAILED ") << result.suite << " in " << format_short(std::round(result.seconds * 100.0) / 100.0) << " s\n";
}

}  // namespace chainlab
