#include "chainlab/model.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "chainlab/spectral.hpp"

namespace chainlab {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

constexpr double kInf = std::numeric_limits<double>::infinity();

// Gaussian bump centre in units of its width; p(0) = A e^{-8}.
constexpr double kBumpOffset = 4.0;

struct Profile {
  double p, dp, ddp;
};

Profile bump_profile(const BoundedDeviation& b, double t) {
  const double amp = b.amplitude;
  switch (b.shape) {
    case BumpShape::RaisedCosineTrain: {
      const double w = b.rate;
      return {0.5 * amp * (1.0 - std::cos(w * t)), 0.5 * amp * w * std::sin(w * t),
              0.5 * amp * w * w * std::cos(w * t)};
    }
    case BumpShape::GaussianBump: {
      const double s = 1.0 / b.rate;
      const double u = (t - kBumpOffset * s) / s;
      const double g = amp * std::exp(-0.5 * u * u);
      return {g, -g * u / s, g * (u * u - 1.0) / (s * s)};
    }
  }
  return {0.0, 0.0, 0.0};
}

std::string car_message(const char* what, std::size_t k) {
  std::ostringstream os;
  os << what << " at car " << k;
  return os.str();
}

void require_finite_nonnegative(double x, const char* name) {
  if (!std::isfinite(x) || x < 0.0) {
    throw DomainError(std::string(name) + " must be finite and non-negative");
  }
}

void require_cars(int cars) {
  if (cars < 1) throw DomainError("initial condition needs at least one following car");
}

double pattern_sign(PerturbationPattern pattern, std::size_t k) {
  if (pattern == PerturbationPattern::Uniform) return 1.0;
  return (k % 2 == 1) ? 1.0 : -1.0;
}

ChainState lattice(std::size_t cars, double spacing, double v, const LeaderSpec& leader) {
  const Kinematics lead = leader_kinematics(leader, 0.0);
  ChainState s;
  s.z.resize(cars + 1);
  s.v.assign(cars + 1, v);
  s.z[0] = lead.position;
  s.v[0] = lead.velocity;
  for (std::size_t k = 1; k <= cars; ++k) s.z[k] = -static_cast<double>(k) * spacing;
  return s;
}

void check_ordering(const ChainState& s) {
  for (std::size_t k = 1; k < s.z.size(); ++k) {
    if (!(s.z[k] < s.z[k - 1])) {
      throw DomainError(car_message("initial positions violate the strict ordering z_k < z_{k-1}", k));
    }
  }
}

}  // namespace

void ControlParams::validate() const {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw DomainError("alpha must be positive");
  validate_allow_undamped();
}

void ControlParams::validate_allow_undamped() const {
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw DomainError("alpha must be non-negative");
  if (!(omega > 0.0) || !std::isfinite(omega)) throw DomainError("omega must be positive");
  if (!(d > 0.0) || !std::isfinite(d)) throw DomainError("d must be positive");
}

Kinematics leader_kinematics(const LeaderSpec& leader, double t) {
  return std::visit(
      overloaded{
          [t](const ConstantVelocity& c) { return Kinematics{c.v * t, c.v, 0.0}; },
          [t](const Sinusoid& s) {
            const double ph = s.omega0 * t;
            return Kinematics{s.v * t + s.amplitude * std::sin(ph),
                              s.v + s.amplitude * s.omega0 * std::cos(ph),
                              -s.amplitude * s.omega0 * s.omega0 * std::sin(ph)};
          },
          [t](const BoundedDeviation& b) {
            const Profile p = bump_profile(b, t);
            return Kinematics{b.v * t + p.p, b.v + p.dp, p.ddp};
          },
      },
      leader);
}

LeaderBounds leader_bounds(const LeaderSpec& leader) {
  return std::visit(
      overloaded{
          [](const ConstantVelocity& c) { return LeaderBounds{std::abs(c.v), 0.0}; },
          [](const Sinusoid& s) {
            const double amp = std::abs(s.amplitude);
            const double w = std::abs(s.omega0);
            return LeaderBounds{std::abs(s.v) + amp * w, amp * w * w};
          },
          [](const BoundedDeviation& b) {
            const double amp = std::abs(b.amplitude);
            switch (b.shape) {
              case BumpShape::RaisedCosineTrain:
                return LeaderBounds{std::abs(b.v) + 0.5 * amp * b.rate, 0.5 * amp * b.rate * b.rate};
              case BumpShape::GaussianBump:
                // sup|p'| at u = -+1, sup|p''| at the centre.
                return LeaderBounds{std::abs(b.v) + amp * b.rate / std::sqrt(std::numbers::e),
                                    amp * b.rate * b.rate};
            }
            return LeaderBounds{kInf, kInf};
          },
      },
      leader);
}

double leader_cruise_velocity(const LeaderSpec& leader) {
  return std::visit([](const auto& l) { return l.v; }, leader);
}

double leader_max_deviation(const LeaderSpec& leader) {
  return std::visit(overloaded{
                        [](const ConstantVelocity&) { return 0.0; },
                        [](const Sinusoid& s) { return std::abs(s.amplitude); },
                        [](const BoundedDeviation& b) { return std::abs(b.amplitude); },
                    },
                    leader);
}

double leader_deviation(const LeaderSpec& leader, double t) {
  return std::visit(overloaded{
                        [](const ConstantVelocity&) { return 0.0; },
                        [t](const Sinusoid& s) { return s.amplitude * std::sin(s.omega0 * t); },
                        [t](const BoundedDeviation& b) { return bump_profile(b, t).p; },
                    },
                    leader);
}

double leader_deviation_integral(const LeaderSpec& leader) {
  return std::visit(
      overloaded{
          [](const ConstantVelocity&) { return 0.0; },
          [](const Sinusoid& s) { return s.amplitude == 0.0 ? 0.0 : kInf; },
          [](const BoundedDeviation& b) {
            if (b.amplitude == 0.0) return 0.0;
            if (b.shape == BumpShape::RaisedCosineTrain) return kInf;
            const double s = 1.0 / b.rate;
            return std::abs(b.amplitude) * s * std::sqrt(std::numbers::pi / 2.0) *
                   (1.0 + std::erf(kBumpOffset / std::numbers::sqrt2));
          },
      },
      leader);
}

double leader_forcing_integral_bound(const LeaderSpec& leader, double alpha) {
  return std::visit(
      overloaded{
          [](const ConstantVelocity& c) { return c.v == 0.0 ? 0.0 : kInf; },
          [](const Sinusoid& s) { return (s.v == 0.0 && s.amplitude == 0.0) ? 0.0 : kInf; },
          [alpha](const BoundedDeviation& b) {
            if (b.v != 0.0) return kInf;
            if (b.amplitude == 0.0) return 0.0;
            if (b.shape == BumpShape::RaisedCosineTrain) return kInf;
            // Total variation of p and p' over [0, inf).
            const Profile p0 = bump_profile(b, 0.0);
            const double amp = std::abs(b.amplitude);
            const double peak_slope = amp * b.rate / std::sqrt(std::numbers::e);
            const double tv_p = 2.0 * amp - std::abs(p0.p);
            const double tv_dp = 4.0 * peak_slope - std::abs(p0.dp);
            return tv_dp + alpha * tv_p;
          },
      },
      leader);
}

BoundedDeviation make_bounded_deviation(const ControlParams& params, double v, double delta_frac,
                                        BumpShape shape, double rate) {
  params.validate();
  if (!(delta_frac >= 0.0)) throw DomainError("delta must be non-negative");
  if (!(rate > 0.0)) throw DomainError("bump rate must be positive");
  return BoundedDeviation{v, delta_frac * equilibrium_spacing(params, v), shape, rate};
}

double deviation_fraction(const LeaderSpec& leader, const ControlParams& params) {
  return leader_max_deviation(leader) / equilibrium_spacing(params, leader_cruise_velocity(leader));
}

double equilibrium_spacing(const ControlParams& params, double v) {
  return params.d + params.alpha / (params.omega * params.omega) * v;
}

double d_star(const ControlParams& params, const LeaderBounds& bounds) {
  return (bounds.a_max + params.alpha * bounds.v_max) / (params.omega * params.omega);
}

double d_star(const ControlParams& params, const LeaderSpec& leader) {
  return d_star(params, leader_bounds(leader));
}

int chain_length(const InitialConditionSpec& spec) {
  return std::visit(overloaded{
                        [](const ExplicitState& e) { return static_cast<int>(e.z.size()) - 1; },
                        [](const auto& s) { return s.cars; },
                    },
                    spec);
}

std::optional<double> reference_velocity(const InitialConditionSpec& spec) {
  return std::visit(overloaded{
                        [](const GapPerturbed&) -> std::optional<double> { return std::nullopt; },
                        [](const ExplicitState&) -> std::optional<double> { return std::nullopt; },
                        [](const auto& s) -> std::optional<double> { return s.v; },
                    },
                    spec);
}

ChainState build_initial_state(const InitialConditionSpec& spec, const ControlParams& params,
                               const LeaderSpec& leader) {
  params.validate_allow_undamped();
  ChainState state = std::visit(
      overloaded{
          [&](const EquilibriumLattice& e) {
            require_cars(e.cars);
            require_finite_nonnegative(e.v, "lattice velocity");
            return lattice(e.cars, equilibrium_spacing(params, e.v), e.v, leader);
          },
          [&](const PerturbedLattice& p) {
            require_cars(p.cars);
            require_finite_nonnegative(p.v, "lattice velocity");
            require_finite_nonnegative(p.theta, "theta");
            require_finite_nonnegative(p.beta, "beta");
            if (p.theta >= 1.0) throw DomainError("theta must lie in [0, 1)");
            const double a = equilibrium_spacing(params, p.v);
            ChainState s = lattice(p.cars, a, p.v, leader);
            for (std::size_t k = 1; k <= s.cars(); ++k) {
              const double sign = pattern_sign(p.pattern, k);
              s.z[k] += sign * p.theta * a;
              s.v[k] += sign * p.beta * p.v;
            }
            return s;
          },
          [&](const GapPerturbed& g) {
            require_cars(g.cars);
            require_finite_nonnegative(g.theta, "theta");
            require_finite_nonnegative(g.beta, "beta");
            if (g.theta >= 1.0) throw DomainError("theta must lie in [0, 1)");
            const Kinematics lead = leader_kinematics(leader, 0.0);
            ChainState s;
            s.z.resize(static_cast<std::size_t>(g.cars) + 1);
            s.v.resize(s.z.size());
            s.z[0] = lead.position;
            s.v[0] = lead.velocity;
            for (std::size_t k = 1; k <= s.cars(); ++k) {
              const double sign = pattern_sign(g.pattern, k);
              s.z[k] = s.z[k - 1] - params.d * (1.0 + sign * g.theta);
              s.v[k] = s.v[k - 1] - sign * g.beta;
            }
            return s;
          },
          [&](const SummableDecay& sd) {
            require_cars(sd.cars);
            require_finite_nonnegative(sd.v, "lattice velocity");
            require_finite_nonnegative(sd.theta, "theta");
            require_finite_nonnegative(sd.beta, "beta");
            if (!(sd.rho > 0.0 && sd.rho < 1.0)) throw DomainError("decay ratio rho must lie in (0, 1)");
            const double a = equilibrium_spacing(params, sd.v);
            ChainState s = lattice(sd.cars, a, sd.v, leader);
            double weight = 1.0 - sd.rho;
            for (std::size_t k = 1; k <= s.cars(); ++k) {
              const double sign = pattern_sign(PerturbationPattern::Alternating, k);
              s.z[k] += sign * sd.theta * a * weight;
              s.v[k] += sign * sd.beta * sd.v * weight;
              weight *= sd.rho;
            }
            return s;
          },
          [&](const SingleVelocityKick& kick) {
            require_cars(kick.cars);
            require_finite_nonnegative(kick.v, "lattice velocity");
            if (!std::isfinite(kick.epsilon)) throw DomainError("kick must be finite");
            ChainState s = lattice(kick.cars, equilibrium_spacing(params, kick.v), kick.v, leader);
            s.v[1] += kick.epsilon;
            return s;
          },
          [&](const ExplicitState& e) {
            if (e.z.size() < 2 || e.z.size() != e.v.size()) {
              throw DomainError("explicit state needs equal-length position and velocity lists of length >= 2");
            }
            const Kinematics lead = leader_kinematics(leader, 0.0);
            ChainState s{0.0, e.z, e.v};
            s.z[0] = lead.position;
            s.v[0] = lead.velocity;
            return s;
          },
      },
      spec);
  state.t = 0.0;
  check_ordering(state);
  return state;
}

SectorClass sector_classify(const ControlParams& params) {
  if (params.alpha > 2.0 * params.omega) return SectorClass::Stable;
  if (params.alpha < std::numbers::sqrt2 * params.omega) return SectorClass::Unstable;
  return SectorClass::Restricted;
}

std::string to_string(SectorClass sector) {
  switch (sector) {
    case SectorClass::Stable: return "stable";
    case SectorClass::Restricted: return "restricted";
    case SectorClass::Unstable: return "unstable";
  }
  return "unknown";
}

ControlParams synthesize_stabilizing_params(double min_gap, double max_gap, double max_rel_speed,
                                            const LeaderSpec& leader) {
  if (!(min_gap > 0.0) || !(max_gap >= min_gap) || !std::isfinite(max_gap)) {
    throw DomainError("gap window requires 0 < A <= B < inf");
  }
  require_finite_nonnegative(max_rel_speed, "C");
  const LeaderBounds bounds = leader_bounds(leader);
  if (!std::isfinite(bounds.v_max) || !std::isfinite(bounds.a_max)) {
    throw DomainError("leader velocity and acceleration bounds must be finite");
  }

  const double d = 0.5 * (min_gap + max_gap);
  const double theta = (max_gap - min_gap) / (min_gap + max_gap);
  const double beta = max_rel_speed;

  double alpha = 1.0;
  for (int doubling = 0; doubling < 200; ++doubling, alpha *= 2.0) {
    const double lower = std::sqrt((bounds.a_max + alpha * bounds.v_max) / d);
    const double upper = 0.5 * alpha;
    if (!(lower < upper)) continue;
    // Midpoint first; for theta close to one the margin needs omega nearer the
    // lower end, so the candidate slides down the window.
    double fraction = 0.5;
    for (int shrink = 0; shrink < 40; ++shrink, fraction *= 0.5) {
      const ControlParams candidate{alpha, lower + fraction * (upper - lower), d};
      if (!(candidate.alpha > 2.0 * candidate.omega)) continue;
      if (margin_theorem3(theta, beta, candidate, leader).value < 1.0) return candidate;
    }
  }
  throw DomainError("no stabilizing parameters found within the search range");
}

}  // namespace chainlab
