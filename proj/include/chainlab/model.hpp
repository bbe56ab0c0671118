#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace chainlab {

/// Raised when an input violates a precondition of the model (bad parameter,
/// inconsistent initial condition, out-of-sector margin request, ...).
class DomainError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Protocol triple of the local control law
///   z_k'' = omega^2 (z_{k-1} - z_k - d) - alpha z_k'.
struct ControlParams {
  double alpha = 0.0;  // friction, 1/time
  double omega = 0.0;  // stiffness root, 1/time
  double d = 0.0;      // target headway, length

  /// Throws DomainError unless alpha > 0, omega > 0, d > 0.
  void validate() const;

  /// Same as validate() but admits alpha == 0 (undamped chain).
  void validate_allow_undamped() const;
};

// ---------------------------------------------------------------------------
// Leader trajectories

/// z0(t) = v t
struct ConstantVelocity {
  double v = 0.0;
};

/// z0(t) = v t + amplitude * sin(omega0 t)
struct Sinusoid {
  double v = 0.0;
  double amplitude = 0.0;
  double omega0 = 0.0;
};

/// Smooth bounded profiles p(t) with known sup-norms of p, p', p''.
enum class BumpShape {
  /// p(t) = A (1 - cos(rate t)) / 2, periodic train of raised-cosine bumps.
  RaisedCosineTrain,
  /// p(t) = A exp(-(t - t0)^2 / (2 s^2)), s = 1/rate, t0 = 4 s.
  GaussianBump,
};

/// z0(t) = v t + p(t) with sup |p| = amplitude. The amplitude is stored as a
/// length; use make_bounded_deviation() to build it from a fraction of the
/// equilibrium spacing.
struct BoundedDeviation {
  double v = 0.0;
  double amplitude = 0.0;
  BumpShape shape = BumpShape::RaisedCosineTrain;
  double rate = 1.0;
};

using LeaderSpec = std::variant<ConstantVelocity, Sinusoid, BoundedDeviation>;

struct Kinematics {
  double position = 0.0;
  double velocity = 0.0;
  double acceleration = 0.0;
};

struct LeaderBounds {
  double v_max = 0.0;  // sup |z0'|
  double a_max = 0.0;  // sup |z0''|
};

Kinematics leader_kinematics(const LeaderSpec& leader, double t);

/// Closed-form sup-norms of the leader velocity and acceleration.
LeaderBounds leader_bounds(const LeaderSpec& leader);

/// Cruise velocity v of the leader (the linear part of z0).
double leader_cruise_velocity(const LeaderSpec& leader);

/// sup_t |z0(t) - v t|.
double leader_max_deviation(const LeaderSpec& leader);

/// z0(t) - v t, evaluated exactly.
double leader_deviation(const LeaderSpec& leader, double t);

/// Integral over [0, inf) of |z0(t) - v t|; +inf for non-integrable profiles.
double leader_deviation_integral(const LeaderSpec& leader);

/// Upper bound on the integral over [0, inf) of |z0'' + alpha z0'|; +inf when
/// the leader cruises with v != 0 or oscillates forever.
double leader_forcing_integral_bound(const LeaderSpec& leader, double alpha);

/// Bounded-deviation leader with sup |z0 - v t| = delta_frac * a(params, v).
BoundedDeviation make_bounded_deviation(const ControlParams& params, double v, double delta_frac,
                                        BumpShape shape, double rate);

/// delta such that sup |z0 - v t| = delta * a.
double deviation_fraction(const LeaderSpec& leader, const ControlParams& params);

// ---------------------------------------------------------------------------
// Equilibrium quantities

/// a = d + alpha v / omega^2, the headway of stationary motion at speed v.
double equilibrium_spacing(const ControlParams& params, double v);

/// d* = (a_max + alpha v_max) / omega^2.
double d_star(const ControlParams& params, const LeaderBounds& bounds);
double d_star(const ControlParams& params, const LeaderSpec& leader);

// ---------------------------------------------------------------------------
// Chain state and initial conditions

/// Positions and velocities of cars 0..N at time t; index 0 is the leader.
struct ChainState {
  double t = 0.0;
  std::vector<double> z;
  std::vector<double> v;

  std::size_t cars() const { return z.empty() ? 0 : z.size() - 1; }
  double gap(std::size_t k) const { return z[k - 1] - z[k]; }
};

enum class PerturbationPattern {
  Alternating,  // signs +, -, +, ... starting at car 1
  Uniform,      // every car perturbed with the same sign
};

/// z_k(0) = -k a, z_k'(0) = v.
struct EquilibriumLattice {
  int cars = 1;
  double v = 0.0;
};

/// |z_k(0) + k a| <= theta a, |z_k'(0) - v| <= beta v, saturated.
struct PerturbedLattice {
  int cars = 1;
  double v = 0.0;
  double theta = 0.0;
  double beta = 0.0;
  PerturbationPattern pattern = PerturbationPattern::Alternating;
};

/// (1 - theta) d <= r_k(0) <= (1 + theta) d and |z_{k-1}'(0) - z_k'(0)| <= beta,
/// measured from the leader's initial position and velocity.
struct GapPerturbed {
  int cars = 1;
  double theta = 0.0;
  double beta = 0.0;
  PerturbationPattern pattern = PerturbationPattern::Alternating;
};

/// Summable lattice perturbation: |z_k(0) + k a| = theta a (1 - rho) rho^{k-1},
/// |z_k'(0) - v| = beta v (1 - rho) rho^{k-1}, alternating signs.
struct SummableDecay {
  int cars = 1;
  double v = 0.0;
  double theta = 0.0;
  double beta = 0.0;
  double rho = 0.5;
};

/// Equilibrium lattice with car 1 started at v + epsilon.
struct SingleVelocityKick {
  int cars = 1;
  double v = 0.0;
  double epsilon = 0.0;
};

/// Caller-supplied positions and velocities for cars 0..N. The leader entries
/// are overwritten by the leader trajectory at t = 0.
struct ExplicitState {
  std::vector<double> z;
  std::vector<double> v;
};

using InitialConditionSpec = std::variant<EquilibriumLattice, PerturbedLattice, GapPerturbed,
                                          SummableDecay, SingleVelocityKick, ExplicitState>;

/// Number of following cars N described by the spec.
int chain_length(const InitialConditionSpec& spec);

/// The lattice velocity v for specs defined relative to z_k = v t - k a.
std::optional<double> reference_velocity(const InitialConditionSpec& spec);

/// Builds the state at t = 0. Throws DomainError for inconsistent specs or
/// when the resulting positions are not strictly decreasing in k.
ChainState build_initial_state(const InitialConditionSpec& spec, const ControlParams& params,
                               const LeaderSpec& leader);

// ---------------------------------------------------------------------------
// Parameter-plane sectors

enum class SectorClass {
  Stable,      // alpha > 2 omega
  Restricted,  // sqrt(2) omega <= alpha <= 2 omega
  Unstable,    // alpha < sqrt(2) omega
};

SectorClass sector_classify(const ControlParams& params);
std::string to_string(SectorClass sector);

/// Chooses (alpha, omega, d) with alpha > 2 omega such that the equal-gap
/// stability margin eta stays below one for initial gaps in [A, B], initial
/// relative speeds bounded by C and the given leader.
ControlParams synthesize_stabilizing_params(double min_gap, double max_gap, double max_rel_speed,
                                            const LeaderSpec& leader);

}  // namespace chainlab
