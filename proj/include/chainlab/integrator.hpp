#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "chainlab/model.hpp"

namespace chainlab {

/// Default integration step.
inline constexpr double kDefaultDt = 1e-3;

/// Largest admissible step for the given parameters: 0.1 / max(alpha, omega).
double max_stable_dt(const ControlParams& params);

/// One classical fourth-order Runge-Kutta step of the chain. The leader is
/// advanced exactly from its closed form, including at the half-step stages.
ChainState step(const ChainState& state, const ControlParams& params, const LeaderSpec& leader,
                double dt);

/// x_k = z_{k-1} - z_k - d for k = 1..N.
std::vector<double> x_coordinates(const ChainState& state, const ControlParams& params);

struct CollisionEvent {
  double time = 0.0;
  std::size_t car = 0;  // the gap r_car = z_{car-1} - z_car turned negative
};

/// Sampled trajectory of a chain run. Per-sample arrays are stored row-major
/// (sample, car) with car index k = 1..N at column k - 1.
struct TrajectoryRecord {
  std::size_t cars = 0;
  double dt = 0.0;
  int stride = 1;
  double headway = 0.0;  // the control parameter d
  std::optional<double> reference_velocity;
  double spacing = 0.0;  // a(v) when a reference velocity is set

  std::vector<double> times;
  std::vector<double> gaps;
  std::vector<double> velocities;
  std::vector<double> deviations;  // q_k = z_k - (v t - k a); empty without a reference

  // Extrema over every integration step, per car.
  std::vector<double> min_gap;
  std::vector<double> max_gap;
  std::optional<CollisionEvent> first_collision;

  std::size_t samples() const { return times.size(); }
  double horizon() const { return times.empty() ? 0.0 : times.back(); }
  bool has_deviations() const { return !deviations.empty(); }

  double gap(std::size_t sample, std::size_t k) const { return gaps[sample * cars + k - 1]; }
  double velocity(std::size_t sample, std::size_t k) const {
    return velocities[sample * cars + k - 1];
  }
  double deviation(std::size_t sample, std::size_t k) const {
    return deviations[sample * cars + k - 1];
  }
  std::span<const double> gap_row(std::size_t sample) const {
    return {gaps.data() + sample * cars, cars};
  }
};

/// Integrates the chain from build_initial_state(spec) to `horizon` with fixed
/// step dt, storing every `stride`-th step. Specs carrying a lattice velocity v
/// are integrated in the co-moving frame q_k = z_k - (v t - k a), which is the
/// same linear system with zero headway; others in absolute coordinates.
/// Throws DomainError when dt exceeds max_stable_dt(params).
TrajectoryRecord simulate(const InitialConditionSpec& spec, const ControlParams& params,
                          const LeaderSpec& leader, double horizon, double dt, int stride);

/// CSV with header `t,k,r,v,q`, rows ordered by (sample, car), 17 significant
/// digits; q is `nan` when the record carries no deviations.
void write_trajectory_csv(std::ostream& out, const TrajectoryRecord& record);

}  // namespace chainlab
