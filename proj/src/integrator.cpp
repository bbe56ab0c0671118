#include "chainlab/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

#include "chainlab/format.hpp"

namespace chainlab {

namespace {

/// Fixed-step RK4 for cars 1..N of the force law with a given headway offset.
/// Index 0 of the position array is the leader, whose stage positions are
/// supplied by the caller.
class ChainStepper {
public:
  ChainStepper(std::size_t cars, const ControlParams& params, double offset)
      : cars_(cars), w2_(params.omega * params.omega), alpha_(params.alpha), offset_(offset) {
    for (auto* buf : {&k1z_, &k1v_, &k2z_, &k2v_, &k3z_, &k3v_, &k4z_, &k4v_}) buf->resize(cars + 1);
    stage_z_.resize(cars + 1);
    stage_v_.resize(cars + 1);
  }

  void advance(std::span<double> z, std::span<double> v, double lead_now, double lead_mid,
               double lead_next, double dt) {
    const double half = 0.5 * dt;

    z[0] = lead_now;
    derivative(z, v, k1z_, k1v_);

    stage(z, v, k1z_, k1v_, half, lead_mid);
    derivative(stage_z_, stage_v_, k2z_, k2v_);

    stage(z, v, k2z_, k2v_, half, lead_mid);
    derivative(stage_z_, stage_v_, k3z_, k3v_);

    stage(z, v, k3z_, k3v_, dt, lead_next);
    derivative(stage_z_, stage_v_, k4z_, k4v_);

    const double sixth = dt / 6.0;
    for (std::size_t k = 1; k <= cars_; ++k) {
      z[k] += sixth * (k1z_[k] + 2.0 * k2z_[k] + 2.0 * k3z_[k] + k4z_[k]);
      v[k] += sixth * (k1v_[k] + 2.0 * k2v_[k] + 2.0 * k3v_[k] + k4v_[k]);
    }
    z[0] = lead_next;
  }

private:
  void derivative(std::span<const double> z, std::span<const double> v, std::vector<double>& dz,
                  std::vector<double>& dv) const {
    for (std::size_t k = 1; k <= cars_; ++k) {
      dz[k] = v[k];
      dv[k] = w2_ * (z[k - 1] - z[k] - offset_) - alpha_ * v[k];
    }
  }

  void stage(std::span<const double> z, std::span<const double> v, const std::vector<double>& dz,
             const std::vector<double>& dv, double h, double lead) {
    stage_z_[0] = lead;
    for (std::size_t k = 1; k <= cars_; ++k) {
      stage_z_[k] = z[k] + h * dz[k];
      stage_v_[k] = v[k] + h * dv[k];
    }
  }

  std::size_t cars_;
  double w2_, alpha_, offset_;
  std::vector<double> k1z_, k1v_, k2z_, k2v_, k3z_, k3v_, k4z_, k4v_;
  std::vector<double> stage_z_, stage_v_;
};

}  // namespace

double max_stable_dt(const ControlParams& params) {
  return 0.1 / std::max(params.alpha, params.omega);
}

ChainState step(const ChainState& state, const ControlParams& params, const LeaderSpec& leader,
                double dt) {
  params.validate_allow_undamped();
  if (!(dt > 0.0)) throw DomainError("dt must be positive");
  if (state.z.size() < 2 || state.z.size() != state.v.size()) {
    throw DomainError("chain state needs equal-length position and velocity lists of length >= 2");
  }
  ChainState next = state;
  ChainStepper stepper(state.cars(), params, params.d);
  const double t = state.t;
  const Kinematics end = leader_kinematics(leader, t + dt);
  stepper.advance(next.z, next.v, leader_kinematics(leader, t).position,
                  leader_kinematics(leader, t + 0.5 * dt).position, end.position, dt);
  next.v[0] = end.velocity;
  next.t = t + dt;
  return next;
}

std::vector<double> x_coordinates(const ChainState& state, const ControlParams& params) {
  std::vector<double> x(state.cars());
  for (std::size_t k = 1; k <= state.cars(); ++k) x[k - 1] = state.z[k - 1] - state.z[k] - params.d;
  return x;
}

TrajectoryRecord simulate(const InitialConditionSpec& spec, const ControlParams& params,
                          const LeaderSpec& leader, double horizon, double dt, int stride) {
  params.validate_allow_undamped();
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw DomainError("horizon must be positive");
  if (!(dt > 0.0)) throw DomainError("dt must be positive");
  if (stride < 1) throw DomainError("sample stride must be >= 1");
  const double dt_max = max_stable_dt(params);
  if (dt > dt_max) {
    std::ostringstream os;
    os << "dt = " << dt << " exceeds the stability threshold 0.1/max(alpha, omega) = " << dt_max;
    throw DomainError(os.str());
  }

  const ChainState initial = build_initial_state(spec, params, leader);
  const std::size_t n = initial.cars();

  TrajectoryRecord rec;
  rec.cars = n;
  rec.dt = dt;
  rec.stride = stride;
  rec.headway = params.d;
  rec.reference_velocity = reference_velocity(spec);

  // Working coordinates: deviations from the moving lattice when a reference
  // velocity exists, absolute positions otherwise.
  const bool comoving = rec.reference_velocity.has_value();
  const double vref = comoving ? *rec.reference_velocity : 0.0;
  const double a = comoving ? equilibrium_spacing(params, vref) : 0.0;
  rec.spacing = a;
  const bool exact_deviation = comoving && leader_cruise_velocity(leader) == vref;

  auto leader_coordinate = [&](double t) {
    if (!comoving) return leader_kinematics(leader, t).position;
    if (exact_deviation) return leader_deviation(leader, t);
    return leader_kinematics(leader, t).position - vref * t;
  };

  std::vector<double> z(n + 1), v(n + 1);
  for (std::size_t k = 0; k <= n; ++k) {
    z[k] = comoving ? initial.z[k] + static_cast<double>(k) * a : initial.z[k];
    v[k] = comoving ? initial.v[k] - vref : initial.v[k];
  }
  z[0] = leader_coordinate(0.0);

  const auto steps = static_cast<long long>(std::ceil(horizon / dt - 1e-9));
  const std::size_t expected_samples = static_cast<std::size_t>(steps / stride) + 1;
  rec.times.reserve(expected_samples);
  rec.gaps.reserve(expected_samples * n);
  rec.velocities.reserve(expected_samples * n);
  if (comoving) rec.deviations.reserve(expected_samples * n);
  rec.min_gap.assign(n, std::numeric_limits<double>::infinity());
  rec.max_gap.assign(n, -std::numeric_limits<double>::infinity());

  std::vector<double> gap(n), prev_gap(n);
  auto compute_gaps = [&] {
    for (std::size_t k = 1; k <= n; ++k) gap[k - 1] = a + z[k - 1] - z[k];
  };
  auto track_extrema = [&] {
    for (std::size_t i = 0; i < n; ++i) {
      rec.min_gap[i] = std::min(rec.min_gap[i], gap[i]);
      rec.max_gap[i] = std::max(rec.max_gap[i], gap[i]);
    }
  };
  auto store_sample = [&](double t) {
    rec.times.push_back(t);
    rec.gaps.insert(rec.gaps.end(), gap.begin(), gap.end());
    for (std::size_t k = 1; k <= n; ++k) rec.velocities.push_back(v[k] + vref);
    if (comoving) rec.deviations.insert(rec.deviations.end(), z.begin() + 1, z.end());
  };

  compute_gaps();
  track_extrema();
  store_sample(0.0);

  ChainStepper stepper(n, params, comoving ? 0.0 : params.d);
  for (long long i = 0; i < steps; ++i) {
    const double t = static_cast<double>(i) * dt;
    const double t_next = static_cast<double>(i + 1) * dt;
    prev_gap.swap(gap);
    stepper.advance(z, v, leader_coordinate(t), leader_coordinate(t + 0.5 * dt),
                    leader_coordinate(t_next), dt);
    compute_gaps();
    track_extrema();

    if (!rec.first_collision) {
      for (std::size_t j = 0; j < n; ++j) {
        if (gap[j] < 0.0 && prev_gap[j] >= 0.0) {
          const double frac = prev_gap[j] / (prev_gap[j] - gap[j]);
          const double when = t + frac * dt;
          if (!rec.first_collision || when < rec.first_collision->time) {
            rec.first_collision = CollisionEvent{when, j + 1};
          }
        }
      }
    }
    if ((i + 1) % stride == 0) store_sample(t_next);
  }
  return rec;
}

void write_trajectory_csv(std::ostream& out, const TrajectoryRecord& record) {
  std::string line;
  out << "t,k,r,v,q\n";
  for (std::size_t s = 0; s < record.samples(); ++s) {
    for (std::size_t k = 1; k <= record.cars; ++k) {
      line.clear();
      append_number(line, record.times[s]);
      line += ',';
      line += std::to_string(k);
      line += ',';
      append_number(line, record.gap(s, k));
      line += ',';
      append_number(line, record.velocity(s, k));
      line += ',';
      if (record.has_deviations()) {
        append_number(line, record.deviation(s, k));
      } else {
        line += "nan";
      }
      line += '\n';
      out << line;
    }
  }
}

}  // namespace chainlab
