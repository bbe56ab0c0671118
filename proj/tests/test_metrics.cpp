#include <doctest.h>
#include <json.hpp>

#include <cmath>
#include <numbers>

#include "chainlab/integrator.hpp"
#include "chainlab/metrics.hpp"
#include "chainlab/spectral.hpp"

using namespace chainlab;

namespace {

// q_j(t) = e^{f t / mu} / sqrt(t / mu) sin(Omega t / mu + phi) on every car.
TrajectoryRecord synthetic_ray(double f, double Omega, double phi, double mu, std::size_t cars) {
  TrajectoryRecord r;
  r.cars = cars;
  r.dt = 0.005;
  r.stride = 1;
  r.headway = 1.0;
  r.reference_velocity = 0.0;
  r.spacing = 1.0;
  const double T = mu * static_cast<double>(cars);
  for (double t = 0.0; t <= T + 1e-9; t += r.dt) {
    r.times.push_back(t);
    const double k = t / mu;
    const double q = k > 0.0 ? std::exp(f * k) / std::sqrt(k) * std::sin(Omega * k + phi) : 0.0;
    for (std::size_t j = 0; j < cars; ++j) {
      r.deviations.push_back(q);
      r.gaps.push_back(1.0);
      r.velocities.push_back(0.0);
    }
  }
  r.min_gap.assign(cars, 1.0);
  r.max_gap.assign(cars, 1.0);
  return r;
}

}  // namespace

TEST_CASE("gap extrema on a stationary run") {
  const ControlParams p{2.0, 1.0, 1.0};
  const TrajectoryRecord rec = simulate(EquilibriumLattice{10, 1.0}, p, ConstantVelocity{1.0}, 50.0, 0.01, 20);
  const StabilityReport r = gap_extrema(rec);
  CHECK(std::abs(r.I_hat - 3.0) <= 1e-9);
  CHECK(std::abs(r.S_hat - 3.0) <= 1e-9);
  REQUIRE(r.velocity_deviation.has_value());
  CHECK(*r.velocity_deviation <= 1e-9);
  CHECK(velocity_deviation(rec, 1.0) <= 1e-9);
  CHECK(r.cars == 10);
  CHECK(r.horizon == doctest::Approx(50.0));
  CHECK_FALSE(r.first_collision.has_value());
  for (double t : {0.0, 7.3, 50.0}) CHECK(mean_length(rec, t) == doctest::Approx(3.0));
  CHECK_THROWS_AS(mean_length(rec, 50.5), DomainError);
  CHECK_THROWS_AS(mean_length(rec, -0.1), DomainError);
}

TEST_CASE("stable-sector run stays within its margin") {
  const ControlParams p{4.0, 1.0, 1.0};
  const TrajectoryRecord rec = simulate(PerturbedLattice{100, 1.0, 0.1, 0.0}, p, ConstantVelocity{1.0}, 200.0, 1e-3, 100);
  const StabilityReport r = gap_extrema(rec);
  const Margin m = margin_theorem1(0.1, 0.0, 0.0, p, 1.0);
  CHECK(m.value == doctest::Approx(0.23094).epsilon(1e-5));
  CHECK(r.I_hat >= m.lower_bound - 1e-6);
  CHECK(r.I_hat <= r.S_hat);
  CHECK(r.S_hat <= m.upper_bound + 1e-6);
}

TEST_CASE("unstable chain collides") {
  const ControlParams p{1.0, 1.0, 1.0};
  const TrajectoryRecord rec = simulate(SingleVelocityKick{300, 1.0, 0.01}, p, ConstantVelocity{1.0}, 600.0, 5e-3, 200);
  const StabilityReport r = gap_extrema(rec);
  CHECK(r.I_hat < 0.0);
  CHECK(r.first_collision.has_value());
}

TEST_CASE("extrema are monotone in the horizon") {
  const ControlParams p{1.5, 1.0, 1.0};
  const PerturbedLattice ic{30, 1.0, 0.1, 0.1};
  const StabilityReport shorter = gap_extrema(simulate(ic, p, Sinusoid{1.0, 0.2, 0.9}, 50.0, 0.01, 10));
  const StabilityReport longer = gap_extrema(simulate(ic, p, Sinusoid{1.0, 0.2, 0.9}, 100.0, 0.01, 10));
  CHECK(longer.I_hat <= shorter.I_hat);
  CHECK(longer.S_hat >= shorter.S_hat);
}

TEST_CASE("velocity deviation under a sinusoid leader") {
  const ControlParams p{4.0, 1.0, 1.0};
  const TrajectoryRecord rec = simulate(EquilibriumLattice{20, 1.0}, p, Sinusoid{1.0, 0.1, 1.0}, 60.0, 0.01, 5);
  const double dev = velocity_deviation(rec, 1.0);
  CHECK(dev <= 0.1 + 1e-6);
  CHECK(dev > 0.01);
}

TEST_CASE("mean length interpolates between samples") {
  const ControlParams p{2.0, 1.0, 1.0};
  const TrajectoryRecord rec = simulate(PerturbedLattice{10, 1.0, 0.2, 0.3}, p, ConstantVelocity{1.0}, 5.0, 0.01, 50);
  auto L = [&](std::size_t s) {
    double sum = 0.0;
    for (std::size_t k = 1; k <= rec.cars; ++k) sum += rec.gap(s, k);
    return sum / static_cast<double>(rec.cars);
  };
  CHECK(mean_length(rec, rec.times[3]) == doctest::Approx(L(3)));
  const double mid = 0.5 * (rec.times[3] + rec.times[4]);
  CHECK(mean_length(rec, mid) == doctest::Approx(0.5 * (L(3) + L(4))));
}

TEST_CASE("ray samples read q_{k+1} at t = mu k") {
  const ControlParams p{1.0, 1.0, 1.0};
  const TrajectoryRecord rec = simulate(SingleVelocityKick{20, 1.0, 0.01}, p, ConstantVelocity{1.0}, 30.0, 0.01, 10);
  const auto y = ray_samples(rec, 2.0);
  REQUIRE(y.size() == 15);
  CHECK(y[4] == doctest::Approx(rec.deviation(100, 6)));
  CHECK_THROWS_AS(ray_samples(rec, 0.0), DomainError);
}

TEST_CASE("growth and phase fits recover a synthetic ray") {
  const double f = 0.15, Omega = 0.46, phi = 0.9, mu = 2.0;
  const TrajectoryRecord rec = synthetic_ray(f, Omega, phi, mu, 220);
  const GrowthFit g = ray_growth_fit(rec, mu, 50, 200);
  CHECK(g.slope == doctest::Approx(f).epsilon(0.02));
  CHECK(g.points >= 140);
  const PhaseFit ph = ray_phase_fit(rec, mu, 50, 200);
  CHECK(ph.omega == doctest::Approx(Omega).epsilon(1e-3));
  CHECK(ph.phase_mod_pi == doctest::Approx(phi).epsilon(1e-2));
  CHECK(ph.crossings >= 20);

  CHECK_THROWS_AS(ray_growth_fit(rec, mu, 50, 500), DomainError);
  CHECK_THROWS_AS(ray_growth_fit(rec, mu, 50, 55), DomainError);
  CHECK_THROWS_AS(ray_phase_fit(rec, mu, 50, 52), DomainError);
}

TEST_CASE("growth fit on a stable record is negative") {
  const ControlParams p{3.0, 1.0, 1.0};
  const TrajectoryRecord rec = simulate(SingleVelocityKick{60, 1.0, 0.01}, p, ConstantVelocity{1.0}, 60.0, 0.01, 5);
  const GrowthFit g = ray_growth_fit(rec, 2.0 / 3.0, 10, 50);
  CHECK(g.slope < 0.0);
}

TEST_CASE("growth exponent along the fastest ray") {
  const ControlParams p{1.0, 1.0, 1.0};
  const double mu = 2.0;
  const TrajectoryRecord rec = simulate(SingleVelocityKick{260, 1.0, 1e-3}, p, ConstantVelocity{1.0}, 500.0, 2e-3, 50);
  const GrowthFit g = ray_growth_fit(rec, mu, 50, 200);
  const SaddleData s = saddle_analysis(mu, p, 1e-3);
  CHECK(std::abs(g.slope - s.f) <= 0.05 * s.f);
}

TEST_CASE("report JSON") {
  StabilityReport r;
  r.I_hat = 0.1 + 0.2;
  r.S_hat = 1.0 / 3.0;
  r.horizon = 10.0;
  r.cars = 7;
  auto j = nlohmann::json::parse(report_json(r));
  CHECK(j["I_hat"].get<double>() == r.I_hat);
  CHECK(j["S_hat"].get<double>() == r.S_hat);
  CHECK(j["first_collision"].is_null());
  CHECK(j["velocity_deviation"].is_null());
  CHECK(j["cars"].get<int>() == 7);

  r.first_collision = CollisionEvent{2.5, 3};
  r.velocity_deviation = 0.01;
  r.I_hat = -INFINITY;
  j = nlohmann::json::parse(report_json(r));
  CHECK(j["first_collision"]["time"].get<double>() == 2.5);
  CHECK(j["first_collision"]["car"].get<int>() == 3);
  CHECK(j["velocity_deviation"].get<double>() == 0.01);
  CHECK(j["I_hat"].is_null());
}
