#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "chainlab/integrator.hpp"
#include "chainlab/oracle.hpp"

using namespace chainlab;

namespace {

std::vector<double> uniform_grid(double T, double h) {
  std::vector<double> g;
  const auto n = static_cast<long>(std::lround(T / h));
  for (long i = 0; i <= n; ++i) g.push_back(static_cast<double>(i) * h);
  return g;
}

double homogeneous_alpha3(double t) {
  const double lp = (-3.0 + std::sqrt(5.0)) / 2.0;
  const double lm = (-3.0 - std::sqrt(5.0)) / 2.0;
  return (lp * std::exp(lm * t) - lm * std::exp(lp * t)) / (lp - lm);
}

}  // namespace

TEST_CASE("kernel roots satisfy Vieta for every root kind") {
  for (const ControlParams p : {ControlParams{3.0, 1.0, 1.0}, ControlParams{2.0, 1.0, 1.0},
                                ControlParams{1.0, 1.0, 1.0}, ControlParams{0.0, 2.0, 1.0}}) {
    const KernelParams kp = kernel_params(p);
    const auto sum = kp.lambda_plus + kp.lambda_minus;
    const auto prod = kp.lambda_plus * kp.lambda_minus;
    CHECK(sum.real() == doctest::Approx(-p.alpha));
    CHECK(sum.imag() == doctest::Approx(0.0));
    CHECK(prod.real() == doctest::Approx(p.omega * p.omega));
    CHECK(prod.imag() == doctest::Approx(0.0));
  }
  CHECK(kernel_params({3.0, 1.0, 1.0}).kind == RootKind::DistinctReal);
  CHECK(kernel_params({2.0, 1.0, 1.0}).kind == RootKind::Double);
  CHECK(kernel_params({1.0, 1.0, 1.0}).kind == RootKind::Complex);
}

TEST_CASE("impulse response solves the kernel ODE") {
  const double h = 1e-4;
  for (const ControlParams p : {ControlParams{3.0, 1.0, 1.0}, ControlParams{2.0, 1.0, 1.0},
                                ControlParams{1.0, 1.0, 1.0}}) {
    const KernelParams kp = kernel_params(p);
    CHECK(impulse_response(kp, p.alpha, 0.0) == doctest::Approx(0.0));
    CHECK(impulse_response_derivative(kp, p.alpha, 0.0) == doctest::Approx(1.0));
    for (double t : {0.5, 1.3, 4.0}) {
      const double K = impulse_response(kp, p.alpha, t);
      const double dK = impulse_response_derivative(kp, p.alpha, t);
      const double ddK = (impulse_response(kp, p.alpha, t + h) - 2 * K + impulse_response(kp, p.alpha, t - h)) / (h * h);
      CHECK(ddK + p.alpha * dK + p.omega * p.omega * K == doctest::Approx(0.0).epsilon(1e-5));
      const double fd = (impulse_response(kp, p.alpha, t + h) - impulse_response(kp, p.alpha, t - h)) / (2 * h);
      CHECK(fd == doctest::Approx(dK).epsilon(1e-7));
    }
  }
}

TEST_CASE("vc_solve_next homogeneous and zero data") {
  const ControlParams p{3.0, 1.0, 1.0};
  const auto grid = uniform_grid(10.0, 0.01);
  const std::vector<double> zero(grid.size(), 0.0);
  for (double x : vc_solve_next(zero, 0.0, 0.0, p, grid)) CHECK(x == 0.0);
  const auto x = vc_solve_next(zero, 1.0, 0.0, p, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) CHECK(std::abs(x[i] - homogeneous_alpha3(grid[i])) < 1e-12);
}

TEST_CASE("vc_solve_next with constant forcing") {
  // x'' + 3x' + x = 1, x(0) = x'(0) = 0 has x = 1 - homogeneous(t).
  const ControlParams p{3.0, 1.0, 1.0};
  for (double h : {0.01, 0.013}) {
    const auto grid = uniform_grid(10.0, h);
    const std::vector<double> one(grid.size(), 1.0);
    const auto x = vc_solve_next(one, 0.0, 0.0, p, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) CHECK(std::abs(x[i] - (1.0 - homogeneous_alpha3(grid[i]))) < 1e-8);
  }
}

TEST_CASE("vc_solve_next input checks") {
  const ControlParams p{3.0, 1.0, 1.0};
  const std::vector<double> grid = {0.0, 0.1, 0.25};
  const std::vector<double> f = {0.0, 0.0, 0.0};
  CHECK_THROWS_AS(vc_solve_next(f, 0.0, 0.0, p, grid), DomainError);
  const std::vector<double> short_f = {0.0, 0.0};
  CHECK_THROWS_AS(vc_solve_next(short_f, 0.0, 0.0, p, uniform_grid(0.2, 0.1)), DomainError);
}

TEST_CASE("chained oracle matches the integrator") {
  const ControlParams p{4.0, 1.0, 1.0};
  const ConstantVelocity lead{1.0};
  const PerturbedLattice ic{5, 1.0, 0.1, 0.1};
  const TrajectoryRecord rec = simulate(ic, p, lead, 20.0, 1e-3, 10);
  const ChainState s0 = build_initial_state(ic, p, lead);
  std::vector<double> prev(rec.samples());
  for (std::size_t i = 0; i < rec.samples(); ++i) prev[i] = leader_forcing(lead, p, rec.times[i]);
  for (std::size_t k = 1; k <= 5; ++k) {
    const auto x = vc_solve_next(prev, s0.gap(k) - p.d, s0.v[k - 1] - s0.v[k], p, rec.times);
    double worst = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double sim = rec.gap(i, k) - p.d;
      worst = std::max(worst, std::abs(x[i] - sim));
      scale = std::max(scale, std::abs(sim));
    }
    CHECK(worst / scale <= 1e-5);
    for (std::size_t i = 0; i < x.size(); ++i) prev[i] = rec.gap(i, k) - p.d;
  }
}

TEST_CASE("resonance_x1") {
  const double pi = std::numbers::pi;
  CHECK(resonance_x1(0.0, 2.0, 1.0) == doctest::Approx(0.0));
  CHECK(resonance_x1(pi, 2.0, 1.0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(resonance_x1(pi / 2, 2.0, 1.0) == doctest::Approx(1.0 / 3.0));
  CHECK_THROWS_AS(resonance_x1(1.0, 1.0, 1.0), ResonantCase);
  CHECK_THROWS_AS(resonance_x1(1.0, 1.0, 1.0), DomainError);
  CHECK_THROWS_AS(resonance_x1(1.0, 0.0, 1.0), DomainError);

  // x'' + omega^2 x = sin(omega0 t) with zero initial data.
  const double h = 1e-4;
  for (double t : {0.4, 1.7, 3.3, 9.0}) {
    const double x = resonance_x1(t, 2.0, 1.0);
    const double xpp = (resonance_x1(t + h, 2.0, 1.0) - 2 * x + resonance_x1(t - h, 2.0, 1.0)) / (h * h);
    CHECK(std::abs(xpp + 4.0 * x - std::sin(t)) < 1e-4);
  }
  CHECK(std::abs(resonance_x1(h, 2.0, 1.0) - resonance_x1(-h, 2.0, 1.0)) / (2 * h) < 1e-7);
}

TEST_CASE("uniform deviation bound") {
  const ControlParams p{4.0, 1.0, 1.0};
  CHECK(lemma_bound(0.7, 0.0, 0.0, p) == doctest::Approx(0.7));
  CHECK(lemma_bound(0.0, 1.0, 1.0, p) == doctest::Approx(std::sqrt(3.0)));
  CHECK(lemma_bound(10.0, 1.0, 1.0, p) == doctest::Approx(10.0));
  CHECK_THROWS_AS(lemma_bound(0.0, 1.0, 1.0, ControlParams{2.0, 1.0, 1.0}), DomainError);
}

TEST_CASE("f_t_max bound") {
  CHECK(f_t_max_bound(0.0, 0.0, 2.0, -1.0, -2.0) == doctest::Approx(2.0));
  auto sampled_sup = [](double a, double b, double c, double lp, double lm, bool absolute) {
    double sup = -INFINITY;
    for (double t = 0.0; t <= 50.0; t += 1e-3) {
      const double f = a * std::exp(lp * t) + b * std::exp(lm * t) + c;
      sup = std::max(sup, absolute ? std::abs(f) : f);
    }
    return sup;
  };
  CHECK(f_t_max_bound(1.0, 1.0, 1.0, -1.0, -2.0) == doctest::Approx(3.0));
  CHECK(sampled_sup(1.0, 1.0, 1.0, -1.0, -2.0, true) == doctest::Approx(3.0));
  // For a < 0 the bound controls the signed supremum; |f(0)| = 3 exceeds it.
  const double bound = f_t_max_bound(-5.0, 1.0, 1.0, -1.0, -2.0);
  CHECK(bound == doctest::Approx(1.0));
  CHECK(sampled_sup(-5.0, 1.0, 1.0, -1.0, -2.0, false) <= bound);
  CHECK_THROWS_AS(f_t_max_bound(1.0, 1.0, 1.0, -2.0, -1.0), DomainError);
  CHECK_THROWS_AS(f_t_max_bound(1.0, -1.0, 1.0, -1.0, -2.0), DomainError);
  CHECK_THROWS_AS(f_t_max_bound(1.0, 1.0, 0.0, -1.0, -2.0), DomainError);
}

TEST_CASE("mean length law") {
  for (double t : {0.0, 1.0, 10.0}) CHECK(mean_length_law(2.5, 0.0, 1.0, t) == doctest::Approx(2.5));
  CHECK(mean_length_law(1.0, 4.0, 2.0, 0.0) == doctest::Approx(1.0));
  CHECK(mean_length_law(1.0, 4.0, 2.0, 1e3) == doctest::Approx(3.0));
  CHECK(mean_length_law(1.0, 4.0, 1e-14, 2.0) == doctest::Approx(9.0));
  const double h = 1e-4;
  for (double t : {0.3, 1.0, 2.5}) {
    const double L = mean_length_law(1.0, 4.0, 2.0, t);
    const double Lp = (mean_length_law(1.0, 4.0, 2.0, t + h) - mean_length_law(1.0, 4.0, 2.0, t - h)) / (2 * h);
    const double Lpp = (mean_length_law(1.0, 4.0, 2.0, t + h) - 2 * L + mean_length_law(1.0, 4.0, 2.0, t - h)) / (h * h);
    CHECK(std::abs(Lpp + 2.0 * Lp) < 1e-6);
  }
  CHECK_THROWS_AS(mean_length_law(1.0, 1.0, 0.0, 1.0), DomainError);
}

TEST_CASE("stationary current") {
  CHECK(stationary_current({2.0, 1.0, 1.0}, 0.0) == 0.0);
  CHECK(stationary_current({2.0, 1.0, 1.0}, 1.0) == doctest::Approx(1.0 / 3.0));
  CHECK(stationary_current({1e-15, 1.0, 2.0}, 3.0) == doctest::Approx(1.5));
  CHECK_THROWS_AS(stationary_current({2.0, 1.0, 1.0}, -1.0), DomainError);
}

TEST_CASE("leader forcing") {
  const ControlParams p{2.0, 1.0, 1.0};
  CHECK(leader_forcing(ConstantVelocity{1.0}, p, 3.0) == doctest::Approx(2.0));
  const Sinusoid s{1.0, 0.5, 2.0};
  const Kinematics k = leader_kinematics(s, 0.7);
  CHECK(leader_forcing(s, p, 0.7) == doctest::Approx(k.acceleration + 2.0 * k.velocity));
}
