#include "chainlab/oracle.hpp"

#include <algorithm>
#include <cmath>

namespace chainlab {

KernelParams kernel_params(const ControlParams& params) {
  params.validate_allow_undamped();
  const double half = 0.5 * params.alpha;
  const double w = params.omega;
  KernelParams kp;
  if (params.alpha > 2.0 * w) {
    kp.kind = RootKind::DistinctReal;
    kp.gamma = std::sqrt((half - w) * (half + w));
    // lambda_+ via the product of roots avoids cancellation.
    const double lm = -(half + kp.gamma);
    kp.lambda_minus = lm;
    kp.lambda_plus = w * w / lm;
  } else if (params.alpha == 2.0 * w) {
    kp.kind = RootKind::Double;
    kp.lambda_plus = kp.lambda_minus = -half;
  } else {
    kp.kind = RootKind::Complex;
    kp.tau = std::sqrt((w - half) * (w + half));
    kp.lambda_plus = {-half, kp.tau};
    kp.lambda_minus = {-half, -kp.tau};
  }
  return kp;
}

double impulse_response(const KernelParams& kp, double alpha, double t) {
  switch (kp.kind) {
    case RootKind::DistinctReal: {
      // (e^{l+ t} - e^{l- t}) / (2 gamma) = e^{l+ t} (1 - e^{-2 gamma t}) / (2 gamma)
      const double g2 = 2.0 * kp.gamma;
      return std::exp(kp.lambda_plus.real() * t) * (-std::expm1(-g2 * t)) / g2;
    }
    case RootKind::Double:
      return t * std::exp(-0.5 * alpha * t);
    case RootKind::Complex:
      return std::exp(-0.5 * alpha * t) * std::sin(kp.tau * t) / kp.tau;
  }
  return 0.0;
}

double impulse_response_derivative(const KernelParams& kp, double alpha, double t) {
  switch (kp.kind) {
    case RootKind::DistinctReal: {
      const double g2 = 2.0 * kp.gamma;
      const double lm = kp.lambda_minus.real();
      return std::exp(kp.lambda_plus.real() * t) * (1.0 + lm * (-std::expm1(-g2 * t)) / g2);
    }
    case RootKind::Double:
      return (1.0 - 0.5 * alpha * t) * std::exp(-0.5 * alpha * t);
    case RootKind::Complex: {
      const double s = std::sin(kp.tau * t);
      const double c = std::cos(kp.tau * t);
      return std::exp(-0.5 * alpha * t) * (c - 0.5 * alpha / kp.tau * s);
    }
  }
  return 0.0;
}

std::vector<double> vc_solve_next(std::span<const double> x_prev, double x0, double xdot0,
                                  const ControlParams& params, std::span<const double> grid) {
  if (grid.size() != x_prev.size()) throw DomainError("forcing samples and grid differ in length");
  if (grid.empty()) return {};
  const std::size_t n = grid.size();
  const double h = n > 1 ? (grid[n - 1] - grid[0]) / static_cast<double>(n - 1) : 0.0;
  for (std::size_t i = 1; i < n; ++i) {
    const double step = grid[i] - grid[i - 1];
    if (!(h > 0.0) || std::abs(step - h) > 1e-9 * std::max(1.0, std::abs(grid[i]))) {
      throw DomainError("variation-of-constants oracle requires a uniform increasing grid");
    }
  }

  const KernelParams kp = kernel_params(params);
  const double al = params.alpha;
  const double w2 = params.omega * params.omega;

  // Kernel and homogeneous part on the grid, relative to grid[0].
  std::vector<double> kernel(n), out(n);
  for (std::size_t m = 0; m < n; ++m) {
    const double t = static_cast<double>(m) * h;
    kernel[m] = impulse_response(kp, al, t);
    out[m] = x0 * impulse_response_derivative(kp, al, t) + (xdot0 + al * x0) * kernel[m];
  }

  // f_j = K(t_m - s_j) x_prev(s_j); weights depend on the panel count m.
  for (std::size_t m = 1; m < n; ++m) {
    auto f = [&](std::size_t j) { return kernel[m - j] * x_prev[j]; };
    double integral = 0.0;
    if (m == 1) {
      // Single panel: x_prev linear, kernel moments in closed form.
      const double dK = impulse_response_derivative(kp, al, h);
      const double m0 = (1.0 - dK - al * kernel[1]) / w2;
      const double m1 = (kernel[1] - h * dK - al * (h * kernel[1] - m0)) / w2;
      integral = x_prev[1] * m0 - (x_prev[1] - x_prev[0]) / h * m1;
    } else {
      const std::size_t simpson_end = (m % 2 == 0) ? m : m - 3;
      if (simpson_end > 0) {
        double acc = f(0) + f(simpson_end);
        for (std::size_t j = 1; j < simpson_end; ++j) acc += (j % 2 == 1 ? 4.0 : 2.0) * f(j);
        integral += acc * h / 3.0;
      }
      if (simpson_end != m) {
        const std::size_t j = simpson_end;
        integral += 3.0 * h / 8.0 * (f(j) + 3.0 * f(j + 1) + 3.0 * f(j + 2) + f(j + 3));
      }
    }
    out[m] += w2 * integral;
  }
  return out;
}

double resonance_x1(double t, double omega, double omega0) {
  if (!(omega > 0.0) || !(omega0 > 0.0)) throw DomainError("frequencies must be positive");
  if (std::abs(omega - omega0) <= 1e-12 * std::max(omega, omega0)) {
    throw ResonantCase("first particle resonance: omega equals omega0, x_1 is unbounded");
  }
  return (std::sin(omega0 * t) - omega0 / omega * std::sin(omega * t)) /
         ((omega - omega0) * (omega + omega0));
}

double lemma_bound(double Q, double A, double C, const ControlParams& params) {
  params.validate();
  if (!(params.alpha > 2.0 * params.omega)) throw DomainError("uniform deviation bound requires alpha > 2 omega");
  const double gamma = kernel_params(params).gamma;
  return std::max(Q, (params.alpha * A + 2.0 * C) / (2.0 * gamma));
}

double f_t_max_bound(double a, double b, double c, double lambda_plus, double lambda_minus) {
  if (!(lambda_minus < lambda_plus && lambda_plus < 0.0)) {
    throw DomainError("f_t_max_bound requires lambda_- < lambda_+ < 0");
  }
  if (!(b >= 0.0) || !(c > 0.0)) throw DomainError("f_t_max_bound requires b >= 0 and c > 0");
  return std::max(c, a + b + c);
}

double mean_length_law(double L0, double L0dot, double alpha, double t) {
  if (!(alpha > 0.0)) throw DomainError("mean length law requires alpha > 0");
  if (!(t >= 0.0)) throw DomainError("mean length law requires t >= 0");
  return L0 + (-std::expm1(-alpha * t)) / alpha * L0dot;
}

double stationary_current(const ControlParams& params, double v) {
  if (!(v >= 0.0)) throw DomainError("stationary current requires v >= 0");
  const double w2 = params.omega * params.omega;
  return w2 * v / (w2 * params.d + params.alpha * v);
}

double leader_forcing(const LeaderSpec& leader, const ControlParams& params, double t) {
  const Kinematics k = leader_kinematics(leader, t);
  return (k.acceleration + params.alpha * k.velocity) / (params.omega * params.omega);
}

}  // namespace chainlab
