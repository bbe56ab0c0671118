#pragma once

#include <complex>
#include <span>
#include <vector>

#include "chainlab/model.hpp"

namespace chainlab {

/// Root structure of G(lambda) = lambda^2 + alpha lambda + omega^2.
enum class RootKind {
  DistinctReal,  // alpha > 2 omega
  Double,        // alpha == 2 omega
  Complex,       // alpha < 2 omega
};

struct KernelParams {
  std::complex<double> lambda_plus;
  std::complex<double> lambda_minus;
  double gamma = 0.0;  // sqrt(alpha^2/4 - omega^2) for real roots
  double tau = 0.0;    // sqrt(omega^2 - alpha^2/4) for complex roots
  RootKind kind = RootKind::Complex;
};

KernelParams kernel_params(const ControlParams& params);

/// Impulse response K of x'' + alpha x' + omega^2 x (K(0) = 0, K'(0) = 1) and
/// its derivative.
double impulse_response(const KernelParams& kp, double alpha, double t);
double impulse_response_derivative(const KernelParams& kp, double alpha, double t);

/// Solves x'' + alpha x' + omega^2 x = omega^2 x_prev(t) with x(0) = x0,
/// x'(0) = xdot0 by variation of constants: the homogeneous solution plus the
/// convolution omega^2 * (K * x_prev), integrated with composite Simpson on the
/// sample grid (3/8 rule on the last three panels when the panel count is odd;
/// exact kernel moments against linear forcing on a single panel).
/// Throws DomainError when the grid is not uniform or sizes differ.
std::vector<double> vc_solve_next(std::span<const double> x_prev, double x0, double xdot0,
                                  const ControlParams& params, std::span<const double> grid);

/// Thrown by resonance_x1 when the leader frequency equals the chain's natural
/// frequency, where x_1 grows without bound.
class ResonantCase : public DomainError {
public:
  using DomainError::DomainError;
};

/// (sin(omega0 t) - (omega0/omega) sin(omega t)) / (omega^2 - omega0^2): the
/// solution of x'' + omega^2 x = sin(omega0 t) with x(0) = x'(0) = 0. For the
/// undamped chain behind z0 = v t + A sin(omega0 t) started on its lattice with
/// z_1'(0) = z_0'(0), the first gap deviation is -A omega0^2 times this.
double resonance_x1(double t, double omega, double omega0);

/// Q' = max{Q, (alpha A + 2 C) / (2 gamma)}, the uniform bound on |x_k(t)| in
/// the stable sector given sup|x_0| = Q, sup|x_k(0)| = A, sup|x_k'(0)| = C.
double lemma_bound(double Q, double A, double C, const ControlParams& params);

/// max{c, a + b + c}: bounds sup_{t >= 0} |a e^{l+ t} + b e^{l- t} + c| for
/// l- < l+ < 0, b >= 0, c > 0.
double f_t_max_bound(double a, double b, double c, double lambda_plus, double lambda_minus);

/// L(t) = L0 + (1 - e^{-alpha t}) L0dot / alpha, the infinite-chain mean length.
double mean_length_law(double L0, double L0dot, double alpha, double t);

/// Cars per unit time in stationary flow: v / a = omega^2 v / (omega^2 d + alpha v).
double stationary_current(const ControlParams& params, double v);

/// x_0(t) = (z0'' + alpha z0') / omega^2, the virtual gap deviation that drives car 1.
double leader_forcing(const LeaderSpec& leader, const ControlParams& params, double t);

}  // namespace chainlab
