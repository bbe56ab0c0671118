#pragma once

#include <complex>
#include <optional>

#include "chainlab/model.hpp"

namespace chainlab {

using Complex = std::complex<double>;

// ---------------------------------------------------------------------------
// Spectrum of the infinite chain operator

/// True iff |z^2 + alpha z + omega^2| <= omega^2.
bool in_spectrum(Complex z, const ControlParams& params);

/// Quartic form h(a, b) = b^4 + A(a) b^2 + B(a) whose sign decides membership
/// of z = a + ib (h <= 0 inside).
double spectral_quartic(double re, double im, const ControlParams& params);

/// Grid scan of {0 < Re z <= box, |Im z| <= box} at the given spacing; returns
/// the first spectrum point found, if any.
std::optional<Complex> spectrum_positive_real_witness(const ControlParams& params, double box,
                                                      double resolution);

// ---------------------------------------------------------------------------
// Stability margins. Each returns the margin value, whether the hypothesis
// (margin below its threshold) holds, and the implied gap bounds.

struct Margin {
  double value = 0.0;
  bool hypothesis_satisfied = false;
  double lower_bound = 0.0;
  double upper_bound = 0.0;
};

/// epsilon = 2 max{delta, (theta + 2 v beta / (alpha a)) / sqrt(1 - (2 omega / alpha)^2)},
/// bounds (1 -+ epsilon) a. Requires alpha > 2 omega and 0 <= delta < 1/2.
Margin margin_theorem1(double theta, double beta, double delta, const ControlParams& params,
                       double v);

/// zeta, the delta = 0 case of margin_theorem1.
Margin margin_theorem2_zeta(double theta, double beta, const ControlParams& params, double v);

/// eta = max{d*/d, (theta + 2 beta / (alpha d)) / sqrt(1 - (2 omega / alpha)^2)},
/// bounds (1 -+ eta) d. beta is an absolute speed. alpha == 2 omega is accepted
/// only with theta == beta == 0.
Margin margin_theorem3(double theta, double beta_abs, const ControlParams& params,
                       const LeaderSpec& leader);
Margin margin_theorem3(double theta, double beta_abs, const ControlParams& params,
                       double leader_d_star);

/// eta = 2 (theta + beta v / (a omega) + sigma), bounds (1 -+ 2 eta) a.
/// hypothesis_satisfied is the safety condition eta < 1/2. Restricted sector only.
Margin margin_theorem4(double theta, double beta, double sigma, const ControlParams& params,
                       double v);

/// eta = 2 (theta + beta / (omega d) + sigma), bounds (1 -+ eta) d.
/// hypothesis_satisfied is the safety condition eta < 1. Restricted sector only.
Margin margin_theorem5(double theta, double beta_abs, double sigma, const ControlParams& params);

// ---------------------------------------------------------------------------
// Saddle-point asymptotics of the kicked chain along rays t = mu k

struct SaddleData {
  double mu = 0.0;
  double tau = 0.0;    // sqrt(omega^2 - alpha^2 / 4)
  double nu = 0.0;     // sqrt(mu^2 tau^2 - 1)
  Complex z_plus;      // -alpha/2 + 1/mu + i nu/mu
  Complex z_minus;
  double f = 0.0;      // growth exponent per index
  double phi0 = 0.0;   // arctan(nu)
  double Omega = 0.0;  // nu - arctan(nu)
  double c = 0.0;      // epsilon sqrt(2 tau / (pi nu mu))
  Complex spp_plus;    // S''(z_plus) = nu (nu + i) / tau^2
};

/// Requires alpha < 2 omega and mu tau > 1.
SaddleData saddle_analysis(double mu, const ControlParams& params, double epsilon);

/// S(z) = mu z - log(z^2 + alpha z + omega^2) + log(omega^2), principal branch.
Complex saddle_phase(Complex z, double mu, const ControlParams& params);

/// h(x) = 1 - ln 2 - x / sqrt(1 - x^2) - ln(1 - x^2) on [0, 1); equals the growth
/// exponent at the slowest admissible ray mu = 1/tau with x = alpha / (2 omega).
double h_function(double x);

/// (c / sqrt(k)) e^{k f} sin(Omega k + phi0), the predicted q_{k+1}(mu k).
double asymptotic_envelope(double k, const SaddleData& data);

/// The ray slope 2/alpha maximizing the growth exponent f(mu).
double fastest_growth_ray(const ControlParams& params);

}  // namespace chainlab
