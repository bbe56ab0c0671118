#include "chainlab/spectral.hpp"

#include <cmath>
#include <numbers>

namespace chainlab {

namespace {

void require_stable_sector(const ControlParams& params, const char* what) {
  params.validate();
  if (!(params.alpha > 2.0 * params.omega)) {
    throw DomainError(std::string(what) + " requires alpha > 2 omega");
  }
}

void require_restricted_sector(const ControlParams& params, const char* what) {
  params.validate();
  if (sector_classify(params) != SectorClass::Restricted) {
    throw DomainError(std::string(what) + " requires sqrt(2) omega <= alpha <= 2 omega");
  }
}

void require_nonnegative(double x, const char* name) {
  if (!(x >= 0.0) || !std::isfinite(x)) throw DomainError(std::string(name) + " must be non-negative");
}

// sqrt(1 - (2 omega / alpha)^2)
double damping_factor(const ControlParams& params) {
  const double r = 2.0 * params.omega / params.alpha;
  return std::sqrt((1.0 - r) * (1.0 + r));
}

Margin symmetric_margin(double value, bool ok, double centre, double width) {
  return Margin{value, ok, (1.0 - width) * centre, (1.0 + width) * centre};
}

}  // namespace

bool in_spectrum(Complex z, const ControlParams& params) {
  const double w2 = params.omega * params.omega;
  return std::abs(z * z + params.alpha * z + w2) <= w2;
}

double spectral_quartic(double re, double im, const ControlParams& params) {
  const double al = params.alpha;
  const double w2 = params.omega * params.omega;
  const double A = 2.0 * re * re + 2.0 * al * re + al * al - 2.0 * w2;
  const double B = re * (re + al) * (re * re + al * re + 2.0 * w2);
  const double b2 = im * im;
  return b2 * b2 + A * b2 + B;
}

std::optional<Complex> spectrum_positive_real_witness(const ControlParams& params, double box,
                                                      double resolution) {
  if (!(resolution > 0.0)) throw DomainError("resolution must be positive");
  if (!(box > 0.0)) throw DomainError("search box must be positive");
  const long re_steps = static_cast<long>(std::floor(box / resolution + 1e-9));
  const long im_steps = re_steps;
  for (long i = 1; i <= re_steps; ++i) {
    const double re = static_cast<double>(i) * resolution;
    for (long j = -im_steps; j <= im_steps; ++j) {
      const Complex z{re, static_cast<double>(j) * resolution};
      if (in_spectrum(z, params)) return z;
    }
  }
  return std::nullopt;
}

Margin margin_theorem1(double theta, double beta, double delta, const ControlParams& params, double v) {
  require_stable_sector(params, "margin_theorem1");
  require_nonnegative(theta, "theta");
  require_nonnegative(beta, "beta");
  require_nonnegative(delta, "delta");
  require_nonnegative(v, "v");
  if (!(delta < 0.5)) throw DomainError("margin_theorem1 requires delta < 1/2");
  const double a = equilibrium_spacing(params, v);
  const double spread = (theta + 2.0 * v * beta / (params.alpha * a)) / damping_factor(params);
  const double eps = 2.0 * std::max(delta, spread);
  return symmetric_margin(eps, eps < 1.0, a, eps);
}

Margin margin_theorem2_zeta(double theta, double beta, const ControlParams& params, double v) {
  return margin_theorem1(theta, beta, 0.0, params, v);
}

Margin margin_theorem3(double theta, double beta_abs, const ControlParams& params, double leader_d_star) {
  params.validate();
  require_nonnegative(theta, "theta");
  require_nonnegative(beta_abs, "beta");
  require_nonnegative(leader_d_star, "d*");
  if (!(theta < 1.0)) throw DomainError("margin_theorem3 requires theta < 1");
  const bool boundary = params.alpha == 2.0 * params.omega && theta == 0.0 && beta_abs == 0.0;
  if (!boundary) require_stable_sector(params, "margin_theorem3");
  const double leader_term = leader_d_star / params.d;
  const double spread =
      boundary ? 0.0 : (theta + 2.0 * beta_abs / (params.alpha * params.d)) / damping_factor(params);
  const double eta = std::max(leader_term, spread);
  return symmetric_margin(eta, eta < 1.0, params.d, eta);
}

Margin margin_theorem3(double theta, double beta_abs, const ControlParams& params,
                       const LeaderSpec& leader) {
  params.validate();
  return margin_theorem3(theta, beta_abs, params, d_star(params, leader));
}

Margin margin_theorem4(double theta, double beta, double sigma, const ControlParams& params, double v) {
  require_restricted_sector(params, "margin_theorem4");
  require_nonnegative(theta, "theta");
  require_nonnegative(beta, "beta");
  require_nonnegative(sigma, "sigma");
  require_nonnegative(v, "v");
  const double a = equilibrium_spacing(params, v);
  const double eta = 2.0 * (theta + beta * v / (a * params.omega) + sigma);
  return symmetric_margin(eta, eta < 0.5, a, 2.0 * eta);
}

Margin margin_theorem5(double theta, double beta_abs, double sigma, const ControlParams& params) {
  require_restricted_sector(params, "margin_theorem5");
  require_nonnegative(theta, "theta");
  require_nonnegative(beta_abs, "beta");
  require_nonnegative(sigma, "sigma");
  const double eta = 2.0 * (theta + beta_abs / (params.omega * params.d) + sigma);
  return symmetric_margin(eta, eta < 1.0, params.d, eta);
}

SaddleData saddle_analysis(double mu, const ControlParams& params, double epsilon) {
  params.validate_allow_undamped();
  if (!(params.alpha < 2.0 * params.omega)) throw DomainError("saddle analysis requires alpha < 2 omega");
  const double al = params.alpha;
  const double w2 = params.omega * params.omega;
  const double tau = std::sqrt(w2 - 0.25 * al * al);
  if (!(mu * tau > 1.0)) {
    throw DomainError("saddle analysis requires mu > 1/tau (complex saddle points)");
  }
  SaddleData s;
  s.mu = mu;
  s.tau = tau;
  s.nu = std::sqrt((mu * tau - 1.0) * (mu * tau + 1.0));
  s.z_plus = Complex{-0.5 * al + 1.0 / mu, s.nu / mu};
  s.z_minus = std::conj(s.z_plus);
  s.f = -0.5 * al * mu + 1.0 - std::log(2.0 * tau / (mu * w2));
  s.phi0 = std::atan(s.nu);
  s.Omega = s.nu - s.phi0;
  s.c = epsilon * std::sqrt(2.0 * tau / (std::numbers::pi * s.nu * mu));
  s.spp_plus = s.nu * Complex{s.nu, 1.0} / (tau * tau);
  return s;
}

Complex saddle_phase(Complex z, double mu, const ControlParams& params) {
  const double w2 = params.omega * params.omega;
  return mu * z - std::log(z * z + params.alpha * z + w2) + std::log(w2);
}

double h_function(double x) {
  if (!(x >= 0.0 && x < 1.0)) throw DomainError("h(x) is defined for 0 <= x < 1");
  const double one_minus_x2 = (1.0 - x) * (1.0 + x);
  return 1.0 - std::numbers::ln2 - x / std::sqrt(one_minus_x2) - std::log(one_minus_x2);
}

double asymptotic_envelope(double k, const SaddleData& data) {
  if (!(k >= 1.0)) throw DomainError("envelope index must be >= 1");
  return data.c / std::sqrt(k) * std::exp(k * data.f) * std::sin(data.Omega * k + data.phi0);
}

double fastest_growth_ray(const ControlParams& params) {
  params.validate();
  return 2.0 / params.alpha;
}

}  // namespace chainlab
