#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "chainlab/integrator.hpp"

namespace chainlab {

/// Finite-window estimates of the infimum and supremum of all gaps.
struct StabilityReport {
  double I_hat = 0.0;
  double S_hat = 0.0;
  std::optional<CollisionEvent> first_collision;
  std::optional<double> velocity_deviation;  // sup |v_k - v| against the reference velocity
  double horizon = 0.0;
  std::size_t cars = 0;
};

/// Minimum and maximum gap over every integration step and car. The velocity
/// deviation is filled in when the record has a reference velocity.
StabilityReport gap_extrema(const TrajectoryRecord& record);

/// L_N(t) = (z_0(t) - z_N(t)) / N, the mean of the gaps, linearly interpolated
/// between samples. Throws DomainError outside the recorded time range.
double mean_length(const TrajectoryRecord& record, double t);

/// sup over samples and cars of |v_k(t) - v|.
double velocity_deviation(const TrajectoryRecord& record, double v);

/// q_{k+1}(mu k) for k = 1..k_max, linearly interpolated in time; element j
/// holds k = j + 1. k_max is limited by the chain length and the horizon.
std::vector<double> ray_samples(const TrajectoryRecord& record, double mu);

struct GrowthFit {
  double slope = 0.0;      // estimate of the growth exponent per index
  double intercept = 0.0;  // ln(envelope sqrt(k)) at k = 0
  double residual = 0.0;   // RMS of the fit residuals
  std::size_t points = 0;
};

/// Least-squares line through ln(E(k) sqrt(k)) for k in [k_lo, k_hi], where
/// E(k) is the maximum of |q_{j+1}(mu j)| over the centred window of `window`
/// consecutive indices. Windows must lie inside the valid ray range; points
/// whose window does not fit are skipped. Throws DomainError if fewer than ten
/// points remain or the range exceeds the record.
GrowthFit ray_growth_fit(const TrajectoryRecord& record, double mu, int k_lo, int k_hi,
                         int window = 5);

struct PhaseFit {
  double omega = 0.0;         // phase advance per index
  double phase_mod_pi = 0.0;  // phi in sin(omega k + phi), reduced to [0, pi)
  std::size_t crossings = 0;
};

/// Phase increment of q_{k+1}(mu k) from the sign changes in [k_lo, k_hi]:
/// successive zeros are pi / omega apart. Throws DomainError with fewer than
/// three crossings.
PhaseFit ray_phase_fit(const TrajectoryRecord& record, double mu, int k_lo, int k_hi);

/// JSON object with the report fields; numbers at 17 significant digits.
std::string report_json(const StabilityReport& report);
void write_report_json(std::ostream& out, const StabilityReport& report);

}  // namespace chainlab
