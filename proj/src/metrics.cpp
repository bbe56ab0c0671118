#include "chainlab/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include "chainlab/format.hpp"

namespace chainlab {

namespace {

void require_samples(const TrajectoryRecord& record) {
  if (record.samples() == 0 || record.cars == 0) throw DomainError("empty trajectory record");
}

// Fractional sample position of time t; clamps tiny overshoots at the ends.
double sample_position(const TrajectoryRecord& record, double t) {
  const double t0 = record.times.front();
  const double t1 = record.times.back();
  const double slack = 1e-9 * std::max(1.0, std::abs(t1));
  if (t < t0 - slack || t > t1 + slack) throw DomainError("time outside the recorded range");
  if (record.samples() == 1) return 0.0;
  const double h = (t1 - t0) / static_cast<double>(record.samples() - 1);
  return std::clamp((t - t0) / h, 0.0, static_cast<double>(record.samples() - 1));
}

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double rms = 0.0;
};

LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const auto n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (fit.intercept + fit.slope * x[i]);
    ss += r * r;
  }
  fit.rms = std::sqrt(ss / n);
  return fit;
}

}  // namespace

StabilityReport gap_extrema(const TrajectoryRecord& record) {
  require_samples(record);
  StabilityReport rep;
  rep.I_hat = *std::min_element(record.min_gap.begin(), record.min_gap.end());
  rep.S_hat = *std::max_element(record.max_gap.begin(), record.max_gap.end());
  rep.first_collision = record.first_collision;
  if (record.reference_velocity) {
    rep.velocity_deviation = velocity_deviation(record, *record.reference_velocity);
  }
  rep.horizon = record.horizon();
  rep.cars = record.cars;
  return rep;
}

double mean_length(const TrajectoryRecord& record, double t) {
  require_samples(record);
  const double pos = sample_position(record, t);
  const auto s0 = static_cast<std::size_t>(std::floor(pos));
  const std::size_t s1 = std::min(s0 + 1, record.samples() - 1);
  const double w = pos - static_cast<double>(s0);
  auto row_mean = [&](std::size_t s) {
    double acc = 0.0;
    for (double r : record.gap_row(s)) acc += r;
    return acc / static_cast<double>(record.cars);
  };
  const double l0 = row_mean(s0);
  return w == 0.0 ? l0 : l0 + w * (row_mean(s1) - l0);
}

double velocity_deviation(const TrajectoryRecord& record, double v) {
  require_samples(record);
  double sup = 0.0;
  for (double vk : record.velocities) sup = std::max(sup, std::abs(vk - v));
  return sup;
}

std::vector<double> ray_samples(const TrajectoryRecord& record, double mu) {
  require_samples(record);
  if (!record.has_deviations()) throw DomainError("ray sampling needs a record with deviations q_k");
  if (!(mu > 0.0)) throw DomainError("ray slope mu must be positive");
  const double horizon = record.horizon();
  std::vector<double> out;
  for (std::size_t k = 1; k + 1 <= record.cars; ++k) {
    const double t = mu * static_cast<double>(k);
    if (t > horizon * (1.0 + 1e-12)) break;
    const double pos = sample_position(record, t);
    const auto s0 = static_cast<std::size_t>(std::floor(pos));
    const std::size_t s1 = std::min(s0 + 1, record.samples() - 1);
    const double w = pos - static_cast<double>(s0);
    const double q0 = record.deviation(s0, k + 1);
    out.push_back(q0 + w * (record.deviation(s1, k + 1) - q0));
  }
  return out;
}

GrowthFit ray_growth_fit(const TrajectoryRecord& record, double mu, int k_lo, int k_hi, int window) {
  if (window < 1) throw DomainError("envelope window must be >= 1");
  if (k_lo < 1 || k_hi < k_lo) throw DomainError("ray fit range must satisfy 1 <= k_lo <= k_hi");
  const std::vector<double> y = ray_samples(record, mu);
  const auto k_max = static_cast<int>(y.size());
  if (k_hi > k_max) {
    throw DomainError("ray fit range exceeds the record: k_hi = " + std::to_string(k_hi) +
                      " but only k <= " + std::to_string(k_max) + " is covered");
  }
  const int before = (window - 1) / 2;
  const int after = window - 1 - before;
  std::vector<double> ks, logs;
  for (int k = k_lo; k <= k_hi; ++k) {
    if (k - before < 1 || k + after > k_max) continue;
    double env = 0.0;
    for (int j = k - before; j <= k + after; ++j) env = std::max(env, std::abs(y[j - 1]));
    if (!(env > 0.0)) continue;
    ks.push_back(k);
    logs.push_back(std::log(env) + 0.5 * std::log(static_cast<double>(k)));
  }
  if (ks.size() < 10) throw DomainError("ray fit needs at least 10 usable points");
  const LineFit lf = least_squares(ks, logs);
  return GrowthFit{lf.slope, lf.intercept, lf.rms, ks.size()};
}

PhaseFit ray_phase_fit(const TrajectoryRecord& record, double mu, int k_lo, int k_hi) {
  if (k_lo < 1 || k_hi <= k_lo) throw DomainError("phase fit range must satisfy 1 <= k_lo < k_hi");
  const std::vector<double> y = ray_samples(record, mu);
  if (k_hi > static_cast<int>(y.size())) throw DomainError("phase fit range exceeds the record");
  std::vector<double> zeros;
  for (int k = k_lo; k < k_hi; ++k) {
    const double a = y[k - 1], b = y[k];
    if (a == 0.0) {
      zeros.push_back(k);
    } else if ((a < 0.0) != (b < 0.0) && b != 0.0) {
      zeros.push_back(k + a / (a - b));
    }
  }
  if (zeros.size() < 3) throw DomainError("phase fit needs at least three sign changes");
  std::vector<double> idx(zeros.size());
  for (std::size_t j = 0; j < zeros.size(); ++j) idx[j] = static_cast<double>(j);
  const LineFit lf = least_squares(idx, zeros);
  PhaseFit pf;
  pf.omega = std::numbers::pi / lf.slope;
  // Zero j sits where omega k + phi = (m + j) pi.
  const double phi = -pf.omega * lf.intercept;
  pf.phase_mod_pi = phi - std::numbers::pi * std::floor(phi / std::numbers::pi);
  pf.crossings = zeros.size();
  return pf;
}

std::string report_json(const StabilityReport& report) {
  auto num = [](double x) { return std::isfinite(x) ? format_number(x) : std::string("null"); };
  std::string s = "{\"I_hat\": " + num(report.I_hat) + ", \"S_hat\": " + num(report.S_hat) +
                  ", \"first_collision\": ";
  if (report.first_collision) {
    s += "{\"time\": " + num(report.first_collision->time) +
         ", \"car\": " + std::to_string(report.first_collision->car) + "}";
  } else {
    s += "null";
  }
  s += ", \"velocity_deviation\": ";
  s += report.velocity_deviation ? num(*report.velocity_deviation) : std::string("null");
  s += ", \"horizon\": " + num(report.horizon) + ", \"cars\": " + std::to_string(report.cars) + "}";
  return s;
}

void write_report_json(std::ostream& out, const StabilityReport& report) {
  out << report_json(report) << '\n';
}

}  // namespace chainlab
