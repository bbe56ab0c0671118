#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "chainlab/metrics.hpp"
#include "chainlab/model.hpp"

namespace chainlab {

/// Uniform grid alpha_i = alpha_min + i (alpha_max - alpha_min) / (alpha_steps - 1),
/// likewise for omega. A single step uses the minimum.
struct SweepGrid {
  double alpha_min = 0.2;
  double alpha_max = 4.0;
  int alpha_steps = 20;
  double omega_min = 0.2;
  double omega_max = 2.0;
  int omega_steps = 20;

  double alpha(int i) const;
  double omega(int j) const;
  std::size_t cells() const;
};

/// Scenario shared by every cell; only alpha and omega vary.
struct SweepTemplate {
  double d = 1.0;
  LeaderSpec leader = ConstantVelocity{1.0};
  InitialConditionSpec ic = SingleVelocityKick{100, 1.0, 0.01};
  double horizon = 400.0;
  double dt = 0.02;
  int stride = 5;
  int k_cap = 80;  // upper end of the growth-fit index range
};

struct SweepThresholds {
  double slope_pos = 0.02;
  double slope_neg = -0.02;
};

enum class EmpiricalLabel { Stable, Unstable, Inconclusive };

std::string to_string(EmpiricalLabel label);

struct SweepCell {
  double alpha = 0.0;
  double omega = 0.0;
  SectorClass sector = SectorClass::Stable;
  double I_hat = 0.0;
  double S_hat = 0.0;
  double slope = 0.0;   // growth exponent along the ray t = (2/alpha) k
  double margin = 0.0;  // epsilon (Stable sector) or eta (Restricted); nan otherwise
  EmpiricalLabel label = EmpiricalLabel::Inconclusive;
  std::string reason;   // why a cell is Inconclusive, empty otherwise
};

/// Unstable if I_hat < 0 or slope > slope_pos; Stable if slope < slope_neg and
/// I_hat > 0; Inconclusive otherwise. Throws DomainError for bad thresholds.
EmpiricalLabel classify_cell(const StabilityReport& report, double slope,
                             const SweepThresholds& thresholds);

/// Simulates and classifies one grid point. Never throws: failures come back
/// as Inconclusive with a reason.
SweepCell evaluate_cell(double alpha, double omega, const SweepTemplate& tmpl,
                        const SweepThresholds& thresholds);

/// All cells in row-major order (alpha outer, omega inner), computed on
/// `workers` threads. The result does not depend on the worker count.
std::vector<SweepCell> run_sweep(const SweepGrid& grid, const SweepTemplate& tmpl,
                                 const SweepThresholds& thresholds, int workers = 1);

/// Header `alpha,omega,sector,i_hat,s_hat,slope,label,margin`, 17-digit floats.
void write_sweep_csv(std::ostream& out, const std::vector<SweepCell>& cells);

}  // namespace chainlab
