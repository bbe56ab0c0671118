#include "chainlab/phase_sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <ostream>
#include <thread>

#include "chainlab/format.hpp"
#include "chainlab/integrator.hpp"
#include "chainlab/spectral.hpp"

namespace chainlab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double grid_point(double lo, double hi, int steps, int i) {
  if (steps <= 1) return lo;
  return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(steps - 1);
}

struct LatticePerturbation {
  double theta = 0.0;
  double beta = 0.0;
  double v = 0.0;
};

// (theta, beta, v) of the lattice families; beta is relative to v.
std::optional<LatticePerturbation> lattice_perturbation(const InitialConditionSpec& ic) {
  if (const auto* e = std::get_if<EquilibriumLattice>(&ic)) return LatticePerturbation{0.0, 0.0, e->v};
  if (const auto* p = std::get_if<PerturbedLattice>(&ic)) return LatticePerturbation{p->theta, p->beta, p->v};
  if (const auto* s = std::get_if<SummableDecay>(&ic)) return LatticePerturbation{s->theta, s->beta, s->v};
  if (const auto* k = std::get_if<SingleVelocityKick>(&ic)) {
    if (k->v > 0.0) return LatticePerturbation{0.0, std::abs(k->epsilon) / k->v, k->v};
    if (k->epsilon == 0.0) return LatticePerturbation{0.0, 0.0, 0.0};
  }
  return std::nullopt;
}

double cell_margin(const ControlParams& params, const SweepTemplate& tmpl) {
  const auto lp = lattice_perturbation(tmpl.ic);
  if (!lp || !std::holds_alternative<ConstantVelocity>(tmpl.leader)) return kNaN;
  try {
    switch (sector_classify(params)) {
      case SectorClass::Stable:
        return margin_theorem1(lp->theta, lp->beta, 0.0, params, lp->v).value;
      case SectorClass::Restricted:
        return margin_theorem4(lp->theta, lp->beta, 0.0, params, lp->v).value;
      case SectorClass::Unstable:
        break;
    }
  } catch (const DomainError&) {
  }
  return kNaN;
}

bool all_zero(const std::vector<double>& xs) {
  return std::all_of(xs.begin(), xs.end(), [](double x) { return x == 0.0; });
}

}  // namespace

double SweepGrid::alpha(int i) const { return grid_point(alpha_min, alpha_max, alpha_steps, i); }
double SweepGrid::omega(int j) const { return grid_point(omega_min, omega_max, omega_steps, j); }
std::size_t SweepGrid::cells() const {
  return static_cast<std::size_t>(std::max(alpha_steps, 0)) *
         static_cast<std::size_t>(std::max(omega_steps, 0));
}

std::string to_string(EmpiricalLabel label) {
  switch (label) {
    case EmpiricalLabel::Stable:
      return "Stable";
    case EmpiricalLabel::Unstable:
      return "Unstable";
    case EmpiricalLabel::Inconclusive:
      return "Inconclusive";
  }
  return "Inconclusive";
}

EmpiricalLabel classify_cell(const StabilityReport& report, double slope,
                             const SweepThresholds& thresholds) {
  if (!(thresholds.slope_pos > 0.0) || !(thresholds.slope_neg < 0.0)) {
    throw DomainError("sweep thresholds need slope_pos > 0 > slope_neg");
  }
  if (report.I_hat < 0.0 || slope > thresholds.slope_pos) return EmpiricalLabel::Unstable;
  if (slope < thresholds.slope_neg && report.I_hat > 0.0) return EmpiricalLabel::Stable;
  return EmpiricalLabel::Inconclusive;
}

SweepCell evaluate_cell(double alpha, double omega, const SweepTemplate& tmpl,
                        const SweepThresholds& thresholds) {
  SweepCell cell;
  cell.alpha = alpha;
  cell.omega = omega;
  cell.I_hat = cell.S_hat = cell.slope = cell.margin = kNaN;
  const ControlParams params{alpha, omega, tmpl.d};
  try {
    params.validate();
    cell.sector = sector_classify(params);
    cell.margin = cell_margin(params, tmpl);

    const TrajectoryRecord rec = simulate(tmpl.ic, params, tmpl.leader, tmpl.horizon, tmpl.dt, tmpl.stride);
    const StabilityReport rep = gap_extrema(rec);
    cell.I_hat = rep.I_hat;
    cell.S_hat = rep.S_hat;

    if (rec.has_deviations()) {
      const double mu = fastest_growth_ray(params);
      const std::vector<double> ray = ray_samples(rec, mu);
      if (all_zero(rec.deviations)) {
        // Unperturbed lattice: nothing can grow.
        cell.slope = -std::numeric_limits<double>::infinity();
      } else {
        const int k_max = static_cast<int>(ray.size());
        const int k_hi = std::min(k_max, tmpl.k_cap);
        const int k_lo = std::max(1, k_hi / 3);
        int window = 5;
        if (cell.sector == SectorClass::Unstable) {
          // Cover at least half an oscillation of sin(Omega k + phi0).
          const double Omega = saddle_analysis(mu, params, 1.0).Omega;
          window = std::max(window, static_cast<int>(std::ceil(std::numbers::pi / Omega)) + 1);
        }
        cell.slope = ray_growth_fit(rec, mu, k_lo, k_hi, window).slope;
      }
    } else {
      cell.reason = "template has no reference velocity; growth fit skipped";
    }
    cell.label = classify_cell(rep, std::isnan(cell.slope) ? 0.0 : cell.slope, thresholds);
    if (cell.label == EmpiricalLabel::Inconclusive && cell.reason.empty()) {
      cell.reason = "slope inside the dead band";
    }
  } catch (const std::exception& e) {
    cell.label = EmpiricalLabel::Inconclusive;
    cell.reason = e.what();
  }
  return cell;
}

std::vector<SweepCell> run_sweep(const SweepGrid& grid, const SweepTemplate& tmpl,
                                 const SweepThresholds& thresholds, int workers) {
  if (grid.alpha_steps < 1 || grid.omega_steps < 1) throw DomainError("sweep grid is empty");
  classify_cell(StabilityReport{}, 0.0, thresholds);  // validates thresholds up front
  const std::size_t total = grid.cells();
  std::vector<SweepCell> cells(total);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t idx = next++; idx < total; idx = next++) {
      const int i = static_cast<int>(idx / static_cast<std::size_t>(grid.omega_steps));
      const int j = static_cast<int>(idx % static_cast<std::size_t>(grid.omega_steps));
      cells[idx] = evaluate_cell(grid.alpha(i), grid.omega(j), tmpl, thresholds);
    }
  };
  const auto n_threads = static_cast<std::size_t>(std::clamp<long>(workers, 1, 256));
  if (n_threads == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(n_threads);
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(work);
  }
  return cells;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepCell>& cells) {
  out << "alpha,omega,sector,i_hat,s_hat,slope,label,margin\n";
  std::string line;
  for (const SweepCell& c : cells) {
    line.clear();
    append_number(line, c.alpha);
    line += ',';
    append_number(line, c.omega);
    line += ',';
    line += to_string(c.sector);
    line += ',';
    append_number(line, c.I_hat);
    line += ',';
    append_number(line, c.S_hat);
    line += ',';
    append_number(line, c.slope);
    line += ',';
    line += to_string(c.label);
    line += ',';
    append_number(line, c.margin);
    line += '\n';
    out << line;
  }
}

}  // namespace chainlab
