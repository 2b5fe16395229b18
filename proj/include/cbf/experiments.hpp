#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "cbf/integrator.hpp"

namespace cbf {

/// Everything a Monte-Carlo study needs besides levels, sample count, and seed.
struct StudySetup {
  FluidParams params;
  NoiseModel model;
  SolverConfig solver;
  SpectralField x0;
  int threads = 1;
};

struct ConvergenceRow {
  int n = 0;
  int samples = 0;              ///< samples that completed
  double err = 0.0;             ///< mean of per-sample sup_t ||u - u^n||_H^2
  double ci_half_width = 0.0;   ///< 1.96 * sd / sqrt(samples)
  int failed = 0;               ///< samples aborted by blow-up
};

struct ConvergenceTable {
  std::vector<ConvergenceRow> rows;
};

struct InequalityReport {
  std::string name;
  long trials = 0;
  double worst_margin = 0.0;  ///< most negative residual
  double tolerance = 0.0;
  bool pass = false;
  double statistic = std::numeric_limits<double>::quiet_NaN();  ///< report-specific extra value

  static InequalityReport make(std::string name, long trials, double worst, double tol) {
    return {std::move(name), trials, worst, tol, worst >= -tol, std::numeric_limits<double>::quiet_NaN()};
  }
};

/// Verdict of the trend test on a convergence table: errors nonincreasing in n
/// with at most one inversion, which must sit inside overlapping CIs, and
/// err(last) <= ratio * err(first).
struct TrendVerdict {
  int inversions = 0;
  bool inversions_within_ci = true;
  double ratio = 0.0;  ///< err(last) / err(first)
  bool pass = false;
};

TrendVerdict check_trend(const ConvergenceTable& table, double max_ratio = 0.2);

/// E[sup_t ||u(t) - u^n(t)||_H^2] per level, Ito and Wong-Zakai runs sharing each sampled path.
ConvergenceTable convergence_study(const StudySetup& setup, const std::vector<int>& levels, int samples,
                                   std::uint64_t master_seed);

/// sup_t ||Y - u^n||_H when the skeleton is driven by the realized smoothed noise of `path`.
double skeleton_consistency(const FluidParams& p, const NoiseModel& model, const SpectralField& x0,
                            const BrownianPath& path, int n, const SolverConfig& cfg);

/// Same, with the control perturbed by `eps` in its first cell and mode (sensitivity probe).
double skeleton_consistency_perturbed(const FluidParams& p, const NoiseModel& model, const SpectralField& x0,
                                      const BrownianPath& path, int n, const SolverConfig& cfg, double eps);

/// E[sup_t ||Y^n_k - Y_k||_H^2] per level: controlled runs against the skeleton
/// with the full correction sum_{k <= k_dim} (the n -> infinity limit system).
ConvergenceTable skeleton_wz_convergence(const StudySetup& setup, const ControlSignal& ctrl,
                                         const std::vector<int>& levels, int samples, std::uint64_t master_seed);

/// Local monotonicity of M on random pairs; one report per inequality that applies to p.
std::vector<InequalityReport> monotonicity_suite(const GridSpec& grid, const FluidParams& p, long trials,
                                                 std::uint64_t seed);

/// Operator identities and inequalities of the discrete function spaces.
std::vector<InequalityReport> identity_suite(const GridSpec& grid, long triple_trials, long pair_trials,
                                             std::uint64_t seed);

/// Slope of log ||(C(u+eps v) - C(u))/eps - C'(u)v||_H against log eps over [1e-6, 1e-3].
double gateaux_slope(const SpectralField& u, const SpectralField& v, double r);

struct EnergyBudget {
  std::vector<double> residuals;
  double max_abs_residual = 0.0;
  /// sup_t ||u||_H^2 + int (||u||_V^2 + ||u||_{L^{r+1}}^{r+1}) dt
  double energy_bound = 0.0;
};

EnergyBudget energy_budget(const TrajectoryRecord& rec, const FluidParams& p);

/// Run fn(i) for i in [0, count) on up to `threads` workers.
void parallel_for(long count, int threads, const std::function<void(long)>& fn);

}  // namespace cbf
