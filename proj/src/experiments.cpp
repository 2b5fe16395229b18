#include "cbf/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "cbf/operators.hpp"
#include "cbf/philox.hpp"
#include "cbf/random_field.hpp"

namespace cbf {

void parallel_for(long count, int threads, const std::function<void(long)>& fn) {
  const int workers = static_cast<int>(std::clamp<long>(threads, 1, std::max<long>(count, 1)));
  if (workers == 1) {
    for (long i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<long> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (long i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

TrendVerdict check_trend(const ConvergenceTable& table, double max_ratio) {
  TrendVerdict v;
  const auto& rows = table.rows;
  if (rows.size() < 2) return v;
  for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
    const ConvergenceRow& a = rows[i];
    const ConvergenceRow& b = rows[i + 1];
    if (b.err > a.err) {
      ++v.inversions;
      const bool overlap = b.err - b.ci_half_width <= a.err + a.ci_half_width;
      v.inversions_within_ci = v.inversions_within_ci && overlap;
    }
  }
  const double first = rows.front().err;
  v.ratio = first > 0.0 ? rows.back().err / first : (rows.back().err == 0.0 ? 0.0 : INFINITY);
  v.pass = v.inversions <= 1 && v.inversions_within_ci && v.ratio <= max_ratio;
  return v;
}

namespace {

double distance_sq(const SpectralField& a, const SpectralField& b) {
  const SpectralField d = a - b;
  return inner(d, d);
}

ConvergenceTable aggregate(const std::vector<int>& levels, const std::vector<std::vector<double>>& sups,
                           const std::vector<char>& ok) {
  ConvergenceTable table;
  for (std::size_t l = 0; l < levels.size(); ++l) {
    ConvergenceRow row;
    row.n = levels[l];
    double sum = 0.0;
    for (std::size_t i = 0; i < sups.size(); ++i) {
      if (!ok[i]) {
        ++row.failed;
        continue;
      }
      sum += sups[i][l];
      ++row.samples;
    }
    if (row.samples > 0) {
      row.err = sum / row.samples;
      double ss = 0.0;
      for (std::size_t i = 0; i < sups.size(); ++i) {
        if (ok[i]) ss += (sups[i][l] - row.err) * (sups[i][l] - row.err);
      }
      const double sd = row.samples > 1 ? std::sqrt(ss / (row.samples - 1)) : 0.0;
      row.ci_half_width = 1.96 * sd / std::sqrt(double(row.samples));
    }
    table.rows.push_back(row);
  }
  return table;
}

void check_levels(const StudySetup& setup, const std::vector<int>& levels) {
  for (int n : levels) {
    if (n < 1 || n > setup.solver.step_level) {
      throw std::invalid_argument("study: level " + std::to_string(n) + " is not resolved by the time step");
    }
    if (n > setup.model.k_dim()) throw std::invalid_argument("study: level exceeds noise dimension k_dim");
  }
}

// Reference run plus one run per level, advanced in lockstep; returns the
// per-level sup over time of the squared H distance to the reference.
std::vector<double> lockstep_sups(Run& reference, std::vector<Run>& runs) {
  std::vector<double> sup(runs.size(), 0.0);
  while (!reference.done()) {
    reference.step();
    for (std::size_t l = 0; l < runs.size(); ++l) {
      runs[l].step();
      sup[l] = std::max(sup[l], distance_sq(reference.state(), runs[l].state()));
    }
  }
  return sup;
}

}  // namespace

ConvergenceTable convergence_study(const StudySetup& setup, const std::vector<int>& levels, int samples,
                                   std::uint64_t master_seed) {
  if (samples < 1) throw std::invalid_argument("convergence_study: need at least one sample");
  check_levels(setup, levels);
  const SolverConfig& cfg = setup.solver;
  std::vector<std::vector<double>> sups(samples);
  std::vector<char> ok(samples, 1);
  parallel_for(samples, setup.threads, [&](long i) {
    const BrownianPath path =
        sample_path(derive_seed(master_seed, std::uint64_t(i)), cfg.horizon, cfg.step_level, setup.model.k_dim());
    try {
      Run ito(setup.x0, setup.params, setup.model, cfg, {System::ito, &path, std::nullopt, nullptr, 0});
      std::vector<Run> wz;
      wz.reserve(levels.size());
      for (int n : levels) {
        const WZLevel lvl = WZLevel::make(n, cfg.horizon);
        wz.emplace_back(setup.x0, setup.params, setup.model, cfg, Run::Inputs{System::wong_zakai, &path, lvl, nullptr, n});
      }
      sups[i] = lockstep_sups(ito, wz);
    } catch (const BlowUp&) {
      ok[i] = 0;
      sups[i].assign(levels.size(), 0.0);
    }
  });
  return aggregate(levels, sups, ok);
}

namespace {

double skeleton_deviation(const FluidParams& p, const NoiseModel& model, const SpectralField& x0,
                          const BrownianPath& path, int n, const SolverConfig& cfg, double eps) {
  const WZLevel lvl = WZLevel::make(n, cfg.horizon);
  ControlSignal ctrl = ControlSignal::from_wz(path, lvl);
  if (eps != 0.0) ctrl.values()(0, 0) += eps;
  Run wz(x0, p, model, cfg, {System::wong_zakai, &path, lvl, nullptr, n});
  Run skel(x0, p, model, cfg, {System::skeleton, nullptr, lvl, &ctrl, n});
  double worst = 0.0;
  while (!wz.done()) {
    wz.step();
    skel.step();
    worst = std::max(worst, distance_sq(wz.state(), skel.state()));
  }
  return std::sqrt(worst);
}

}  // namespace

double skeleton_consistency(const FluidParams& p, const NoiseModel& model, const SpectralField& x0,
                            const BrownianPath& path, int n, const SolverConfig& cfg) {
  return skeleton_deviation(p, model, x0, path, n, cfg, 0.0);
}

double skeleton_consistency_perturbed(const FluidParams& p, const NoiseModel& model, const SpectralField& x0,
                                      const BrownianPath& path, int n, const SolverConfig& cfg, double eps) {
  return skeleton_deviation(p, model, x0, path, n, cfg, eps);
}

ConvergenceTable skeleton_wz_convergence(const StudySetup& setup, const ControlSignal& ctrl,
                                         const std::vector<int>& levels, int samples, std::uint64_t master_seed) {
  if (samples < 1) throw std::invalid_argument("skeleton_wz_convergence: need at least one sample");
  check_levels(setup, levels);
  const SolverConfig& cfg = setup.solver;
  const int full = setup.model.k_dim();
  const WZLevel reference_level = WZLevel::make(std::min(full, cfg.step_level), cfg.horizon);
  std::vector<std::vector<double>> sups(samples);
  std::vector<char> ok(samples, 1);
  parallel_for(samples, setup.threads, [&](long i) {
    const BrownianPath path =
        sample_path(derive_seed(master_seed, std::uint64_t(i)), cfg.horizon, cfg.step_level, full);
    try {
      Run skel(setup.x0, setup.params, setup.model, cfg,
               {System::skeleton, nullptr, reference_level, &ctrl, full});
      std::vector<Run> controlled;
      controlled.reserve(levels.size());
      for (int n : levels) {
        const WZLevel lvl = WZLevel::make(n, cfg.horizon);
        controlled.emplace_back(setup.x0, setup.params, setup.model, cfg,
                                Run::Inputs{System::controlled, &path, lvl, &ctrl, 0});
      }
      sups[i] = lockstep_sups(skel, controlled);
    } catch (const BlowUp&) {
      ok[i] = 0;
      sups[i].assign(levels.size(), 0.0);
    }
  });
  return aggregate(levels, sups, ok);
}

std::vector<InequalityReport> monotonicity_suite(const GridSpec& grid, const FluidParams& p, long trials,
                                                 std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("monotonicity_suite: trials must be >= 1");
  const bool low = p.r >= 1.0 && p.r <= 3.0;
  const bool high = p.r > 3.0;
  const bool critical = p.r == 3.0 && 2.0 * p.beta * p.mu >= 1.0;
  const double eta =
      high ? (p.r - 3.0) / (2.0 * p.mu * (p.r - 1.0)) * std::pow(2.0 / (p.beta * p.mu * (p.r - 1.0)), 2.0 / (p.r - 3.0))
           : 0.0;
  const double low_const = 27.0 / (32.0 * p.mu * p.mu * p.mu);

  double worst_low = INFINITY, worst_high = INFINITY, worst_crit = INFINITY;
  NormalStream rng(seed, 0x40E0ull);
  for (long t = 0; t < trials; ++t) {
    const SpectralField u1 = random_field_with_norm(grid, rng, log_uniform(rng, 0.1, 10.0));
    const SpectralField u2 = random_field_with_norm(grid, rng, log_uniform(rng, 0.1, 10.0));
    const SpectralField w = u1 - u2;
    const double lhs = inner(drift(u1, p) - drift(u2, p), w);
    const double ww = inner(w, w);
    if (low) worst_low = std::min(worst_low, lhs + low_const * lp_power(u2, 4.0) * ww);
    if (high) worst_high = std::min(worst_high, lhs + eta * ww);
    if (critical) worst_crit = std::min(worst_crit, lhs);
  }
  std::vector<InequalityReport> out;
  constexpr double kTol = 1e-8;
  if (low) out.push_back(InequalityReport::make("local_monotonicity_r_le_3", trials, worst_low, kTol));
  if (high) {
    auto rep = InequalityReport::make("local_monotonicity_r_gt_3", trials, worst_high, kTol);
    rep.statistic = eta;
    out.push_back(rep);
  }
  if (critical) out.push_back(InequalityReport::make("monotonicity_critical_r_3", trials, worst_crit, kTol));
  return out;
}

double gateaux_slope(const SpectralField& u, const SpectralField& v, double r) {
  const SpectralField c0 = forchheimer(u, r);
  const SpectralField dc = forchheimer_gateaux(u, v, r);
  std::vector<double> xs, ys;
  for (int i = 0; i <= 6; ++i) {
    const double eps = std::pow(10.0, -6.0 + 0.5 * i);
    SpectralField shifted = u;
    shifted.add_scaled(eps, v);
    SpectralField fd = forchheimer(shifted, r) - c0;
    fd *= 1.0 / eps;
    const double e = norm_h(fd - dc);
    xs.push_back(std::log(eps));
    ys.push_back(std::log(e));
  }
  const double n = double(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

namespace {

// Pointwise integrals on the exact-quadrature grid for exponent r:
// weighted_u = int |u|^{r-1} |w|^2, weighted_v = int |v|^{r-1} |w|^2,
// pair_diff = int (|u|^{r-1} u - |v|^{r-1} v).w, diff_power = int |w|^{r+1}, w = u - v.
struct PairIntegrals {
  double weighted_u = 0.0;
  double weighted_v = 0.0;
  double pair_diff = 0.0;
  double diff_power = 0.0;
};

PairIntegrals pair_integrals(const SpectralField& u, const SpectralField& v, double r) {
  const GridSpec& g = u.grid();
  const int m = g.quadrature_size(r + 1.0);
  const PhysicalField pu = to_physical(u, m);
  const PhysicalField pv = to_physical(v, m);
  PairIntegrals out;
  for (Eigen::Index i = 0; i < pu.x.size(); ++i) {
    const double ux = pu.x(i), uy = pu.y(i), vx = pv.x(i), vy = pv.y(i);
    const double wx = ux - vx, wy = uy - vy;
    const double w2 = wx * wx + wy * wy;
    const double au = abs_power(ux * ux + uy * uy, r - 1.0);
    const double av = abs_power(vx * vx + vy * vy, r - 1.0);
    out.weighted_u += au * w2;
    out.weighted_v += av * w2;
    out.pair_diff += (au * ux - av * vx) * wx + (au * uy - av * vy) * wy;
    out.diff_power += abs_power(w2, r + 1.0);
  }
  const double area = g.cell_area(m);
  out.weighted_u *= area;
  out.weighted_v *= area;
  out.pair_diff *= area;
  out.diff_power *= area;
  return out;
}

}  // namespace

std::vector<InequalityReport> identity_suite(const GridSpec& grid, long triple_trials, long pair_trials,
                                             std::uint64_t seed) {
  if (triple_trials < 1 || pair_trials < 1) throw std::invalid_argument("identity_suite: trials must be >= 1");
  std::vector<InequalityReport> out;
  NormalStream rng(seed, 0x1D3Aull);
  auto draw = [&] { return random_field_with_norm(grid, rng, log_uniform(rng, 0.1, 10.0)); };

  // Skew symmetry b(u,v,w) = -b(u,w,v), and the calibrated Ladyzhenskaya-type constant.
  {
    double worst = 0.0;
    double ladyzhenskaya = 0.0;
    for (long t = 0; t < triple_trials; ++t) {
      const SpectralField u = draw(), v = draw(), w = draw();
      const double b1 = trilinear(u, v, w);
      const double b2 = trilinear(u, w, v);
      const double scale = norm_v(u) * norm_v(v) * norm_v(w) + 1.0;
      worst = std::max(worst, std::abs(b1 + b2) / scale);
      const double bound = std::sqrt(norm_h(u) * norm_v(u)) * norm_v(v) * std::sqrt(norm_h(w) * norm_v(w));
      ladyzhenskaya = std::max(ladyzhenskaya, std::abs(b1) / bound);
    }
    out.push_back(InequalityReport::make("trilinear_skew_symmetry", triple_trials, -worst, 1e-10));
    auto rep = InequalityReport::make("trilinear_bound_calibrated_constant", triple_trials, 0.0, 0.0);
    rep.statistic = ladyzhenskaya;
    out.push_back(rep);
  }

  // Duality <C(u), u> = ||u||_{L^{r+1}}^{r+1} through the projected operator.
  for (double r : {3.0, 5.0}) {
    double worst = 0.0;
    for (long t = 0; t < triple_trials; ++t) {
      const SpectralField u = draw();
      const double lhs = inner(forchheimer(u, r), u);
      const double rhs = lp_power(u, r + 1.0);
      worst = std::max(worst, std::abs(lhs - rhs) / rhs);
    }
    out.push_back(InequalityReport::make("forchheimer_duality_r" + std::to_string(int(r)), triple_trials, -worst,
                                         1e-10));
  }

  // Monotonicity of C and the norm comparison, pointwise before projection.
  for (double r : {3.0, 5.0}) {
    double worst_mono = INFINITY, worst_cmp = INFINITY;
    const double factor = r <= 2.0 ? 1.0 : std::pow(2.0, r - 2.0);
    for (long t = 0; t < pair_trials; ++t) {
      const SpectralField u = draw(), v = draw();
      const PairIntegrals pi = pair_integrals(u, v, r);
      worst_mono = std::min(worst_mono, pi.pair_diff - 0.5 * pi.weighted_u - 0.5 * pi.weighted_v);
      worst_cmp = std::min(worst_cmp, factor * (pi.weighted_u + pi.weighted_v) - pi.diff_power);
    }
    const std::string tag = "_r" + std::to_string(int(r));
    out.push_back(InequalityReport::make("forchheimer_monotonicity" + tag, pair_trials, worst_mono, 1e-8));
    out.push_back(InequalityReport::make("difference_norm_comparison" + tag, pair_trials, worst_cmp, 1e-8));
  }

  // Gateaux derivative: forward differences converge at first order.
  {
    double worst = INFINITY;
    const long trials = std::min<long>(triple_trials, 20);
    for (long t = 0; t < trials; ++t) {
      const SpectralField u = random_field_with_norm(grid, rng, 1.0);
      const SpectralField v = random_field_with_norm(grid, rng, 1.0);
      worst = std::min(worst, gateaux_slope(u, v, 3.0));
    }
    auto rep = InequalityReport::make("forchheimer_gateaux_slope", trials, worst - 0.9, 0.0);
    rep.statistic = worst;
    out.push_back(rep);
  }

  // |<B(u), v>| <= ||u||_{L^{r+1}}^{(r+1)/(r-1)} ||u||_H^{(r-3)/(r-1)} ||v||_V for r = 5.
  {
    const double r = 5.0;
    double worst = INFINITY;
    for (long t = 0; t < pair_trials; ++t) {
      const SpectralField u = draw(), v = draw();
      const double lhs = std::abs(inner(convective_unprojected(u, u), v));
      const double lp = std::pow(lp_power(u, r + 1.0), 1.0 / (r + 1.0));
      const double bound = std::pow(lp, (r + 1.0) / (r - 1.0)) * std::pow(norm_h(u), (r - 3.0) / (r - 1.0)) * norm_v(v);
      worst = std::min(worst, (bound * (1.0 + 1e-6) - lhs) / bound);
    }
    out.push_back(InequalityReport::make("convective_growth_bound_r5", pair_trials, worst, 0.0));
  }

  // <M(u), u> = mu ||u||_V^2 + alpha ||u||_H^2 + beta ||u||_{L^{r+1}}^{r+1}.
  {
    const FluidParams p{1.0, 0.1, 1.0, 3.0, true};
    double worst = 0.0;
    for (long t = 0; t < triple_trials; ++t) {
      const SpectralField u = draw();
      const double lhs = inner(drift(u, p), u);
      const double hv = norm_v(u), hh = norm_h(u);
      const double rhs = p.mu * hv * hv + p.alpha * hh * hh + p.beta * lp_power(u, p.r + 1.0);
      worst = std::max(worst, std::abs(lhs - rhs) / rhs);
    }
    out.push_back(InequalityReport::make("drift_coercivity_identity", triple_trials, -worst, 1e-10));
  }

  // Projection idempotence and Galerkin contraction.
  {
    double worst_idem = 0.0, worst_contract = INFINITY;
    const int pairs = grid.retained_pairs();
    for (long t = 0; t < triple_trials; ++t) {
      const SpectralField u = draw();
      const SpectralField pu = leray_project(u);
      worst_idem = std::max(worst_idem, norm_h(pu - leray_project(pu)) / norm_h(u));
      const int m = 1 + static_cast<int>(t % pairs);
      worst_contract = std::min(worst_contract, norm_h(u) - norm_h(galerkin_project(u, m)));
    }
    out.push_back(InequalityReport::make("leray_idempotence", triple_trials, -worst_idem, 1e-14));
    out.push_back(InequalityReport::make("galerkin_contraction", triple_trials, worst_contract, 1e-12));
  }
  return out;
}

EnergyBudget energy_budget(const TrajectoryRecord& rec, const FluidParams& p) {
  EnergyBudget out;
  out.residuals = energy_residuals(rec);
  for (double r : out.residuals) out.max_abs_residual = std::max(out.max_abs_residual, std::abs(r));
  double sup_h = 0.0, integral = 0.0;
  for (std::size_t j = 0; j < rec.norm_h.size(); ++j) {
    sup_h = std::max(sup_h, rec.norm_h[j] * rec.norm_h[j]);
    if (j + 1 < rec.norm_h.size()) {
      integral += rec.dt * (rec.norm_v[j] * rec.norm_v[j] + std::pow(rec.norm_lp[j], p.r + 1.0));
    }
  }
  out.energy_bound = sup_h + integral;
  return out;
}

}  // namespace cbf
