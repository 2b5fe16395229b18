#include <gtest/gtest.h>

#include <cmath>

#include "cbf/integrator.hpp"
#include "cbf/operators.hpp"

using namespace cbf;

namespace {

const FluidParams kBench{1.0, 0.1, 1.0, 3.0, true};

NoiseModel bench_noise(NoiseFamily f = NoiseFamily::diagonal_linear, double scale = 1.0) {
  Eigen::VectorXd q(8);
  q << 0.4, 0.3, 0.2, 0.15, 0.1, 0.08, 0.06, 0.05;
  return NoiseModel::make(f, GridSpec{}, scale * q);
}

SolverConfig small_cfg(int level = 8) {
  SolverConfig c;
  c.horizon = 0.5;
  c.step_level = level;
  c.record_stride = 16;
  return c;
}

bool same_bits(const SpectralField& a, const SpectralField& b) {
  return (a.x() == b.x()).all() && (a.y() == b.y()).all();
}

}  // namespace

TEST(Integrator, ZeroDataStaysZero) {
  const NoiseModel m = bench_noise(NoiseFamily::diagonal_linear, 0.0);
  const SolverConfig cfg = small_cfg(6);
  const BrownianPath path = sample_path(1, cfg.horizon, cfg.step_level, 8);
  const TrajectoryRecord rec = integrate_scbf(SpectralField(GridSpec{}), kBench, m, path, cfg);
  for (const auto& s : rec.snapshots) EXPECT_TRUE(s.is_zero());
  for (double h : rec.norm_h) EXPECT_EQ(h, 0.0);
  EXPECT_EQ(rec.times.size(), 65u);
  EXPECT_EQ(rec.snapshot_times.back(), 0.5);
}

TEST(Integrator, LinearDecayOracle) {
  const GridSpec g;
  const FluidParams p{1.0, 0.1, 0.0, 3.0, false};
  const NoiseModel m = bench_noise(NoiseFamily::diagonal_linear, 0.0);
  const SolverConfig cfg = small_cfg(7);
  const BrownianPath path = sample_path(1, cfg.horizon, cfg.step_level, 8);
  const SpectralField x0 = default_initial(g);
  const TrajectoryRecord rec = integrate_scbf(x0, p, m, path, cfg);
  const SpectralField& uT = rec.snapshots.back();
  for (int ky = -g.cutoff(); ky <= g.cutoff(); ++ky) {
    for (int kx = -g.cutoff(); kx <= g.cutoff(); ++kx) {
      const double factor = std::exp(-(p.mu * (kx * kx + ky * ky) + p.alpha) * cfg.horizon);
      EXPECT_NEAR(std::abs(uT.coeff_x(kx, ky) - factor * x0.coeff_x(kx, ky)), 0.0, 1e-12);
      EXPECT_NEAR(std::abs(uT.coeff_y(kx, ky) - factor * x0.coeff_y(kx, ky)), 0.0, 1e-12);
    }
  }
}

TEST(Integrator, DeterministicEnergyResidualIsFirstOrder) {
  const NoiseModel m = bench_noise(NoiseFamily::diagonal_linear, 0.0);
  const SpectralField x0 = default_initial(GridSpec{});
  auto worst = [&](int level) {
    const SolverConfig cfg = small_cfg(level);
    const BrownianPath path = sample_path(1, cfg.horizon, cfg.step_level, 8);
    const TrajectoryRecord rec = integrate_scbf(x0, kBench, m, path, cfg);
    double w = 0.0;
    for (double r : rec.energy_residual) w = std::max(w, std::abs(r));
    return w;
  };
  const double e8 = worst(8), e9 = worst(9);
  EXPECT_LT(e8, 0.01 * 0.5 * inner(x0, x0));
  EXPECT_GT(e8 / e9, 1.7);
  EXPECT_LT(e8 / e9, 2.3);
}

TEST(Integrator, DivergenceFreeAndReproducible) {
  const NoiseModel m = bench_noise();
  const SolverConfig cfg = small_cfg(8);
  const BrownianPath path = sample_path(12, cfg.horizon, cfg.step_level, 8);
  const SpectralField x0 = default_initial(GridSpec{});
  const TrajectoryRecord a = integrate_scbf(x0, kBench, m, path, cfg);
  const TrajectoryRecord b = integrate_scbf(x0, kBench, m, path, cfg);
  ASSERT_EQ(a.snapshots.size(), b.snapshots.size());
  for (std::size_t i = 0; i < a.snapshots.size(); ++i) {
    EXPECT_TRUE(same_bits(a.snapshots[i], b.snapshots[i]));
    EXPECT_TRUE(a.snapshots[i].satisfies_invariants(1e-12));
  }
  for (std::size_t i = 1; i < a.times.size(); ++i) EXPECT_GT(a.times[i], a.times[i - 1]);
  EXPECT_NEAR(a.stiffness, cfg.dt() * 200.0, 1e-15);
}

TEST(Integrator, SkeletonReproducesWongZakaiBitwise) {
  const SolverConfig cfg = small_cfg(8);
  const SpectralField x0 = default_initial(GridSpec{});
  for (auto f : {NoiseFamily::additive, NoiseFamily::diagonal_linear, NoiseFamily::affine}) {
    const NoiseModel m = bench_noise(f);
    const BrownianPath path = sample_path(31, cfg.horizon, cfg.step_level, 8);
    const WZLevel lvl = WZLevel::make(5, cfg.horizon);
    const TrajectoryRecord wz = integrate_wz(x0, kBench, m, path, lvl, cfg);
    const TrajectoryRecord sk = integrate_skeleton(x0, kBench, m, ControlSignal::from_wz(path, lvl), lvl, cfg);
    ASSERT_EQ(wz.snapshots.size(), sk.snapshots.size());
    for (std::size_t i = 0; i < wz.snapshots.size(); ++i) EXPECT_TRUE(same_bits(wz.snapshots[i], sk.snapshots[i]));
    EXPECT_EQ(wz.norm_h, sk.norm_h);
  }
}

TEST(Integrator, AdditiveCorrectionVanishes) {
  const SolverConfig cfg = small_cfg(7);
  const NoiseModel m = bench_noise(NoiseFamily::additive);
  const BrownianPath path = sample_path(8, cfg.horizon, cfg.step_level, 8);
  const WZLevel lvl = WZLevel::make(4, cfg.horizon);
  const SpectralField x0 = default_initial(GridSpec{});
  cbf::Run with(x0, kBench, m, cfg, {System::wong_zakai, &path, lvl, nullptr, 4});
  cbf::Run without(x0, kBench, m, cfg, {System::wong_zakai, &path, lvl, nullptr, 0});
  with.run_to_end();
  without.run_to_end();
  EXPECT_TRUE(same_bits(with.state(), without.state()));
}

TEST(Integrator, FirstWongZakaiCellIsCorrectedDeterministicFlow) {
  const SolverConfig cfg = small_cfg(8);
  const NoiseModel m = bench_noise();
  const BrownianPath path = sample_path(8, cfg.horizon, cfg.step_level, 8);
  const WZLevel lvl = WZLevel::make(4, cfg.horizon);
  const ControlSignal zero = ControlSignal::zero(cfg.horizon, 8);
  const SpectralField x0 = default_initial(GridSpec{});
  cbf::Run wz(x0, kBench, m, cfg, {System::wong_zakai, &path, lvl, nullptr, 4});
  cbf::Run det(x0, kBench, m, cfg, {System::skeleton, nullptr, lvl, &zero, 4});
  for (int j = 0; j < (1 << (8 - 4)); ++j) {
    wz.step();
    det.step();
    EXPECT_TRUE(same_bits(wz.state(), det.state()));
  }
  wz.step();
  det.step();
  EXPECT_FALSE(same_bits(wz.state(), det.state()));
}

TEST(Integrator, ControlledWithSilentNoiseIsUncorrectedSkeleton) {
  const SolverConfig cfg = small_cfg(7);
  const NoiseModel m = bench_noise(NoiseFamily::affine, 0.0);
  const BrownianPath path = sample_path(8, cfg.horizon, cfg.step_level, 8);
  const WZLevel lvl = WZLevel::make(4, cfg.horizon);
  Eigen::MatrixXd values = Eigen::MatrixXd::Constant(4, 8, 0.7);
  const ControlSignal ctrl(cfg.horizon, 2, values);
  const SpectralField x0 = default_initial(GridSpec{});
  const TrajectoryRecord c = integrate_controlled(x0, kBench, m, path, ctrl, lvl, cfg);
  const TrajectoryRecord s = integrate_skeleton(x0, kBench, m, ctrl, lvl, cfg);
  EXPECT_TRUE(same_bits(c.snapshots.back(), s.snapshots.back()));
}

TEST(Integrator, ControlledOnFlatPathIsControlledOde) {
  const SolverConfig cfg = small_cfg(7);
  const NoiseModel m = bench_noise();
  const BrownianPath flat(cfg.horizon, cfg.step_level, 0, Eigen::MatrixXd::Zero(8, 1 << 7));
  const WZLevel lvl = WZLevel::make(4, cfg.horizon);
  Eigen::MatrixXd values(4, 8);
  for (int i = 0; i < 4; ++i) values.row(i).setConstant(i % 2 ? 0.5 : -0.5);
  const ControlSignal ctrl(cfg.horizon, 2, values);
  const SpectralField x0 = default_initial(GridSpec{});
  cbf::Run controlled(x0, kBench, m, cfg, {System::controlled, &flat, lvl, &ctrl, 0});
  cbf::Run ode(x0, kBench, m, cfg, {System::skeleton, nullptr, lvl, &ctrl, 0});
  controlled.run_to_end();
  ode.run_to_end();
  EXPECT_TRUE(same_bits(controlled.state(), ode.state()));
}

TEST(Integrator, WongZakaiStepHalvingIsFirstOrder) {
  const NoiseModel m = bench_noise();
  const BrownianPath path = sample_path(5, 0.5, 11, 8);
  const WZLevel lvl = WZLevel::make(6, 0.5);
  const SpectralField x0 = default_initial(GridSpec{});
  std::vector<SpectralField> finals;
  for (int level = 8; level <= 11; ++level) {
    finals.push_back(integrate_wz(x0, kBench, m, path, lvl, small_cfg(level)).snapshots.back());
  }
  const double d0 = norm_h(finals[0] - finals[1]);
  const double d1 = norm_h(finals[1] - finals[2]);
  const double d2 = norm_h(finals[2] - finals[3]);
  EXPECT_GE(d0 / d1, 1.8);
  EXPECT_GE(d1 / d2, 1.8);
}

TEST(Integrator, SkeletonSmallControlResponseIsLinear) {
  const SolverConfig cfg = small_cfg(7);
  const NoiseModel m = bench_noise(NoiseFamily::additive);
  const WZLevel lvl = WZLevel::make(2, cfg.horizon);
  const SpectralField x0 = default_initial(GridSpec{});
  Eigen::MatrixXd v = Eigen::MatrixXd::Zero(4, 8);
  v.col(0).setConstant(1e-4);
  v.col(3).setConstant(-2e-4);
  const ControlSignal k1(cfg.horizon, 2, v), k2(cfg.horizon, 2, 2.0 * v);
  const ControlSignal k0 = ControlSignal::zero(cfg.horizon, 8);
  const SpectralField y0 = integrate_skeleton(x0, kBench, m, k0, lvl, cfg).snapshots.back();
  const SpectralField d1 = integrate_skeleton(x0, kBench, m, k1, lvl, cfg).snapshots.back() - y0;
  const SpectralField d2 = integrate_skeleton(x0, kBench, m, k2, lvl, cfg).snapshots.back() - y0;
  EXPECT_GT(norm_h(d1), 0.0);
  EXPECT_LT(norm_h(d2 - 2.0 * d1), 1e-3 * norm_h(d2));
  EXPECT_GT(norm_h(d2 - 2.0 * d1), 0.0);
}

TEST(Integrator, ErrorPaths) {
  const SolverConfig cfg = small_cfg(6);
  const NoiseModel m = bench_noise();
  const SpectralField x0 = default_initial(GridSpec{});
  const BrownianPath narrow = sample_path(1, cfg.horizon, 6, 3);
  EXPECT_THROW(integrate_scbf(x0, kBench, m, narrow, cfg), GridMismatch);
  const BrownianPath coarse = sample_path(1, cfg.horizon, 5, 8);
  EXPECT_THROW(integrate_scbf(x0, kBench, m, coarse, cfg), GridMismatch);
  const BrownianPath path = sample_path(1, cfg.horizon, 8, 8);
  EXPECT_THROW(integrate_wz(x0, kBench, m, path, WZLevel::make(7, cfg.horizon), cfg), std::invalid_argument);
  const SpectralField other(GridSpec{16, 2.0 / 3.0});
  EXPECT_THROW(integrate_scbf(other, kBench, m, path, cfg), GridMismatch);
  SolverConfig tight = cfg;
  tight.blowup_threshold = 1e-3;
  try {
    integrate_scbf(x0, kBench, m, path, tight);
    FAIL() << "expected blow-up";
  } catch (const BlowUp& e) {
    EXPECT_EQ(e.step(), 0);
  }
}

TEST(ControlSignal, NormAndLookup) {
  Eigen::MatrixXd v(2, 1);
  v << 1.0, 3.0;
  const ControlSignal c(0.5, 1, v);
  EXPECT_NEAR(c.l2_norm(), std::sqrt(0.25 * 1.0 + 0.25 * 9.0), 1e-15);
  EXPECT_EQ(c.value(0.1)(0), 1.0);
  EXPECT_EQ(c.value(0.3)(0), 3.0);
  EXPECT_EQ(c.value(0.5)(0), 3.0);
  EXPECT_THROW(ControlSignal(0.5, 2, v), std::invalid_argument);
}
