#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "cbf/brownian.hpp"
#include "cbf/noise.hpp"
#include "cbf/operators.hpp"
#include "cbf/philox.hpp"
#include "cbf/random_field.hpp"

using namespace cbf;

namespace {

NoiseModel model_of(NoiseFamily f, std::initializer_list<double> q) {
  Eigen::VectorXd w(q.size());
  int i = 0;
  for (double v : q) w(i++) = v;
  return NoiseModel::make(f, GridSpec{}, w);
}

}  // namespace

// Known-answer vectors of the Random123 distribution for Philox4x32-10.
TEST(Philox, KnownAnswers) {
  using C = Philox4x32::Counter;
  using K = Philox4x32::Key;
  EXPECT_EQ(Philox4x32::generate(C{0, 0, 0, 0}, K{0, 0}), (C{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
  EXPECT_EQ(Philox4x32::generate(C{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, K{0xffffffff, 0xffffffff}),
            (C{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
  EXPECT_EQ(Philox4x32::generate(C{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, K{0xa4093822, 0x299f31d0}),
            (C{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(Philox, UniformStaysOpen) {
  EXPECT_GT(uniform_open(0, 0), 0.0);
  EXPECT_LT(uniform_open(0xffffffff, 0xffffffff), 1.0);
}

TEST(Philox, NormalStreamMoments) {
  NormalStream rng(42);
  const int n = 200000;
  double s = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = rng.next();
    s += x;
    s2 += x * x;
  }
  EXPECT_LT(std::abs(s / n), 5.0 / std::sqrt(n));
  EXPECT_LT(std::abs(s2 / n - 1.0), 5.0 * std::sqrt(2.0 / n));
}

TEST(Philox, DerivedSeedsDiffer) {
  EXPECT_NE(derive_seed(1, 0), derive_seed(1, 1));
  EXPECT_NE(derive_seed(1, 0), derive_seed(2, 0));
  EXPECT_EQ(derive_seed(7, 3), derive_seed(7, 3));
}

TEST(Brownian, CoarseIncrementsAreExactSums) {
  const BrownianPath path = sample_path(9, 0.5, 10, 3);
  for (int l = 0; l < 10; ++l) {
    for (long j = 0; j < (1L << l); ++j) {
      for (int k = 0; k < 3; ++k) {
        EXPECT_EQ(path.increment(l, k, j), path.increment(l + 1, k, 2 * j) + path.increment(l + 1, k, 2 * j + 1));
      }
    }
  }
  for (int k = 0; k < 3; ++k) EXPECT_NEAR(path.value_at(10, k, 1L << 10), path.value_at(0, k, 1), 1e-12);
}

TEST(Brownian, VarianceWithinChiSquareBand) {
  const int L = 14;
  const double T = 0.5;
  const BrownianPath path = sample_path(2024, T, L, 1);
  const long n = 1L << L;
  double s2 = 0.0, mean = 0.0;
  for (long j = 0; j < n; ++j) mean += path.increment(L, 0, j);
  mean /= n;
  for (long j = 0; j < n; ++j) s2 += std::pow(path.increment(L, 0, j) - mean, 2);
  const double ratio = s2 / (n - 1) / std::ldexp(T, -L);
  EXPECT_LT(std::abs(ratio - 1.0), 5.0 * std::sqrt(2.0 / (n - 1)));
}

TEST(Brownian, ExtendingModesKeepsExistingOnes) {
  const BrownianPath a = sample_path(77, 0.5, 8, 3);
  const BrownianPath b = sample_path(77, 0.5, 8, 5);
  for (int k = 0; k < 3; ++k) {
    for (long j = 0; j < 256; ++j) EXPECT_EQ(a.increment(8, k, j), b.increment(8, k, j));
  }
}

TEST(Brownian, SeedsGiveDifferentPaths) {
  EXPECT_NE(sample_path(1, 0.5, 4, 1).increment(4, 0, 0), sample_path(2, 0.5, 4, 1).increment(4, 0, 0));
}

TEST(Brownian, InvalidArguments) {
  EXPECT_THROW(sample_path(1, 0.5, 4, 0), std::invalid_argument);
  EXPECT_THROW(sample_path(1, -1.0, 4, 1), std::invalid_argument);
  EXPECT_THROW(BrownianPath(0.5, 3, 0, Eigen::MatrixXd::Zero(1, 7)), std::invalid_argument);
  EXPECT_THROW(WZLevel::make(0, 0.5), std::invalid_argument);
}

TEST(Brownian, DumpRoundTrip) {
  const BrownianPath a = sample_path(5, 0.25, 6, 2);
  std::stringstream buf;
  write_path(buf, a);
  const BrownianPath b = read_path(buf);
  EXPECT_EQ(b.horizon(), a.horizon());
  EXPECT_EQ(b.max_level(), a.max_level());
  EXPECT_EQ(b.seed(), a.seed());
  EXPECT_EQ(b.level(6), a.level(6));
  std::stringstream junk("not a path");
  EXPECT_THROW(read_path(junk), std::runtime_error);
}

TEST(WongZakai, FirstCellIsZeroAndLaterCellsAreLaggedQuotients) {
  const BrownianPath path = sample_path(3, 0.5, 8, 4);
  const WZLevel lvl = WZLevel::make(3, 0.5);
  EXPECT_TRUE(wz_derivative(path, lvl, 0.0).isZero(0.0));
  EXPECT_TRUE(wz_derivative(path, lvl, 0.9 * lvl.sigma).isZero(0.0));
  for (long m = 1; m < 8; ++m) {
    const Eigen::VectorXd d = wz_derivative(path, lvl, (m + 0.5) * lvl.sigma);
    for (int k = 0; k < 3; ++k) {
      const double expected = (path.value_at(3, k, m) - path.value_at(3, k, m - 1)) / lvl.sigma;
      EXPECT_NEAR(d(k), expected, 1e-12);
    }
    EXPECT_EQ(d(3), 0.0);  // components k >= n are truncated
  }
  EXPECT_TRUE(wz_derivative(path, lvl, 0.6).isZero(0.0));
}

TEST(WongZakai, Adapted) {
  // Changing increments on cells >= m must not affect the derivative on cell m.
  const BrownianPath a = sample_path(4, 0.5, 6, 4);
  Eigen::MatrixXd fine = a.level(6);
  const WZLevel lvl = WZLevel::make(4, 0.5);
  const long m = 5;
  fine.rightCols(64 - m * 4).setConstant(3.0);
  const BrownianPath b(0.5, 6, 0, fine);
  for (long cell = 0; cell <= m; ++cell) {
    EXPECT_EQ(wz_derivative_cell(a, lvl, cell), wz_derivative_cell(b, lvl, cell));
  }
  EXPECT_NE(wz_derivative_cell(a, lvl, m + 1), wz_derivative_cell(b, lvl, m + 1));
}

TEST(WongZakai, LevelAboveModeCountRejected) {
  const BrownianPath path = sample_path(3, 0.5, 8, 2);
  EXPECT_THROW(wz_derivative(path, WZLevel::make(3, 0.5), 0.3), std::invalid_argument);
}

TEST(ShearModes, OrthonormalAndDivergenceFree) {
  const GridSpec g;
  std::vector<SpectralField> phi;
  for (int i = 0; i < 10; ++i) phi.push_back(shear_mode(g, i));
  for (int i = 0; i < 10; ++i) {
    EXPECT_TRUE(phi[i].satisfies_invariants());
    for (int j = 0; j < 10; ++j) EXPECT_NEAR(inner(phi[i], phi[j]), i == j ? 1.0 : 0.0, 1e-14);
  }
  EXPECT_THROW(shear_mode(g, 440), std::invalid_argument);
}

TEST(Noise, FamilyNames) {
  for (auto f : {NoiseFamily::additive, NoiseFamily::diagonal_linear, NoiseFamily::affine}) {
    EXPECT_EQ(noise_family_from_string(to_string(f)), f);
  }
  EXPECT_THROW(noise_family_from_string("multiplicative"), std::invalid_argument);
}

TEST(Noise, ApplyGIsLinearInDrive) {
  NormalStream rng(1);
  const SpectralField u = random_field(GridSpec{}, rng);
  for (auto f : {NoiseFamily::additive, NoiseFamily::diagonal_linear, NoiseFamily::affine}) {
    const NoiseModel m = model_of(f, {0.4, 0.3, 0.2});
    Eigen::VectorXd z(3), w(3);
    z << 1.0, -2.0, 0.5;
    w << 0.3, 0.1, -1.0;
    SpectralField expected = apply_g(m, u, z);
    expected.add_scaled(2.0, apply_g(m, u, w));
    EXPECT_LT(norm_h(apply_g(m, u, z + 2.0 * w) - expected), 1e-13);
    SpectralField by_mode(GridSpec{});
    for (int k = 0; k < 3; ++k) by_mode.add_scaled(z(k), g_k(m, u, k));
    EXPECT_LT(norm_h(apply_g(m, u, z) - by_mode), 1e-13);
  }
  EXPECT_THROW(apply_g(model_of(NoiseFamily::additive, {1.0}), u, Eigen::VectorXd::Zero(2)), std::invalid_argument);
}

TEST(Noise, TraceClosedFormForTwoWeights) {
  NormalStream rng(2);
  const SpectralField u = random_field(GridSpec{}, rng);
  const NoiseModel m = model_of(NoiseFamily::diagonal_linear, {1.0, 0.5});
  SpectralField expected = u;
  expected *= 1.25;
  EXPECT_LT(norm_h(correction_tr(m, u, 2) - expected), 1e-14);
  EXPECT_LT(norm_h(correction_tr(m, u, 1) - u), 1e-14);
}

TEST(Noise, TraceClosedFormMatchesDefinition) {
  NormalStream rng(3);
  const SpectralField u = random_field(GridSpec{}, rng);
  for (auto f : {NoiseFamily::additive, NoiseFamily::diagonal_linear, NoiseFamily::affine}) {
    const NoiseModel m = model_of(f, {0.4, 0.3, 0.2, 0.15});
    for (int n = 1; n <= 4; ++n) {
      EXPECT_LT(norm_h(correction_tr(m, u, n) - correction_tr_by_definition(m, u, n)), 1e-14);
    }
    EXPECT_THROW(correction_tr(m, u, 5), std::invalid_argument);
  }
  EXPECT_TRUE(correction_tr(model_of(NoiseFamily::additive, {0.4, 0.3}), u, 2).is_zero());
}

TEST(Noise, HilbertSchmidtNorms) {
  NormalStream rng(4);
  const SpectralField u = random_field(GridSpec{}, rng);
  const NoiseModel lin = model_of(NoiseFamily::diagonal_linear, {0.4, 0.3});
  EXPECT_NEAR(hs_norm_sq(lin, u), 0.25 * inner(u, u), 1e-14 * inner(u, u));
  const NoiseModel add = model_of(NoiseFamily::additive, {0.4, 0.3});
  EXPECT_NEAR(hs_norm_sq(add, u), 0.25, 1e-14);
  EXPECT_NEAR(hs_distance_sq(add, u, 2.0 * u), 0.0, 1e-14);
}

TEST(Noise, HypothesisAuditPasses) {
  for (auto f : {NoiseFamily::additive, NoiseFamily::diagonal_linear, NoiseFamily::affine}) {
    const NoiseModel m = model_of(f, {0.4, 0.3, 0.2, 0.15, 0.1, 0.08, 0.06, 0.05});
    const HypothesisReport rep = hypothesis_audit(m, 50, 17);
    EXPECT_TRUE(rep.pass) << to_string(f);
    EXPECT_EQ(rep.samples, 50);
  }
}

TEST(Noise, SilentModel) {
  const NoiseModel m = model_of(NoiseFamily::affine, {0.0, 0.0});
  EXPECT_TRUE(m.is_silent());
  NormalStream rng(5);
  const SpectralField u = random_field(GridSpec{}, rng);
  EXPECT_TRUE(apply_g(m, u, Eigen::VectorXd::Ones(2)).is_zero());
}
