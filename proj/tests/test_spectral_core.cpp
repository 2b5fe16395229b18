#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "cbf/fft.hpp"
#include "cbf/operators.hpp"
#include "cbf/philox.hpp"
#include "cbf/random_field.hpp"

using namespace cbf;
using std::numbers::pi;

namespace {

template <class Fx, class Fy>
PhysicalField sample(const GridSpec& g, Fx fx, Fy fy) {
  PhysicalField f(g);
  for (int j = 0; j < g.n; ++j) {
    for (int i = 0; i < g.n; ++i) {
      const double x = kTwoPi * i / g.n, y = kTwoPi * j / g.n;
      f.x(i, j) = fx(x, y);
      f.y(i, j) = fy(x, y);
    }
  }
  return f;
}

SpectralField sin_y(const GridSpec& g) {
  return leray_project(to_spectral(sample(g, [](double, double y) { return std::sin(y); }, [](double, double) { return 0.0; })));
}

double max_abs_diff(const SpectralField& a, const SpectralField& b) {
  return std::max((a.x() - b.x()).abs().maxCoeff(), (a.y() - b.y()).abs().maxCoeff());
}

}  // namespace

TEST(Grid, CutoffAndCounts) {
  const GridSpec g;
  EXPECT_EQ(g.cutoff(), 10);
  EXPECT_EQ(g.retained_pairs(), 220);
  EXPECT_EQ(g.quadrature_size(4.0), 64);
  EXPECT_EQ(g.quadrature_size(6.0), 96);
  EXPECT_EQ(g.quadrature_size(3.5), 32);
  EXPECT_EQ((GridSpec{16, 1.0}).cutoff(), 7);
}

TEST(Grid, WavenumberRoundTrip) {
  for (int i = 0; i < 32; ++i) EXPECT_EQ(array_index(wavenumber(i, 32), 32), i);
  EXPECT_EQ(wavenumber(16, 32), -16);
  EXPECT_EQ(wavenumber(31, 32), -1);
}

TEST(Grid, GalerkinOrder) {
  const auto order = galerkin_order(GridSpec{});
  ASSERT_EQ(order.size(), 220u);
  EXPECT_EQ(order[0].kx, 0);
  EXPECT_EQ(order[0].ky, 1);
  EXPECT_EQ(order[1].kx, 1);
  EXPECT_EQ(order[1].ky, 0);
  for (std::size_t i = 1; i < order.size(); ++i) EXPECT_LE(order[i - 1].norm2(), order[i].norm2());
  for (const auto& m : order) EXPECT_TRUE(m.kx > 0 || (m.kx == 0 && m.ky > 0));
}

TEST(Grid, InvalidSpecRejected) {
  EXPECT_THROW((GridSpec{7, 0.5}).validate(), std::invalid_argument);
  EXPECT_THROW((GridSpec{32, 0.0}).validate(), std::invalid_argument);
}

TEST(Fft, RoundTrip) {
  const Fft2d& f = fft_for(24);
  NormalStream rng(3);
  Eigen::ArrayXXcd a(24, 24);
  for (Eigen::Index i = 0; i < a.size(); ++i) a(i) = {rng.next(), rng.next()};
  Eigen::ArrayXXcd b = a;
  f.forward(b);
  f.inverse(b);
  b /= double(24 * 24);
  EXPECT_LT((a - b).abs().maxCoeff(), 1e-12);
}

TEST(Transform, SinYCoefficients) {
  const GridSpec g;
  const RawSpectrum raw = to_spectral(sample(g, [](double, double y) { return std::sin(y); }, [](double, double) { return 0.0; }));
  const std::complex<double> expected(0.0, -0.5);
  EXPECT_LT(std::abs(raw.x(0, 1) - expected), 1e-15);
  EXPECT_LT(std::abs(raw.x(0, g.n - 1) - std::conj(expected)), 1e-15);
  EXPECT_LT(raw.y.abs().maxCoeff(), 1e-15);
}

TEST(Transform, PhysicalRoundTrip) {
  const GridSpec g;
  NormalStream rng(11);
  const SpectralField u = random_field(g, rng);
  const SpectralField back = leray_project(to_spectral(to_physical(u)));
  EXPECT_LT(max_abs_diff(u, back), 1e-12);
}

TEST(Leray, GradientFieldVanishes) {
  const GridSpec g;
  const SpectralField p =
      leray_project(to_spectral(sample(g, [](double x, double) { return std::sin(x); }, [](double, double) { return 0.0; })));
  EXPECT_LT(norm_h(p), 1e-14);
}

TEST(Leray, DivergenceFreeFixedAndIdempotent) {
  const GridSpec g;
  const SpectralField u = sin_y(g);
  EXPECT_NEAR(u.coeff_x(0, 1).imag(), -0.5, 1e-15);
  NormalStream rng(5);
  RawSpectrum raw(g);
  for (Eigen::Index i = 0; i < raw.x.size(); ++i) {
    raw.x(i) = {rng.next(), rng.next()};
    raw.y(i) = {rng.next(), rng.next()};
  }
  // Hermitian symmetrize so the raw data is a real field.
  const PhysicalField f = to_physical(raw);
  const SpectralField p = leray_project(to_spectral(f));
  EXPECT_TRUE(p.satisfies_invariants(1e-12));
  EXPECT_LT(max_abs_diff(p, leray_project(p)), 1e-15);
}

TEST(Field, SetModeWritesConjugate) {
  SpectralField u(GridSpec{});
  u.set_mode(2, -3, {0.3, 0.0}, {0.2, 0.1});
  EXPECT_EQ(u.coeff_x(-2, 3), std::conj(u.coeff_x(2, -3)));
  EXPECT_EQ(u.coeff_y(-2, 3), std::conj(u.coeff_y(2, -3)));
}

TEST(Field, GridMismatchDetected) {
  SpectralField a(GridSpec{32, 2.0 / 3.0});
  SpectralField b(GridSpec{16, 2.0 / 3.0});
  EXPECT_THROW(a += b, GridMismatch);
  EXPECT_THROW(inner(a, b), GridMismatch);
}

TEST(Norms, SinYHandValues) {
  const SpectralField u = sin_y(GridSpec{});
  const Norms n = norms(u, 3.0);
  EXPECT_NEAR(n.h * n.h, 2 * pi * pi, 1e-12);
  EXPECT_NEAR(n.v * n.v, 2 * pi * pi, 1e-12);
  EXPECT_NEAR(std::pow(n.lp, 4.0), 1.5 * pi * pi, 1e-12);
  EXPECT_NEAR(lp_power(u, 4.0), 1.5 * pi * pi, 1e-12);
}

TEST(Stokes, EigenvalueIsWavenumberSquared) {
  SpectralField u(GridSpec{});
  // (3, 4) direction perpendicular: (-4, 3).
  u.set_mode(3, 4, {-4.0, 0.0}, {3.0, 0.0});
  const SpectralField a = stokes_apply(u);
  EXPECT_NEAR(std::abs(a.coeff_x(3, 4) - 25.0 * u.coeff_x(3, 4)), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(a.coeff_y(-3, -4) - 25.0 * u.coeff_y(-3, -4)), 0.0, 1e-12);
}

TEST(Convective, ShearAndTaylorGreenAreSteady) {
  const GridSpec g;
  const SpectralField u = sin_y(g);
  EXPECT_LT(norm_h(convective(u, u)), 1e-13);
  const SpectralField tg = leray_project(to_spectral(
      sample(g, [](double x, double y) { return std::sin(x) * std::cos(y); },
             [](double x, double y) { return -std::cos(x) * std::sin(y); })));
  EXPECT_LT(norm_h(convective(tg, tg)), 1e-13);
}

TEST(Trilinear, HandComputedValue) {
  const GridSpec g;
  const SpectralField u = sin_y(g);
  const SpectralField v = leray_project(
      to_spectral(sample(g, [](double, double) { return 0.0; }, [](double x, double) { return std::sin(x); })));
  const SpectralField w = leray_project(to_spectral(
      sample(g, [](double x, double y) { return -std::sin(x) * std::cos(y); },
             [](double x, double y) { return std::cos(x) * std::sin(y); })));
  EXPECT_NEAR(trilinear(u, v, w), pi * pi, 1e-12);
  EXPECT_NEAR(trilinear(u, w, v), -pi * pi, 1e-12);
}

TEST(Trilinear, SkewSymmetryOnRandomFields) {
  const GridSpec g;
  NormalStream rng(21);
  for (int t = 0; t < 20; ++t) {
    const SpectralField u = random_field(g, rng), v = random_field(g, rng), w = random_field(g, rng);
    const double scale = norm_v(u) * norm_v(v) * norm_v(w);
    EXPECT_LT(std::abs(trilinear(u, v, w) + trilinear(u, w, v)) / scale, 1e-12);
    EXPECT_LT(std::abs(trilinear(u, v, v)) / scale, 1e-12);
    EXPECT_NEAR(trilinear(u, v, w), inner(convective(u, v), w), 1e-10 * scale);
  }
}

TEST(Forchheimer, LinearCaseIsIdentity) {
  NormalStream rng(2);
  const SpectralField u = random_field(GridSpec{}, rng);
  EXPECT_LT(max_abs_diff(forchheimer(u, 1.0), u), 1e-14);
}

TEST(Forchheimer, CubicOfShear) {
  // sin^3 y = (3 sin y - sin 3y) / 4
  const SpectralField c = forchheimer(sin_y(GridSpec{}), 3.0);
  EXPECT_NEAR(std::abs(c.coeff_x(0, 1) - std::complex<double>(0.0, -0.375)), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(c.coeff_x(0, 3) - std::complex<double>(0.0, 0.125)), 0.0, 1e-14);
  EXPECT_NEAR(norm_h(c), std::sqrt(4 * pi * pi * (0.75 * 0.75 + 0.25 * 0.25) / 2.0), 1e-12);
}

TEST(Forchheimer, DualityAndHomogeneity) {
  const GridSpec g;
  NormalStream rng(8);
  for (double r : {2.0, 3.0, 5.0}) {
    const SpectralField u = random_field_with_norm(g, rng, 2.0);
    const double pairing = inner(forchheimer(u, r), u);
    EXPECT_NEAR(pairing, lp_power(u, r + 1.0), 1e-10 * pairing) << "r=" << r;
    EXPECT_NEAR(forchheimer_pairing(u, u, r), pairing, 1e-10 * pairing);
    // C'(u)u = r C(u) by homogeneity of degree r.
    const SpectralField lhs = forchheimer_gateaux(u, u, r);
    SpectralField rhs = forchheimer(u, r);
    rhs *= r;
    EXPECT_LT(norm_h(lhs - rhs), 1e-10 * norm_h(rhs)) << "r=" << r;
  }
}

TEST(Forchheimer, GateauxDerivativeAtZeroVanishes) {
  const GridSpec g;
  NormalStream rng(9);
  const SpectralField v = random_field(g, rng);
  EXPECT_TRUE(forchheimer_gateaux(SpectralField(g), v, 2.0).is_zero());
  EXPECT_TRUE(forchheimer_gateaux(SpectralField(g), v, 3.0).is_zero());
}

TEST(Drift, LinearOnlyIsShiftedStokes) {
  NormalStream rng(4);
  const SpectralField u = random_field(GridSpec{}, rng);
  const FluidParams p{2.0, 0.5, 0.0, 3.0, false};
  SpectralField expected = stokes_apply(u);
  expected *= 2.0;
  expected.add_scaled(0.5, u);
  EXPECT_LT(max_abs_diff(drift(u, p), expected), 1e-12);
}

TEST(Drift, NonlinearTermsMatchComponents) {
  NormalStream rng(6);
  const SpectralField u = random_field_with_norm(GridSpec{}, rng, 3.0);
  const FluidParams p{1.0, 0.1, 1.5, 3.0, true};
  const Nonlinear nl = nonlinear_terms(u, p);
  SpectralField expected = convective(u, u);
  expected.add_scaled(1.5, forchheimer(u, 3.0));
  EXPECT_LT(norm_h(nl.value - expected), 1e-12 * norm_h(expected));
  EXPECT_NEAR(nl.lp_power, lp_power(u, 4.0), 1e-12 * nl.lp_power);
}

TEST(Galerkin, ProjectionProperties) {
  const GridSpec g;
  NormalStream rng(12);
  const SpectralField u = random_field(g, rng);
  EXPECT_LT(max_abs_diff(galerkin_project(u, g.retained_pairs()), u), 1e-15);
  for (int m : {1, 5, 40, 219}) {
    const SpectralField pm = galerkin_project(u, m);
    EXPECT_LE(norm_h(pm), norm_h(u));
    EXPECT_LT(max_abs_diff(galerkin_project(pm, m), pm), 1e-15);
    EXPECT_TRUE(pm.satisfies_invariants());
  }
  EXPECT_THROW(galerkin_project(u, 0), std::invalid_argument);
  EXPECT_THROW(galerkin_project(u, g.retained_pairs() + 1), std::invalid_argument);
}

TEST(Galerkin, LowestShellSurvives) {
  SpectralField u(GridSpec{});
  u.set_mode(0, 1, {0.0, -0.5}, {0.0, 0.0});
  u.set_mode(2, 2, {0.25, 0.0}, {-0.25, 0.0});
  const SpectralField p1 = galerkin_project(u, 1);
  EXPECT_EQ(p1.coeff_x(0, 1), u.coeff_x(0, 1));
  EXPECT_EQ(p1.coeff_x(2, 2), std::complex<double>(0.0, 0.0));
  EXPECT_EQ(p1.coeff_y(2, 2), std::complex<double>(0.0, 0.0));
}

TEST(RandomField, InvariantsAndNorm) {
  const GridSpec g;
  NormalStream rng(13);
  for (double target : {0.1, 1.0, 10.0}) {
    const SpectralField u = random_field_with_norm(g, rng, target);
    EXPECT_TRUE(u.satisfies_invariants());
    EXPECT_NEAR(norm_h(u), target, 1e-12 * target);
  }
  for (int i = 0; i < 100; ++i) {
    const double x = log_uniform(rng, 0.1, 10.0);
    EXPECT_GE(x, 0.1);
    EXPECT_LE(x, 10.0);
  }
}
