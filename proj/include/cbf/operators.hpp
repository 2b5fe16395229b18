#pragma once

#include "cbf/field.hpp"
#include "cbf/params.hpp"

namespace cbf {

/// Projection onto retained, divergence-free, mean-free fields:
/// u(k) <- (I - k k^T / |k|^2) u(k), u(0) <- 0, non-retained modes dropped.
SpectralField leray_project(const RawSpectrum& raw);
SpectralField leray_project(const SpectralField& u);

/// A u = |k|^2 u(k).
SpectralField stokes_apply(const SpectralField& u);

/// B(u, v) = P[(u.grad) v], evaluated pseudospectrally with 2/3-rule truncation.
SpectralField convective(const SpectralField& u, const SpectralField& v);

/// (u.grad) v truncated to the retained modes but not projected.
RawSpectrum convective_unprojected(const SpectralField& u, const SpectralField& v);

/// b(u, v, w) = \int (u.grad) v . w by collocation on a grid fine enough to be exact.
double trilinear(const SpectralField& u, const SpectralField& v, const SpectralField& w);

/// C(u) = P(|u|^{r-1} u). For odd integer r the product is formed on a
/// zero-padded grid so the retained modes are alias-free.
SpectralField forchheimer(const SpectralField& u, double r);
RawSpectrum forchheimer_unprojected(const SpectralField& u, double r);

/// <|u|^{r-1} u, v> evaluated pointwise before projection.
double forchheimer_pairing(const SpectralField& u, const SpectralField& v, double r);

/// Gateaux derivative C'(u) v with the 0-at-0 branch for 1 < r < 3.
SpectralField forchheimer_gateaux(const SpectralField& u, const SpectralField& v, double r);

/// M(u) = mu A u + B(u) + alpha u + beta C(u).
SpectralField drift(const SpectralField& u, const FluidParams& p);

/// B(u) + beta C(u), the explicitly stepped part of the drift, together with
/// ||u||_{L^{r+1}}^{r+1} read off the same padded samples.
struct Nonlinear {
  SpectralField value;
  double lp_power = 0.0;
};
Nonlinear nonlinear_terms(const SpectralField& u, const FluidParams& p);

/// Keep the m lowest conjugate pairs in Galerkin order, zero the rest.
SpectralField galerkin_project(const SpectralField& u, int m);

/// L^2 inner product over the torus via Parseval.
double inner(const SpectralField& u, const SpectralField& v);
double inner(const RawSpectrum& u, const SpectralField& v);

struct Norms {
  double h = 0.0;   ///< ||u||_H
  double v = 0.0;   ///< ||u||_V = ||grad u||_{L^2}
  double lp = 0.0;  ///< ||u||_{L^{r+1}}
};

Norms norms(const SpectralField& u, double r);
double norm_h(const SpectralField& u);
double norm_v(const SpectralField& u);

/// ||u||_{L^p}^p by grid quadrature (exact for even integer p).
double lp_power(const SpectralField& u, double p);

/// |u|^e given s = |u|^2, with exact repeated multiplication for even integer e.
double abs_power(double s, double e);

}  // namespace cbf
