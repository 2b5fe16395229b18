#pragma once

#include <Eigen/Core>

#include "cbf/grid.hpp"

namespace cbf {

using Coefficients = Eigen::ArrayXXcd;

/// Real 2-vector samples on a uniform grid. `samples` is N for the base grid
/// and larger for zero-padded evaluations used by exact quadrature.
struct PhysicalField {
  GridSpec grid;
  int samples = 0;
  Eigen::ArrayXXd x;
  Eigen::ArrayXXd y;

  PhysicalField() = default;
  PhysicalField(const GridSpec& g, int m);
  explicit PhysicalField(const GridSpec& g) : PhysicalField(g, g.n) {}
};

/// Fourier coefficients straight out of a transform: neither truncated nor
/// projected. Only leray_project turns these into a SpectralField.
struct RawSpectrum {
  GridSpec grid;
  Coefficients x;
  Coefficients y;

  RawSpectrum() = default;
  explicit RawSpectrum(const GridSpec& g);
};

/// Divergence-free, mean-free, real velocity field stored as Fourier
/// coefficients u(k) = sum_x u(x) e^{-i k.x} / N^2 in FFT order.
///
/// Coefficients outside the retained (dealiased) square are zero. The class is
/// a plain value: linear combinations of valid fields stay valid, and callers
/// that write coefficients directly are expected to restore the invariants
/// (typically through leray_project).
class SpectralField {
 public:
  SpectralField() = default;
  explicit SpectralField(const GridSpec& grid);

  const GridSpec& grid() const { return grid_; }
  Coefficients& x() { return x_; }
  Coefficients& y() { return y_; }
  const Coefficients& x() const { return x_; }
  const Coefficients& y() const { return y_; }

  /// Set the coefficient pair at wavevector k and its conjugate at -k.
  void set_mode(int kx, int ky, std::complex<double> cx, std::complex<double> cy);
  std::complex<double> coeff_x(int kx, int ky) const;
  std::complex<double> coeff_y(int kx, int ky) const;

  SpectralField& operator+=(const SpectralField& other);
  SpectralField& operator-=(const SpectralField& other);
  SpectralField& operator*=(double s);

  /// this += s * other, the workhorse of the integrators.
  SpectralField& add_scaled(double s, const SpectralField& other);

  bool is_zero() const;

  /// Checks reality, zero mean, truncation, and |k.u(k)| <= tol * |k| * max_k' |u(k')|.
  bool satisfies_invariants(double tol = 1e-12) const;

 private:
  GridSpec grid_;
  Coefficients x_;
  Coefficients y_;
};

SpectralField operator+(SpectralField a, const SpectralField& b);
SpectralField operator-(SpectralField a, const SpectralField& b);
SpectralField operator*(double s, SpectralField a);

/// Forward transform of base-grid samples.
RawSpectrum to_spectral(const PhysicalField& f);

/// Inverse transform on the base grid (`samples` = N) or on a zero-padded grid.
PhysicalField to_physical(const SpectralField& u);
PhysicalField to_physical(const SpectralField& u, int samples);
PhysicalField to_physical(const RawSpectrum& u);

/// Forward transform of samples on any grid of at least N points per axis,
/// keeping only the retained modes (no projection).
RawSpectrum truncate_to_retained(const PhysicalField& f);

bool is_retained(const GridSpec& grid, int kx, int ky);

}  // namespace cbf
