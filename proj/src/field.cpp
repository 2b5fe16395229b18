#include "cbf/field.hpp"

#include <algorithm>
#include <cmath>

#include "cbf/fft.hpp"

namespace cbf {

namespace {

using cd = std::complex<double>;

// Split the transform of z = u_x + i u_y into the transforms of u_x and u_y.
inline void unpack(cd zk, cd zmk, cd& ux, cd& uy) {
  const cd c = std::conj(zmk);
  ux = 0.5 * (zk + c);
  const cd d = zk - c;
  uy = cd(0.5 * d.imag(), -0.5 * d.real());
}

}  // namespace

PhysicalField::PhysicalField(const GridSpec& g, int m)
    : grid(g), samples(m), x(Eigen::ArrayXXd::Zero(m, m)), y(Eigen::ArrayXXd::Zero(m, m)) {}

RawSpectrum::RawSpectrum(const GridSpec& g)
    : grid(g), x(Coefficients::Zero(g.n, g.n)), y(Coefficients::Zero(g.n, g.n)) {}

SpectralField::SpectralField(const GridSpec& grid)
    : grid_(grid), x_(Coefficients::Zero(grid.n, grid.n)), y_(Coefficients::Zero(grid.n, grid.n)) {}

void SpectralField::set_mode(int kx, int ky, cd cx, cd cy) {
  const int n = grid_.n;
  x_(array_index(kx, n), array_index(ky, n)) = cx;
  y_(array_index(kx, n), array_index(ky, n)) = cy;
  x_(array_index(-kx, n), array_index(-ky, n)) = std::conj(cx);
  y_(array_index(-kx, n), array_index(-ky, n)) = std::conj(cy);
}

cd SpectralField::coeff_x(int kx, int ky) const {
  return x_(array_index(kx, grid_.n), array_index(ky, grid_.n));
}

cd SpectralField::coeff_y(int kx, int ky) const {
  return y_(array_index(kx, grid_.n), array_index(ky, grid_.n));
}

SpectralField& SpectralField::operator+=(const SpectralField& other) {
  require_same_grid(grid_, other.grid_, "field addition");
  x_ += other.x_;
  y_ += other.y_;
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& other) {
  require_same_grid(grid_, other.grid_, "field subtraction");
  x_ -= other.x_;
  y_ -= other.y_;
  return *this;
}

SpectralField& SpectralField::operator*=(double s) {
  x_ *= s;
  y_ *= s;
  return *this;
}

SpectralField& SpectralField::add_scaled(double s, const SpectralField& other) {
  require_same_grid(grid_, other.grid_, "field update");
  x_ += s * other.x_;
  y_ += s * other.y_;
  return *this;
}

bool SpectralField::is_zero() const { return (x_ == cd(0.0)).all() && (y_ == cd(0.0)).all(); }

bool SpectralField::satisfies_invariants(double tol) const {
  const int n = grid_.n;
  if (x_.rows() != n || x_.cols() != n) return false;
  if (x_(0, 0) != cd(0.0) || y_(0, 0) != cd(0.0)) return false;
  const double scale = std::sqrt(std::max(x_.abs2().maxCoeff(), y_.abs2().maxCoeff()));
  for (int q = 0; q < n; ++q) {
    for (int p = 0; p < n; ++p) {
      const int kx = wavenumber(p, n);
      const int ky = wavenumber(q, n);
      const cd ux = x_(p, q);
      const cd uy = y_(p, q);
      if (!is_retained(grid_, kx, ky)) {
        if (ux != cd(0.0) || uy != cd(0.0)) return false;
        continue;
      }
      const int mp = array_index(-kx, n);
      const int mq = array_index(-ky, n);
      if (x_(mp, mq) != std::conj(ux) || y_(mp, mq) != std::conj(uy)) return false;
      const double kn = std::sqrt(double(kx) * kx + double(ky) * ky);
      if (std::abs(double(kx) * ux + double(ky) * uy) > tol * kn * scale) return false;
    }
  }
  return true;
}

SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
SpectralField operator*(double s, SpectralField a) { return a *= s; }

bool is_retained(const GridSpec& grid, int kx, int ky) {
  const int kmax = grid.cutoff();
  return std::abs(kx) <= kmax && std::abs(ky) <= kmax;
}

RawSpectrum to_spectral(const PhysicalField& f) {
  f.grid.validate();
  const int n = f.grid.n;
  if (f.samples != n || f.x.rows() != n || f.x.cols() != n || f.y.rows() != n || f.y.cols() != n) {
    throw GridMismatch("to_spectral: sample array does not match the N x N grid");
  }
  Coefficients z(n, n);
  z.real() = f.x;
  z.imag() = f.y;
  fft_for(n).forward(z);
  z /= double(n) * double(n);

  RawSpectrum out(f.grid);
  for (int q = 0; q < n; ++q) {
    const int mq = (n - q) % n;
    for (int p = 0; p < n; ++p) {
      const int mp = (n - p) % n;
      unpack(z(p, q), z(mp, mq), out.x(p, q), out.y(p, q));
    }
  }
  return out;
}

PhysicalField to_physical(const SpectralField& u) { return to_physical(u, u.grid().n); }

PhysicalField to_physical(const SpectralField& u, int samples) {
  const GridSpec& g = u.grid();
  const int n = g.n;
  if (samples < n) throw GridMismatch("to_physical: evaluation grid is coarser than the field grid");
  const int kmax = g.cutoff();
  Coefficients z = Coefficients::Zero(samples, samples);
  for (int ky = -kmax; ky <= kmax; ++ky) {
    const int qn = array_index(ky, n);
    const int qm = array_index(ky, samples);
    for (int kx = -kmax; kx <= kmax; ++kx) {
      const int pn = array_index(kx, n);
      z(array_index(kx, samples), qm) = u.x()(pn, qn) + cd(0.0, 1.0) * u.y()(pn, qn);
    }
  }
  fft_for(samples).inverse(z);
  PhysicalField out;
  out.grid = g;
  out.samples = samples;
  out.x = z.real();
  out.y = z.imag();
  return out;
}

PhysicalField to_physical(const RawSpectrum& u) {
  const int n = u.grid.n;
  Coefficients z = u.x + cd(0.0, 1.0) * u.y;
  fft_for(n).inverse(z);
  PhysicalField out;
  out.grid = u.grid;
  out.samples = n;
  out.x = z.real();
  out.y = z.imag();
  return out;
}

RawSpectrum truncate_to_retained(const PhysicalField& f) {
  const int m = f.samples;
  const int n = f.grid.n;
  if (m < n) throw GridMismatch("truncate_to_retained: sample grid is coarser than the field grid");
  Coefficients z(m, m);
  z.real() = f.x;
  z.imag() = f.y;
  fft_for(m).forward(z);
  const double scale = 1.0 / (double(m) * double(m));
  const int kmax = f.grid.cutoff();
  RawSpectrum out(f.grid);
  for (int ky = -kmax; ky <= kmax; ++ky) {
    for (int kx = -kmax; kx <= kmax; ++kx) {
      cd ux, uy;
      unpack(z(array_index(kx, m), array_index(ky, m)), z(array_index(-kx, m), array_index(-ky, m)), ux, uy);
      out.x(array_index(kx, n), array_index(ky, n)) = scale * ux;
      out.y(array_index(kx, n), array_index(ky, n)) = scale * uy;
    }
  }
  return out;
}

}  // namespace cbf
