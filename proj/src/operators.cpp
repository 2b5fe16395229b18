#include "cbf/operators.hpp"

#include <cmath>
#include <stdexcept>

#include "cbf/fft.hpp"

namespace cbf {

namespace {

using cd = std::complex<double>;
constexpr cd kI(0.0, 1.0);

void require_exponent(double r, const char* what) {
  if (!(r >= 1.0)) throw std::invalid_argument(std::string(what) + ": exponent r must be >= 1");
}

// Inverse transform of the packed spectrum a + i b (retained modes only) onto
// an m x m grid. Both a and b must be Hermitian so the result splits into the
// real and imaginary parts.
Coefficients packed_inverse(const GridSpec& g, const Coefficients& a, const Coefficients& b, int m) {
  const int n = g.n;
  const int kmax = g.cutoff();
  Coefficients z = Coefficients::Zero(m, m);
  for (int ky = -kmax; ky <= kmax; ++ky) {
    const int qn = array_index(ky, n);
    const int qm = array_index(ky, m);
    for (int kx = -kmax; kx <= kmax; ++kx) {
      const int pn = array_index(kx, n);
      z(array_index(kx, m), qm) = a(pn, qn) + kI * b(pn, qn);
    }
  }
  fft_for(m).inverse(z);
  return z;
}

// Forward transform of packed samples, unpacked onto the retained modes.
RawSpectrum packed_forward(const GridSpec& g, Coefficients z) {
  const int m = static_cast<int>(z.rows());
  PhysicalField f;
  f.grid = g;
  f.samples = m;
  f.x = z.real();
  f.y = z.imag();
  return truncate_to_retained(f);
}

Coefficients times_ik(const Coefficients& c, const GridSpec& g, bool along_x) {
  const int n = g.n;
  Coefficients out(n, n);
  for (int q = 0; q < n; ++q) {
    for (int p = 0; p < n; ++p) {
      const double k = along_x ? wavenumber(p, n) : wavenumber(q, n);
      out(p, q) = kI * k * c(p, q);
    }
  }
  return out;
}

double parseval(const Coefficients& ax, const Coefficients& ay, const Coefficients& bx, const Coefficients& by) {
  const double s = (ax * bx.conjugate()).real().sum() + (ay * by.conjugate()).real().sum();
  return kTwoPi * kTwoPi * s;
}

}  // namespace

double abs_power(double s, double e) {
  if (e == 0.0) return 1.0;
  const double half = 0.5 * e;
  if (half == std::floor(half) && half > 0.0 && half < 64.0) {
    double out = s;
    for (int i = 1; i < static_cast<int>(half); ++i) out *= s;
    return out;
  }
  if (s == 0.0) return 0.0;
  return std::pow(s, half);
}

SpectralField leray_project(const RawSpectrum& raw) {
  const GridSpec& g = raw.grid;
  const int n = g.n;
  const int kmax = g.cutoff();
  SpectralField out(g);
  for (int ky = -kmax; ky <= kmax; ++ky) {
    for (int kx = -kmax; kx <= kmax; ++kx) {
      if (kx == 0 && ky == 0) continue;
      const int p = array_index(kx, n);
      const int q = array_index(ky, n);
      const cd ux = raw.x(p, q);
      const cd uy = raw.y(p, q);
      const double k2 = double(kx * kx + ky * ky);
      const cd dot = (double(kx) * ux + double(ky) * uy) / k2;
      out.x()(p, q) = ux - double(kx) * dot;
      out.y()(p, q) = uy - double(ky) * dot;
    }
  }
  return out;
}

SpectralField leray_project(const SpectralField& u) {
  RawSpectrum raw(u.grid());
  raw.x = u.x();
  raw.y = u.y();
  return leray_project(raw);
}

SpectralField stokes_apply(const SpectralField& u) {
  const int n = u.grid().n;
  SpectralField out = u;
  for (int q = 0; q < n; ++q) {
    for (int p = 0; p < n; ++p) {
      const double k2 = double(wavenumber(p, n)) * wavenumber(p, n) + double(wavenumber(q, n)) * wavenumber(q, n);
      out.x()(p, q) *= k2;
      out.y()(p, q) *= k2;
    }
  }
  return out;
}

RawSpectrum convective_unprojected(const SpectralField& u, const SpectralField& v) {
  require_same_grid(u.grid(), v.grid(), "convective");
  const GridSpec& g = u.grid();
  const int n = g.n;
  const Coefficients uz = packed_inverse(g, u.x(), u.y(), n);
  const Coefficients dx = packed_inverse(g, times_ik(v.x(), g, true), times_ik(v.y(), g, true), n);
  const Coefficients dy = packed_inverse(g, times_ik(v.x(), g, false), times_ik(v.y(), g, false), n);
  // (u.grad) v in packed form: u_x, u_y are real, so each product keeps the packing.
  Coefficients prod = uz.real() * dx + uz.imag() * dy;
  return packed_forward(g, std::move(prod));
}

SpectralField convective(const SpectralField& u, const SpectralField& v) {
  return leray_project(convective_unprojected(u, v));
}

double trilinear(const SpectralField& u, const SpectralField& v, const SpectralField& w) {
  require_same_grid(u.grid(), v.grid(), "trilinear");
  require_same_grid(u.grid(), w.grid(), "trilinear");
  const GridSpec& g = u.grid();
  const int m = g.quadrature_size(4.0);
  const Coefficients uz = packed_inverse(g, u.x(), u.y(), m);
  const Coefficients dx = packed_inverse(g, times_ik(v.x(), g, true), times_ik(v.y(), g, true), m);
  const Coefficients dy = packed_inverse(g, times_ik(v.x(), g, false), times_ik(v.y(), g, false), m);
  const Coefficients wz = packed_inverse(g, w.x(), w.y(), m);
  const Coefficients prod = uz.real() * dx + uz.imag() * dy;
  const double s = (prod.real() * wz.real() + prod.imag() * wz.imag()).sum();
  return s * g.cell_area(m);
}

RawSpectrum forchheimer_unprojected(const SpectralField& u, double r) {
  require_exponent(r, "forchheimer");
  const GridSpec& g = u.grid();
  const int m = g.quadrature_size(r + 1.0);
  Coefficients z = packed_inverse(g, u.x(), u.y(), m);
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    const double s = std::norm(z(i));
    z(i) *= abs_power(s, r - 1.0);
  }
  return packed_forward(g, std::move(z));
}

SpectralField forchheimer(const SpectralField& u, double r) { return leray_project(forchheimer_unprojected(u, r)); }

double forchheimer_pairing(const SpectralField& u, const SpectralField& v, double r) {
  require_exponent(r, "forchheimer_pairing");
  require_same_grid(u.grid(), v.grid(), "forchheimer_pairing");
  const GridSpec& g = u.grid();
  const int m = g.quadrature_size(r + 1.0);
  const Coefficients uz = packed_inverse(g, u.x(), u.y(), m);
  const Coefficients vz = packed_inverse(g, v.x(), v.y(), m);
  double s = 0.0;
  for (Eigen::Index i = 0; i < uz.size(); ++i) {
    const double dot = uz(i).real() * vz(i).real() + uz(i).imag() * vz(i).imag();
    s += abs_power(std::norm(uz(i)), r - 1.0) * dot;
  }
  return s * g.cell_area(m);
}

SpectralField forchheimer_gateaux(const SpectralField& u, const SpectralField& v, double r) {
  require_exponent(r, "forchheimer_gateaux");
  require_same_grid(u.grid(), v.grid(), "forchheimer_gateaux");
  const GridSpec& g = u.grid();
  if (r == 1.0) return leray_project(v);
  const int m = g.quadrature_size(r + 1.0);
  const Coefficients uz = packed_inverse(g, u.x(), u.y(), m);
  Coefficients vz = packed_inverse(g, v.x(), v.y(), m);
  for (Eigen::Index i = 0; i < uz.size(); ++i) {
    const double s = std::norm(uz(i));
    if (s == 0.0) {
      vz(i) = 0.0;
      continue;
    }
    const double dot = uz(i).real() * vz(i).real() + uz(i).imag() * vz(i).imag();
    vz(i) = abs_power(s, r - 1.0) * vz(i) + (r - 1.0) * abs_power(s, r - 3.0) * dot * uz(i);
  }
  return leray_project(packed_forward(g, std::move(vz)));
}

Nonlinear nonlinear_terms(const SpectralField& u, const FluidParams& p) {
  const GridSpec& g = u.grid();
  const int n = g.n;
  RawSpectrum total(g);
  if (p.convection) total = convective_unprojected(u, u);

  const int m = g.quadrature_size(p.r + 1.0);
  Coefficients z = packed_inverse(g, u.x(), u.y(), m);
  double power = 0.0;
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    const double s = std::norm(z(i));
    const double w = abs_power(s, p.r - 1.0);
    power += w * s;
    z(i) *= w;
  }
  Nonlinear out;
  out.lp_power = power * g.cell_area(m);
  if (p.beta != 0.0) {
    const RawSpectrum c = packed_forward(g, std::move(z));
    const int kmax = g.cutoff();
    for (int ky = -kmax; ky <= kmax; ++ky) {
      for (int kx = -kmax; kx <= kmax; ++kx) {
        const int pi = array_index(kx, n);
        const int qi = array_index(ky, n);
        total.x(pi, qi) += p.beta * c.x(pi, qi);
        total.y(pi, qi) += p.beta * c.y(pi, qi);
      }
    }
  }
  out.value = leray_project(total);
  return out;
}

SpectralField drift(const SpectralField& u, const FluidParams& p) {
  SpectralField out = nonlinear_terms(u, p).value;
  out.add_scaled(p.mu, stokes_apply(u));
  out.add_scaled(p.alpha, u);
  return out;
}

SpectralField galerkin_project(const SpectralField& u, int m) {
  const GridSpec& g = u.grid();
  if (m <= 0) throw std::invalid_argument("galerkin_project: mode count must be positive");
  const auto order = galerkin_order(g);
  if (m > static_cast<int>(order.size())) {
    throw std::invalid_argument("galerkin_project: mode count exceeds the retained pairs");
  }
  SpectralField out(g);
  for (int i = 0; i < m; ++i) {
    const ModeKey k = order[i];
    out.set_mode(k.kx, k.ky, u.coeff_x(k.kx, k.ky), u.coeff_y(k.kx, k.ky));
  }
  return out;
}

double inner(const SpectralField& u, const SpectralField& v) {
  require_same_grid(u.grid(), v.grid(), "inner");
  return parseval(u.x(), u.y(), v.x(), v.y());
}

double inner(const RawSpectrum& u, const SpectralField& v) {
  require_same_grid(u.grid, v.grid(), "inner");
  return parseval(u.x, u.y, v.x(), v.y());
}

double norm_h(const SpectralField& u) { return std::sqrt(inner(u, u)); }

double norm_v(const SpectralField& u) {
  const int n = u.grid().n;
  double s = 0.0;
  for (int q = 0; q < n; ++q) {
    for (int p = 0; p < n; ++p) {
      const double k2 = double(wavenumber(p, n)) * wavenumber(p, n) + double(wavenumber(q, n)) * wavenumber(q, n);
      s += k2 * (std::norm(u.x()(p, q)) + std::norm(u.y()(p, q)));
    }
  }
  return kTwoPi * std::sqrt(s);
}

double lp_power(const SpectralField& u, double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("lp_power: exponent must be >= 1");
  const GridSpec& g = u.grid();
  const int m = g.quadrature_size(p);
  const Coefficients z = packed_inverse(g, u.x(), u.y(), m);
  double s = 0.0;
  for (Eigen::Index i = 0; i < z.size(); ++i) s += abs_power(std::norm(z(i)), p);
  return s * g.cell_area(m);
}

Norms norms(const SpectralField& u, double r) {
  return {norm_h(u), norm_v(u), std::pow(lp_power(u, r + 1.0), 1.0 / (r + 1.0))};
}

}  // namespace cbf
