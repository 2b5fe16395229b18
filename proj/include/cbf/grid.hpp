#pragma once

#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace cbf {

/// Error raised when two fields (or a field and a path) live on different grids.
class GridMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Uniform N x N collocation grid on the torus [0, 2pi)^2.
///
/// Modes are stored in FFT order: array index i maps to wavenumber i for
/// i < N/2 and to i - N otherwise. The retained (dealiased) set is the square
/// |k_x|, |k_y| <= cutoff(), which is symmetric under k -> -k and excludes the
/// Nyquist row and column.
struct GridSpec {
  int n = 32;
  double dealias = 2.0 / 3.0;

  /// Largest retained |k_i|: the largest integer strictly below dealias * N / 2.
  int cutoff() const;

  /// Number of conjugate pairs {k, -k} (k != 0) in the retained set.
  int retained_pairs() const;

  /// Sampling resolution on which a pointwise integrand of polynomial degree
  /// `degree` in the velocity is integrated exactly. Even integer degrees get
  /// a zero-padded grid of N * degree / 2 points per axis; anything else is
  /// sampled on the base grid.
  int quadrature_size(double degree) const;

  double cell_area(int samples) const { return (kTwoPi / samples) * (kTwoPi / samples); }

  void validate() const;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

inline int wavenumber(int index, int n) { return index < n / 2 ? index : index - n; }
inline int array_index(int k, int n) { return k >= 0 ? k : k + n; }

/// Conjugate-pair representative of a retained mode: k_x > 0, or k_x = 0 and k_y > 0.
struct ModeKey {
  int kx;
  int ky;
  int norm2() const { return kx * kx + ky * ky; }
};

/// Retained pair representatives in Galerkin order: increasing |k|^2, ties
/// broken lexicographically on (k_x, k_y).
std::vector<ModeKey> galerkin_order(const GridSpec& grid);

void require_same_grid(const GridSpec& a, const GridSpec& b, const char* what);

}  // namespace cbf
