#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace cbf {

/// Dyadic level n of the smoothed noise: sigma = T / 2^n.
struct WZLevel {
  int n = 1;
  double sigma = 0.0;

  static WZLevel make(int n, double horizon);
};

/// Increments of k_dim independent Brownian motions on the dyadic mesh of
/// [0, T] with 2^max_level cells, stored as a pyramid: level l holds the
/// 2^l increments over cells of length T / 2^l, each obtained by adding its
/// two children. Coarse increments are therefore exact sums of fine ones.
class BrownianPath {
 public:
  /// Build from explicit finest-level increments (rows = modes).
  BrownianPath(double horizon, int max_level, std::uint64_t seed, Eigen::MatrixXd fine);

  double horizon() const { return horizon_; }
  int max_level() const { return max_level_; }
  int k_dim() const { return static_cast<int>(levels_.back().rows()); }
  std::uint64_t seed() const { return seed_; }

  /// Increment of mode k over cell j at `level` (0-based mode and cell).
  double increment(int level, int k, long j) const { return levels_.at(level)(k, j); }
  const Eigen::MatrixXd& level(int l) const { return levels_.at(l); }

  /// w_k at the dyadic time j * T / 2^level (prefix sum of that level's increments).
  double value_at(int level, int k, long j) const;

 private:
  double horizon_;
  int max_level_;
  std::uint64_t seed_;
  std::vector<Eigen::MatrixXd> levels_;
};

/// Increments i.i.d. N(0, T / 2^L), keyed by (seed, mode, finest cell index).
BrownianPath sample_path(std::uint64_t seed, double horizon, int max_level, int k_dim);

/// Lagged difference quotient of the path at level lvl.n on cell m = floor(t / sigma):
/// component k < n is (w_k(m sigma) - w_k((m-1) sigma)) / sigma, with w = 0 before 0.
/// Components k >= n are zero, and the whole vector is zero for t > T.
Eigen::VectorXd wz_derivative(const BrownianPath& path, const WZLevel& lvl, double t);
Eigen::VectorXd wz_derivative_cell(const BrownianPath& path, const WZLevel& lvl, long cell);

/// Binary audit dump: "CBFW", u32 version, f64 T, u32 L, u32 k_dim, u64 seed,
/// then k_dim * 2^L little-endian f64 finest increments, mode-major.
void write_path(std::ostream& out, const BrownianPath& path);
BrownianPath read_path(std::istream& in);

}  // namespace cbf
