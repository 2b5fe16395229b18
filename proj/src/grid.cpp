#include "cbf/grid.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

namespace cbf {

int GridSpec::cutoff() const {
  const double bound = dealias * n / 2.0;
  int k = static_cast<int>(std::ceil(bound)) - 1;
  return std::clamp(k, 0, n / 2 - 1);
}

int GridSpec::retained_pairs() const {
  const int side = 2 * cutoff() + 1;
  return (side * side - 1) / 2;
}

int GridSpec::quadrature_size(double degree) const {
  const double rounded = std::round(degree);
  if (degree >= 2.0 && rounded == degree && static_cast<long>(rounded) % 2 == 0) {
    return n * static_cast<int>(rounded / 2);
  }
  return n;
}

void GridSpec::validate() const {
  if (n < 4 || n % 2 != 0) {
    throw std::invalid_argument("grid: modes_per_axis must be even and >= 4, got " + std::to_string(n));
  }
  if (!(dealias > 0.0 && dealias <= 1.0)) {
    throw std::invalid_argument("grid: dealias fraction must lie in (0, 1]");
  }
  if (cutoff() < 1) {
    throw std::invalid_argument("grid: dealiasing leaves no retained modes");
  }
}

std::vector<ModeKey> galerkin_order(const GridSpec& grid) {
  const int kmax = grid.cutoff();
  std::vector<ModeKey> keys;
  keys.reserve(grid.retained_pairs());
  for (int kx = 0; kx <= kmax; ++kx) {
    for (int ky = -kmax; ky <= kmax; ++ky) {
      if (kx == 0 && ky <= 0) continue;
      keys.push_back({kx, ky});
    }
  }
  std::sort(keys.begin(), keys.end(), [](const ModeKey& a, const ModeKey& b) {
    return std::tuple(a.norm2(), a.kx, a.ky) < std::tuple(b.norm2(), b.kx, b.ky);
  });
  return keys;
}

void require_same_grid(const GridSpec& a, const GridSpec& b, const char* what) {
  if (!(a == b)) {
    throw GridMismatch(std::string(what) + ": operands live on different grids (N=" + std::to_string(a.n) +
                       " vs N=" + std::to_string(b.n) + ")");
  }
}

}  // namespace cbf
