#include "cbf/random_field.hpp"

#include <cmath>

#include "cbf/operators.hpp"

namespace cbf {

SpectralField random_field(const GridSpec& grid, NormalStream& rng, double decay) {
  grid.validate();
  SpectralField u(grid);
  for (const ModeKey& k : galerkin_order(grid)) {
    const double amp = std::pow(double(k.norm2()), -0.5 * decay);
    const double a = rng.next(), b = rng.next(), c = rng.next(), d = rng.next();
    u.set_mode(k.kx, k.ky, amp * std::complex<double>(a, b), amp * std::complex<double>(c, d));
  }
  return leray_project(u);
}

SpectralField random_field_with_norm(const GridSpec& grid, NormalStream& rng, double h_norm, double decay) {
  SpectralField u = random_field(grid, rng, decay);
  const double h = norm_h(u);
  if (h > 0.0) u *= h_norm / h;
  return u;
}

double log_uniform(NormalStream& rng, double lo, double hi) {
  return lo * std::exp(rng.uniform() * std::log(hi / lo));
}

}  // namespace cbf
