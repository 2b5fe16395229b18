#pragma once

#include "cbf/field.hpp"
#include "cbf/philox.hpp"

namespace cbf {

/// Gaussian coefficients with |k|^{-decay} amplitude on every retained pair,
/// Leray-projected.
SpectralField random_field(const GridSpec& grid, NormalStream& rng, double decay = 2.0);

/// Same, rescaled to the requested H norm.
SpectralField random_field_with_norm(const GridSpec& grid, NormalStream& rng, double h_norm, double decay = 2.0);

/// Log-uniform draw in [lo, hi].
double log_uniform(NormalStream& rng, double lo, double hi);

}  // namespace cbf
