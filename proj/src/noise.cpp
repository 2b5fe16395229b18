#include "cbf/noise.hpp"

#include <cmath>
#include <stdexcept>

#include "cbf/operators.hpp"
#include "cbf/philox.hpp"
#include "cbf/random_field.hpp"

namespace cbf {

std::string to_string(NoiseFamily f) {
  switch (f) {
    case NoiseFamily::additive: return "additive";
    case NoiseFamily::diagonal_linear: return "diagonal_linear";
    case NoiseFamily::affine: return "affine";
  }
  return "unknown";
}

NoiseFamily noise_family_from_string(const std::string& name) {
  if (name == "additive") return NoiseFamily::additive;
  if (name == "diagonal_linear") return NoiseFamily::diagonal_linear;
  if (name == "affine") return NoiseFamily::affine;
  throw std::invalid_argument("noise: unknown family '" + name + "'");
}

SpectralField shear_mode(const GridSpec& grid, int index) {
  const auto order = galerkin_order(grid);
  if (index < 0 || index / 2 >= static_cast<int>(order.size())) {
    throw std::invalid_argument("shear_mode: index exceeds the retained modes");
  }
  const ModeKey k = order[index / 2];
  const double kn = std::sqrt(double(k.norm2()));
  const double a = std::sqrt(2.0) / kTwoPi;
  const std::complex<double> phase = index % 2 == 0 ? std::complex<double>(0.5 * a, 0.0)
                                                    : std::complex<double>(0.0, -0.5 * a);
  SpectralField phi(grid);
  phi.set_mode(k.kx, k.ky, phase * (-k.ky / kn), phase * (k.kx / kn));
  return phi;
}

NoiseModel NoiseModel::make(NoiseFamily family, const GridSpec& grid, Eigen::VectorXd weights, double gamma) {
  grid.validate();
  if (weights.size() < 1) throw std::invalid_argument("noise: at least one weight is required");
  if (!weights.allFinite()) throw std::invalid_argument("noise: weights must be finite");
  NoiseModel m;
  m.family_ = family;
  m.grid_ = grid;
  m.weights_ = std::move(weights);
  if (m.uses_shapes()) {
    for (int k = 0; k < m.k_dim(); ++k) m.shapes_.push_back(shear_mode(grid, k));
  }
  const double s = m.weight_energy(m.k_dim());
  m.hyp_.l1 = 2.0 * std::max(1.0, s);
  m.hyp_.l2 = 2.0 * std::max(1.0, s) * std::max(1.0, s);
  m.hyp_.gamma = gamma;
  return m;
}

double NoiseModel::weight_energy(int n) const {
  if (n < 0 || n > k_dim()) throw std::invalid_argument("noise: level out of range");
  return weights_.head(n).squaredNorm();
}

namespace {

void check_index(const NoiseModel& model, int k) {
  if (k < 0 || k >= model.k_dim()) throw std::invalid_argument("noise: mode index out of range");
}

}  // namespace

SpectralField g_k(const NoiseModel& model, const SpectralField& u, int k) {
  check_index(model, k);
  require_same_grid(model.grid(), u.grid(), "g_k");
  const double q = model.weights()(k);
  switch (model.family()) {
    case NoiseFamily::additive: return q * model.shape(k);
    case NoiseFamily::diagonal_linear: return q * u;
    case NoiseFamily::affine: return q * (u + model.shape(k));
  }
  return SpectralField(u.grid());
}

SpectralField apply_g(const NoiseModel& model, const SpectralField& u, const Eigen::Ref<const Eigen::VectorXd>& z) {
  if (z.size() != model.k_dim()) throw std::invalid_argument("apply_g: drive dimension does not match k_dim");
  require_same_grid(model.grid(), u.grid(), "apply_g");
  SpectralField out(u.grid());
  if (model.family() != NoiseFamily::additive) {
    out.add_scaled(z.dot(model.weights()), u);
  }
  if (model.uses_shapes()) {
    for (int k = 0; k < model.k_dim(); ++k) {
      const double c = z(k) * model.weights()(k);
      if (c != 0.0) out.add_scaled(c, model.shape(k));
    }
  }
  return out;
}

SpectralField dg_apply(const NoiseModel& model, const SpectralField&, int k, const SpectralField& h) {
  check_index(model, k);
  require_same_grid(model.grid(), h.grid(), "dg_apply");
  if (model.family() == NoiseFamily::additive) return SpectralField(h.grid());
  return model.weights()(k) * h;
}

SpectralField correction_tr(const NoiseModel& model, const SpectralField& u, int n) {
  if (n < 1 || n > model.k_dim()) throw std::invalid_argument("correction_tr: level out of range");
  require_same_grid(model.grid(), u.grid(), "correction_tr");
  SpectralField out(u.grid());
  switch (model.family()) {
    case NoiseFamily::additive: break;
    case NoiseFamily::diagonal_linear: out.add_scaled(model.weight_energy(n), u); break;
    case NoiseFamily::affine:
      out.add_scaled(model.weight_energy(n), u);
      for (int k = 0; k < n; ++k) {
        const double q = model.weights()(k);
        out.add_scaled(q * q, model.shape(k));
      }
      break;
  }
  return out;
}

SpectralField correction_tr_by_definition(const NoiseModel& model, const SpectralField& u, int n) {
  if (n < 1 || n > model.k_dim()) throw std::invalid_argument("correction_tr: level out of range");
  SpectralField out(u.grid());
  for (int k = 0; k < n; ++k) out += dg_apply(model, u, k, g_k(model, u, k));
  return out;
}

double hs_norm_sq(const NoiseModel& model, const SpectralField& u) {
  double s = 0.0;
  for (int k = 0; k < model.k_dim(); ++k) {
    const SpectralField gk = g_k(model, u, k);
    s += inner(gk, gk);
  }
  return s;
}

double hs_distance_sq(const NoiseModel& model, const SpectralField& u, const SpectralField& v) {
  double s = 0.0;
  for (int k = 0; k < model.k_dim(); ++k) {
    const SpectralField d = g_k(model, u, k) - g_k(model, v, k);
    s += inner(d, d);
  }
  return s;
}

HypothesisReport hypothesis_audit(const NoiseModel& model, int sample_count, std::uint64_t seed) {
  HypothesisReport rep;
  rep.samples = sample_count;
  const HypothesisConstants& c = model.hypothesis();
  const double rho = model.rho();
  NormalStream rng(seed, 0xA0D17ull);
  const GridSpec& g = model.grid();
  for (int i = 0; i < sample_count; ++i) {
    const SpectralField u = random_field_with_norm(g, rng, log_uniform(rng, 0.1, 10.0));
    const SpectralField v = random_field_with_norm(g, rng, log_uniform(rng, 0.1, 10.0));
    const double hu = inner(u, u);
    const double hv = inner(v, v);
    const SpectralField d = u - v;
    const double dd = inner(d, d);

    rep.worst_growth = std::max(rep.worst_growth, hs_norm_sq(model, u) / (c.l1 * (1.0 + hu)));
    rep.worst_lipschitz = std::max(rep.worst_lipschitz, (hs_distance_sq(model, u, v) - rho * dd) / (1.0 + rho * dd));

    const int n = 1 + i % model.k_dim();
    const SpectralField tu = correction_tr(model, u, n);
    const SpectralField tv = correction_tr(model, v, n);
    rep.worst_trace = std::max(rep.worst_trace, inner(tv, tv) / (c.l2 * (1.0 + hv)));
    // (Tr(v2) - Tr(v1), v1 - v2) with v1 = u, v2 = v
    const double mono = inner(tv - tu, d) - rho * dd;
    rep.worst_trace_monotone = std::max(rep.worst_trace_monotone, mono / (1.0 + rho * dd));
  }
  constexpr double kTol = 1e-12;
  rep.pass = rep.worst_growth <= 1.0 + kTol && rep.worst_lipschitz <= kTol && rep.worst_trace <= 1.0 + kTol &&
             rep.worst_trace_monotone <= kTol;
  return rep;
}

}  // namespace cbf
