#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <string>
#include <vector>

#include "cbf/field.hpp"

namespace cbf {

enum class NoiseFamily { additive, diagonal_linear, affine };

std::string to_string(NoiseFamily f);
NoiseFamily noise_family_from_string(const std::string& name);

/// Growth and trace constants certified from the family algebra.
struct HypothesisConstants {
  double l1 = 0.0;
  double l2 = 0.0;
  double gamma = 0.0;  ///< recorded only
};

/// Diffusion coefficient G with G(u) e_k = G_k(u):
///   additive         G_k(u) = q_k phi_k
///   diagonal_linear  G_k(u) = q_k u
///   affine           G_k(u) = q_k (u + phi_k)
/// where phi_k are fixed unit-norm divergence-free shear modes.
class NoiseModel {
 public:
  static NoiseModel make(NoiseFamily family, const GridSpec& grid, Eigen::VectorXd weights, double gamma = 0.0);

  NoiseFamily family() const { return family_; }
  const GridSpec& grid() const { return grid_; }
  int k_dim() const { return static_cast<int>(weights_.size()); }
  const Eigen::VectorXd& weights() const { return weights_; }
  const SpectralField& shape(int k) const { return shapes_.at(k); }
  const HypothesisConstants& hypothesis() const { return hyp_; }

  bool uses_shapes() const { return family_ != NoiseFamily::diagonal_linear; }
  bool is_silent() const { return (weights_.array() == 0.0).all(); }

  /// sum_{k < n} q_k^2.
  double weight_energy(int n) const;

  /// Lipschitz function rho of the family (constant in u).
  double rho() const { return family_ == NoiseFamily::additive ? 0.0 : weight_energy(k_dim()); }

 private:
  NoiseFamily family_ = NoiseFamily::additive;
  GridSpec grid_;
  Eigen::VectorXd weights_;
  std::vector<SpectralField> shapes_;
  HypothesisConstants hyp_;
};

/// The k-th unit-norm shear mode: conjugate pairs in Galerkin order, cosine then sine.
SpectralField shear_mode(const GridSpec& grid, int index);

/// G_k(u), 0-based k.
SpectralField g_k(const NoiseModel& model, const SpectralField& u, int k);

/// sum_k z_k G_k(u).
SpectralField apply_g(const NoiseModel& model, const SpectralField& u, const Eigen::Ref<const Eigen::VectorXd>& z);

/// DG_k(u) h.
SpectralField dg_apply(const NoiseModel& model, const SpectralField& u, int k, const SpectralField& h);

/// sum_{k < n} DG_k(u) G_k(u).
SpectralField correction_tr(const NoiseModel& model, const SpectralField& u, int n);

/// Same sum assembled term by term from dg_apply and g_k.
SpectralField correction_tr_by_definition(const NoiseModel& model, const SpectralField& u, int n);

/// ||G(u)||^2 in the Hilbert-Schmidt norm.
double hs_norm_sq(const NoiseModel& model, const SpectralField& u);
double hs_distance_sq(const NoiseModel& model, const SpectralField& u, const SpectralField& v);

struct HypothesisReport {
  int samples = 0;
  double worst_growth = 0.0;      ///< max ||G(u)||^2 / (L1 (1 + ||u||^2)), must be <= 1
  double worst_lipschitz = 0.0;   ///< max ||G(u)-G(v)||^2 - rho ||u-v||^2, must be <= tol
  double worst_trace = 0.0;       ///< max ||Tr_n(v)||^2 / (L2 (1 + ||v||^2)), must be <= 1
  double worst_trace_monotone = 0.0;  ///< max (Tr_n(v2)-Tr_n(v1), v1-v2) - rho ||v1-v2||^2
  bool pass = false;
};

HypothesisReport hypothesis_audit(const NoiseModel& model, int sample_count, std::uint64_t seed);

}  // namespace cbf
