#pragma once

#include <Eigen/Core>

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cbf/brownian.hpp"
#include "cbf/field.hpp"
#include "cbf/noise.hpp"
#include "cbf/params.hpp"

namespace cbf {

/// Exponential Euler time stepping: the linear part mu A + alpha is integrated
/// exactly per mode, everything else is explicit at the left endpoint.
struct SolverConfig {
  double horizon = 0.5;
  int step_level = 12;     ///< dt = horizon / 2^step_level
  int record_stride = 64;  ///< snapshot every this many steps (the final state is always kept)
  double blowup_threshold = 1e8;

  double dt() const { return std::ldexp(horizon, -step_level); }
  long steps() const { return 1L << step_level; }
  void validate() const;
};

/// Thrown when a trajectory leaves the finite range; carries the step index.
class BlowUp : public std::runtime_error {
 public:
  BlowUp(long step, const std::string& what) : std::runtime_error(what), step_(step) {}
  long step() const { return step_; }

 private:
  long step_;
};

/// Piecewise-constant control k : [0, T] -> R^{k_dim} on 2^mesh_level equal cells.
class ControlSignal {
 public:
  ControlSignal(double horizon, int mesh_level, Eigen::MatrixXd values);

  /// The realized smoothed noise of `path` at level lvl, cell by cell.
  static ControlSignal from_wz(const BrownianPath& path, const WZLevel& lvl);
  static ControlSignal zero(double horizon, int k_dim);

  double horizon() const { return horizon_; }
  int mesh_level() const { return mesh_level_; }
  int k_dim() const { return static_cast<int>(values_.cols()); }
  const Eigen::MatrixXd& values() const { return values_; }
  Eigen::MatrixXd& values() { return values_; }

  Eigen::VectorXd value(double t) const;
  /// ||k||_{L^2(0,T;K)}, stored at construction.
  double l2_norm() const { return l2_norm_; }

 private:
  double horizon_;
  int mesh_level_;
  Eigen::MatrixXd values_;  ///< cells x k_dim
  double l2_norm_ = 0.0;
};

/// Time series of one run: per-step norms and energy terms, plus snapshots.
struct TrajectoryRecord {
  std::vector<double> times;          ///< t_j for j = 0..S
  std::vector<double> norm_h;         ///< ||u_j||_H
  std::vector<double> norm_v;         ///< ||u_j||_V
  std::vector<double> norm_lp;        ///< ||u_j||_{L^{r+1}}
  std::vector<double> dissipation;    ///< mu ||u_j||_V^2 + alpha ||u_j||_H^2 + beta ||u_j||^{r+1}, j = 0..S-1
  std::vector<double> work;           ///< <u_j, g_j> + |g_j|^2 / 2 for the forcing increment g_j, j = 0..S-1
  std::vector<double> energy_residual;
  std::vector<double> snapshot_times;
  std::vector<SpectralField> snapshots;
  double stiffness = 0.0;  ///< dt * mu * max|k|^2
  double dt = 0.0;
  double r = 3.0;
};

enum class System { ito, wong_zakai, skeleton, controlled };

/// One trajectory advanced step by step. Experiments drive several of these
/// in lockstep on a shared path; the integrate_* functions run one to the end.
/// The referenced model, path, and control must outlive the run.
class Run {
 public:
  struct Inputs {
    System system = System::ito;
    const BrownianPath* path = nullptr;   ///< ito, wong_zakai, controlled
    std::optional<WZLevel> level;         ///< wong_zakai, skeleton, controlled
    const ControlSignal* control = nullptr;  ///< skeleton, controlled
    int correction_level = 0;             ///< n in -Tr_n / 2, 0 for none
  };

  Run(const SpectralField& x0, const FluidParams& p, const NoiseModel& model, const SolverConfig& cfg, Inputs in);

  bool done() const { return step_ >= cfg_.steps(); }
  long step_index() const { return step_; }
  double time() const { return double(step_) * dt_; }
  const SpectralField& state() const { return u_; }

  void step();
  void run_to_end();

  /// Finalize diagnostics (energy residual) and hand over the record.
  TrajectoryRecord take_record();

 private:
  void drive_vector(Eigen::VectorXd& z) const;
  void record_norms(double lp_power);

  SpectralField u_;
  FluidParams params_;
  const NoiseModel* model_;
  SolverConfig cfg_;
  Inputs in_;
  double dt_;
  long step_ = 0;
  Eigen::ArrayXXd decay_;
  Eigen::VectorXd drive_;
  TrajectoryRecord rec_;
  bool finished_ = false;
};

TrajectoryRecord integrate_scbf(const SpectralField& x0, const FluidParams& p, const NoiseModel& model,
                                const BrownianPath& path, const SolverConfig& cfg);

TrajectoryRecord integrate_wz(const SpectralField& x0, const FluidParams& p, const NoiseModel& model,
                              const BrownianPath& path, const WZLevel& lvl, const SolverConfig& cfg);

TrajectoryRecord integrate_skeleton(const SpectralField& x0, const FluidParams& p, const NoiseModel& model,
                                    const ControlSignal& ctrl, const WZLevel& lvl, const SolverConfig& cfg);

TrajectoryRecord integrate_controlled(const SpectralField& x0, const FluidParams& p, const NoiseModel& model,
                                      const BrownianPath& path, const ControlSignal& ctrl, const WZLevel& lvl,
                                      const SolverConfig& cfg);

/// Residual of the discrete energy balance per recorded step:
/// |u_j|^2/2 - |x0|^2/2 + sum_{i<j} (dt D_i - W_i).
std::vector<double> energy_residuals(const TrajectoryRecord& rec);

/// Default initial datum: (sin y, sin x) plus a Taylor-Green cell, pointwise O(1).
SpectralField default_initial(const GridSpec& grid);

}  // namespace cbf
