#include "cbf/integrator.hpp"

#include <algorithm>
#include <cmath>

#include "cbf/operators.hpp"

namespace cbf {

void SolverConfig::validate() const {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw std::invalid_argument("solver: horizon must be positive");
  if (step_level < 1 || step_level > 30) throw std::invalid_argument("solver: step level must lie in [1, 30]");
  if (record_stride < 1) throw std::invalid_argument("solver: record stride must be >= 1");
}

ControlSignal::ControlSignal(double horizon, int mesh_level, Eigen::MatrixXd values)
    : horizon_(horizon), mesh_level_(mesh_level), values_(std::move(values)) {
  if (!(horizon > 0.0)) throw std::invalid_argument("control: horizon must be positive");
  if (mesh_level < 0 || mesh_level > 30) throw std::invalid_argument("control: mesh level must lie in [0, 30]");
  if (values_.rows() != (Eigen::Index(1) << mesh_level) || values_.cols() < 1) {
    throw std::invalid_argument("control: values must have 2^mesh_level rows and k_dim columns");
  }
  if (!values_.allFinite()) throw std::invalid_argument("control: values must be finite");
  l2_norm_ = std::sqrt(std::ldexp(horizon, -mesh_level) * values_.squaredNorm());
}

ControlSignal ControlSignal::from_wz(const BrownianPath& path, const WZLevel& lvl) {
  const long cells = 1L << lvl.n;
  Eigen::MatrixXd values(cells, path.k_dim());
  for (long m = 0; m < cells; ++m) values.row(m) = wz_derivative_cell(path, lvl, m).transpose();
  return ControlSignal(path.horizon(), lvl.n, std::move(values));
}

ControlSignal ControlSignal::zero(double horizon, int k_dim) {
  return ControlSignal(horizon, 0, Eigen::MatrixXd::Zero(1, k_dim));
}

Eigen::VectorXd ControlSignal::value(double t) const {
  const long cells = values_.rows();
  long m = static_cast<long>(std::floor(t / std::ldexp(horizon_, -mesh_level_)));
  m = std::clamp(m, 0L, cells - 1);
  return values_.row(m).transpose();
}

Run::Run(const SpectralField& x0, const FluidParams& p, const NoiseModel& model, const SolverConfig& cfg, Inputs in)
    : u_(x0), params_(p), model_(&model), cfg_(cfg), in_(in), dt_(cfg.dt()) {
  cfg_.validate();
  require_same_grid(x0.grid(), model.grid(), "integrator initial datum");
  const bool needs_path = in_.system != System::skeleton;
  const bool needs_level = in_.system != System::ito;
  const bool needs_control = in_.system == System::skeleton || in_.system == System::controlled;
  if (needs_path) {
    if (in_.path == nullptr) throw std::invalid_argument("integrator: this system needs a Brownian path");
    if (in_.path->horizon() != cfg_.horizon) throw GridMismatch("integrator: path horizon differs from solver horizon");
    if (in_.path->max_level() < cfg_.step_level) {
      throw GridMismatch("integrator: path is coarser than the time step");
    }
    if (in_.path->k_dim() != model.k_dim()) throw GridMismatch("integrator: path and noise model k_dim differ");
  }
  if (needs_level) {
    if (!in_.level) throw std::invalid_argument("integrator: this system needs a Wong-Zakai level");
    if (in_.level->n > cfg_.step_level) {
      throw std::invalid_argument("integrator: time step does not divide sigma = T / 2^n");
    }
    if (needs_path && in_.level->n > in_.path->max_level()) {
      throw std::invalid_argument("integrator: level exceeds path resolution");
    }
    if (in_.level->n > model.k_dim()) throw std::invalid_argument("integrator: level exceeds noise dimension");
  }
  if (needs_control) {
    if (in_.control == nullptr) throw std::invalid_argument("integrator: this system needs a control signal");
    if (in_.control->k_dim() != model.k_dim()) throw GridMismatch("integrator: control and noise k_dim differ");
    if (in_.control->mesh_level() > cfg_.step_level) {
      throw std::invalid_argument("integrator: control mesh is finer than the time step");
    }
    if (in_.control->horizon() != cfg_.horizon) throw GridMismatch("integrator: control horizon differs");
  }
  if (in_.correction_level < 0 || in_.correction_level > model.k_dim()) {
    throw std::invalid_argument("integrator: correction level out of range");
  }

  const GridSpec& g = x0.grid();
  const int n = g.n;
  decay_.resize(n, n);
  for (int q = 0; q < n; ++q) {
    for (int pi = 0; pi < n; ++pi) {
      const double k2 = double(wavenumber(pi, n)) * wavenumber(pi, n) + double(wavenumber(q, n)) * wavenumber(q, n);
      decay_(pi, q) = std::exp(-(p.mu * k2 + p.alpha) * dt_);
    }
  }
  drive_.resize(model.k_dim());

  const long steps = cfg_.steps();
  rec_.times.reserve(steps + 1);
  rec_.norm_h.reserve(steps + 1);
  rec_.norm_v.reserve(steps + 1);
  rec_.norm_lp.reserve(steps + 1);
  rec_.dissipation.reserve(steps);
  rec_.work.reserve(steps);
  rec_.dt = dt_;
  rec_.r = p.r;
  const double kmax = g.cutoff();
  rec_.stiffness = dt_ * p.mu * 2.0 * kmax * kmax;
  rec_.snapshot_times.push_back(0.0);
  rec_.snapshots.push_back(u_);
}

void Run::drive_vector(Eigen::VectorXd& z) const {
  const int kd = model_->k_dim();
  const int step_level = cfg_.step_level;
  auto smoothed = [&](int k) {
    const int n = in_.level->n;
    const long cell = step_ >> (step_level - n);
    if (k >= n || cell == 0) return 0.0;
    return in_.path->increment(n, k, cell - 1) / in_.level->sigma;
  };
  auto control = [&](int k) {
    const long cell = step_ >> (step_level - in_.control->mesh_level());
    return in_.control->values()(cell, k);
  };
  for (int k = 0; k < kd; ++k) {
    switch (in_.system) {
      case System::ito: z(k) = in_.path->increment(step_level, k, step_); break;
      case System::wong_zakai: z(k) = dt_ * smoothed(k); break;
      case System::skeleton: z(k) = dt_ * control(k); break;
      case System::controlled:
        z(k) = (in_.path->increment(step_level, k, step_) - dt_ * smoothed(k)) + dt_ * control(k);
        break;
    }
  }
}

void Run::record_norms(double lp_power) {
  const double h = norm_h(u_);
  if (!std::isfinite(h) || h > cfg_.blowup_threshold) {
    throw BlowUp(step_, "integrator: blow-up detected at step " + std::to_string(step_));
  }
  const double v = norm_v(u_);
  rec_.times.push_back(time());
  rec_.norm_h.push_back(h);
  rec_.norm_v.push_back(v);
  rec_.norm_lp.push_back(std::pow(lp_power, 1.0 / (params_.r + 1.0)));
}

void Run::step() {
  if (done()) return;
  const Nonlinear nl = nonlinear_terms(u_, params_);
  record_norms(nl.lp_power);
  const double h = rec_.norm_h.back();
  const double v = rec_.norm_v.back();
  rec_.dissipation.push_back(params_.mu * v * v + params_.alpha * h * h + params_.beta * nl.lp_power);

  drive_vector(drive_);
  SpectralField forcing = apply_g(*model_, u_, drive_);
  if (in_.correction_level > 0) forcing.add_scaled(-0.5 * dt_, correction_tr(*model_, u_, in_.correction_level));
  rec_.work.push_back(inner(u_, forcing) + 0.5 * inner(forcing, forcing));

  u_.add_scaled(-dt_, nl.value);
  u_ += forcing;
  u_.x() *= decay_;
  u_.y() *= decay_;
  ++step_;

  if (step_ % cfg_.record_stride == 0 || done()) {
    rec_.snapshot_times.push_back(time());
    rec_.snapshots.push_back(u_);
  }
}

void Run::run_to_end() {
  while (!done()) step();
}

TrajectoryRecord Run::take_record() {
  if (!finished_) {
    record_norms(lp_power(u_, params_.r + 1.0));
    rec_.energy_residual = energy_residuals(rec_);
    finished_ = true;
  }
  return std::move(rec_);
}

std::vector<double> energy_residuals(const TrajectoryRecord& rec) {
  std::vector<double> out;
  if (rec.norm_h.empty()) return out;
  out.reserve(rec.norm_h.size());
  const double e0 = 0.5 * rec.norm_h[0] * rec.norm_h[0];
  double budget = 0.0;
  for (std::size_t j = 0; j < rec.norm_h.size(); ++j) {
    out.push_back(0.5 * rec.norm_h[j] * rec.norm_h[j] - e0 + budget);
    if (j < rec.dissipation.size()) budget += rec.dt * rec.dissipation[j] - rec.work[j];
  }
  return out;
}

namespace {

TrajectoryRecord run_system(const SpectralField& x0, const FluidParams& p, const NoiseModel& model,
                            const SolverConfig& cfg, const Run::Inputs& in) {
  Run run(x0, p, model, cfg, in);
  run.run_to_end();
  return run.take_record();
}

}  // namespace

TrajectoryRecord integrate_scbf(const SpectralField& x0, const FluidParams& p, const NoiseModel& model,
                                const BrownianPath& path, const SolverConfig& cfg) {
  return run_system(x0, p, model, cfg, {System::ito, &path, std::nullopt, nullptr, 0});
}

TrajectoryRecord integrate_wz(const SpectralField& x0, const FluidParams& p, const NoiseModel& model,
                              const BrownianPath& path, const WZLevel& lvl, const SolverConfig& cfg) {
  return run_system(x0, p, model, cfg, {System::wong_zakai, &path, lvl, nullptr, lvl.n});
}

TrajectoryRecord integrate_skeleton(const SpectralField& x0, const FluidParams& p, const NoiseModel& model,
                                    const ControlSignal& ctrl, const WZLevel& lvl, const SolverConfig& cfg) {
  return run_system(x0, p, model, cfg, {System::skeleton, nullptr, lvl, &ctrl, lvl.n});
}

TrajectoryRecord integrate_controlled(const SpectralField& x0, const FluidParams& p, const NoiseModel& model,
                                      const BrownianPath& path, const ControlSignal& ctrl, const WZLevel& lvl,
                                      const SolverConfig& cfg) {
  return run_system(x0, p, model, cfg, {System::controlled, &path, lvl, &ctrl, 0});
}

SpectralField default_initial(const GridSpec& grid) {
  grid.validate();
  PhysicalField f(grid);
  const int n = grid.n;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const double x = kTwoPi * i / n;
      const double y = kTwoPi * j / n;
      f.x(i, j) = std::sin(y) + std::sin(x) * std::cos(y);
      f.y(i, j) = std::sin(x) - std::cos(x) * std::sin(y);
    }
  }
  return leray_project(to_spectral(f));
}

}  // namespace cbf
