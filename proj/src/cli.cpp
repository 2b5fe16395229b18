#include "cbf/cli.hpp"

#include <cstdlib>
#include <optional>
#include <ostream>

#include "CLI11.hpp"
#include "cbf/config.hpp"
#include "cbf/philox.hpp"
#include "cbf/results_io.hpp"

namespace cbf {

namespace {

struct CommonOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  std::string format;
};

struct SimulateOptions {
  std::string system = "ito";
  std::optional<int> level;
};

std::string resolve_out_dir(const CommonOptions& opts, const RunConfig& cfg) {
  if (!opts.out_dir.empty()) return opts.out_dir;
  if (!cfg.output.dir.empty()) return cfg.output.dir;
  if (const char* env = std::getenv("CBF_OUT_DIR"); env != nullptr && *env != '\0') return env;
  return "results";
}

RunConfig effective_config(const CommonOptions& opts) {
  RunConfig cfg = opts.config_path.empty() ? RunConfig{} : load_config(opts.config_path);
  if (opts.seed) cfg.seed = *opts.seed;
  if (!opts.format.empty()) cfg.output.format = output_format_from_string(opts.format);
  cfg.validate();
  return cfg;
}

// Trend verdict as two reports: the ratio requirement and the inversion rule.
void add_trend_reports(std::vector<InequalityReport>& out, const std::string& prefix, const ConvergenceTable& table) {
  const TrendVerdict v = check_trend(table, 0.2);
  auto ratio = InequalityReport::make(prefix + "_ratio", long(table.rows.size()), 0.2 - v.ratio, 0.0);
  ratio.statistic = v.ratio;
  out.push_back(ratio);
  const bool shape_ok = v.inversions <= 1 && v.inversions_within_ci;
  auto shape = InequalityReport::make(prefix + "_nonincreasing", long(table.rows.size()), shape_ok ? 0.0 : -1.0, 0.0);
  shape.statistic = v.inversions;
  out.push_back(shape);
}

void print_table(std::ostream& out, const std::string& name, const ConvergenceTable& table) {
  out << name << ":\n";
  for (const ConvergenceRow& r : table.rows) {
    out << "  n=" << r.n << " M=" << r.samples << " err=" << format_double(r.err)
        << " ci=" << format_double(r.ci_half_width);
    if (r.failed > 0) out << " failed=" << r.failed;
    out << '\n';
  }
}

int report_outcome(const ResultSet& results, std::ostream& out, std::ostream& err) {
  bool ok = true;
  for (const auto& [file, reports] : results.reports) {
    for (const InequalityReport& r : reports) {
      out << (r.pass ? "PASS " : "FAIL ") << r.name << " worst_margin=" << format_double(r.worst_margin)
          << " tolerance=" << format_double(r.tolerance);
      if (!std::isnan(r.statistic)) out << " statistic=" << format_double(r.statistic);
      out << '\n';
      if (!r.pass) {
        err << "cbf:fail:" << r.name << ": worst margin " << format_double(r.worst_margin) << " below -"
            << format_double(r.tolerance) << '\n';
        ok = false;
      }
    }
  }
  return ok ? kExitPass : kExitFailed;
}

ResultSet cmd_simulate(const RunConfig& cfg, const SimulateOptions& sim) {
  const StudySetup setup = cfg.study_setup();
  const int level = sim.level.value_or(cfg.experiment.levels.back());
  if (level < 1 || level > cfg.solver.step_level || level > setup.model.k_dim()) {
    throw ConfigError("--level: must lie in [1, min(step_level, k_dim)]");
  }
  const WZLevel lvl = WZLevel::make(level, cfg.solver.horizon);
  const BrownianPath path = sample_path(cfg.seed, cfg.solver.horizon, cfg.solver.step_level, setup.model.k_dim());
  const ControlSignal ctrl = cfg.control();
  ResultSet rs;
  TrajectoryRecord rec;
  if (sim.system == "ito") {
    rec = integrate_scbf(setup.x0, setup.params, setup.model, path, setup.solver);
  } else if (sim.system == "wong_zakai") {
    rec = integrate_wz(setup.x0, setup.params, setup.model, path, lvl, setup.solver);
  } else if (sim.system == "skeleton") {
    rec = integrate_skeleton(setup.x0, setup.params, setup.model, ctrl, lvl, setup.solver);
  } else if (sim.system == "controlled") {
    rec = integrate_controlled(setup.x0, setup.params, setup.model, path, ctrl, lvl, setup.solver);
  } else {
    throw ConfigError("--system: expected ito, wong_zakai, skeleton, or controlled");
  }
  rs.trajectories.emplace_back("trajectory_" + sim.system, std::move(rec));
  return rs;
}

ResultSet cmd_converge(const RunConfig& cfg, std::ostream& out) {
  const StudySetup setup = cfg.study_setup();
  ResultSet rs;
  ConvergenceTable table = convergence_study(setup, cfg.experiment.levels, cfg.experiment.samples, cfg.seed);
  print_table(out, "convergence", table);
  std::vector<InequalityReport> reports;
  add_trend_reports(reports, "wong_zakai_trend", table);
  rs.convergence.emplace_back("convergence", std::move(table));
  rs.reports.emplace_back("convergence_checks", std::move(reports));
  return rs;
}

ResultSet cmd_skeleton(const RunConfig& cfg, std::ostream& out) {
  ResultSet rs;
  std::vector<InequalityReport> reports;
  const StudySetup setup = cfg.study_setup();
  const int n = cfg.experiment.levels.back();
  double worst = 0.0;
  for (int s = 0; s < cfg.experiment.skeleton_seeds; ++s) {
    const BrownianPath path = sample_path(derive_seed(cfg.seed, std::uint64_t(s)), cfg.solver.horizon,
                                          cfg.solver.step_level, setup.model.k_dim());
    worst = std::max(worst, skeleton_consistency(setup.params, setup.model, setup.x0, path, n, setup.solver));
  }
  auto identity = InequalityReport::make("skeleton_identity", cfg.experiment.skeleton_seeds, -worst, 0.0);
  identity.statistic = worst;
  reports.push_back(identity);

  ConvergenceTable table =
      skeleton_wz_convergence(setup, cfg.control(), cfg.experiment.levels, cfg.experiment.samples, cfg.seed);
  print_table(out, "skeleton_convergence", table);
  add_trend_reports(reports, "skeleton_trend", table);
  rs.convergence.emplace_back("skeleton_convergence", std::move(table));
  rs.reports.emplace_back("skeleton_checks", std::move(reports));
  return rs;
}

ResultSet cmd_verify(const RunConfig& cfg) {
  ResultSet rs;
  std::vector<InequalityReport> reports =
      identity_suite(cfg.grid, cfg.experiment.identity_triples, cfg.experiment.identity_pairs, cfg.seed);
  for (double r : {3.0, 5.0}) {
    const FluidParams p{1.0, 0.0, 1.0, r, true};
    for (auto& rep : monotonicity_suite(cfg.grid, p, cfg.experiment.monotonicity_trials, cfg.seed)) {
      reports.push_back(std::move(rep));
    }
  }
  const NoiseModel model = cfg.noise_model();
  const HypothesisReport audit = hypothesis_audit(model, 64, cfg.seed);
  reports.push_back(InequalityReport::make("noise_growth", audit.samples, 1.0 - audit.worst_growth, 1e-12));
  reports.push_back(InequalityReport::make("noise_lipschitz", audit.samples, -audit.worst_lipschitz, 1e-12));
  reports.push_back(InequalityReport::make("noise_trace_growth", audit.samples, 1.0 - audit.worst_trace, 1e-12));
  reports.push_back(
      InequalityReport::make("noise_trace_monotone", audit.samples, -audit.worst_trace_monotone, 1e-12));
  rs.reports.emplace_back("verify", std::move(reports));
  return rs;
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Stochastic Brinkman-Forchheimer simulator and verification harness", "cbf"};
  app.require_subcommand(1);
  CommonOptions opts;
  SimulateOptions sim;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opts.config_path, "JSON configuration file");
    sub->add_option("--seed", opts.seed, "master seed (overrides the configuration)");
    sub->add_option("--out", opts.out_dir, "output directory");
    sub->add_option("--format", opts.format, "csv, json, or both")->check(CLI::IsMember({"csv", "json", "both"}));
  };
  CLI::App* simulate = app.add_subcommand("simulate", "integrate one trajectory and write its diagnostics");
  CLI::App* converge = app.add_subcommand("converge", "Wong-Zakai convergence study");
  CLI::App* skeleton = app.add_subcommand("skeleton", "skeleton identity and controlled convergence study");
  CLI::App* verify = app.add_subcommand("verify", "operator identity and monotonicity battery");
  for (CLI::App* sub : {simulate, converge, skeleton, verify}) add_common(sub);
  simulate->add_option("--system", sim.system, "ito, wong_zakai, skeleton, or controlled");
  simulate->add_option("--level", sim.level, "Wong-Zakai level (default: largest configured level)");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(int(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitPass;
  } catch (const CLI::ParseError& e) {
    err << "cbf:error:usage: " << e.what() << '\n';
    return kExitConfig;
  }

  try {
    const RunConfig cfg = effective_config(opts);
    ResultSet rs;
    if (*simulate) {
      rs = cmd_simulate(cfg, sim);
    } else if (*converge) {
      rs = cmd_converge(cfg, out);
    } else if (*skeleton) {
      rs = cmd_skeleton(cfg, out);
    } else {
      rs = cmd_verify(cfg);
    }
    rs.provenance = Provenance{config_hash(cfg), cfg.seed};
    const std::string dir = resolve_out_dir(opts, cfg);
    for (const std::string& path : write_results(rs, dir, cfg.output.format)) out << "wrote " << path << '\n';
    return report_outcome(rs, out, err);
  } catch (const ConfigError& e) {
    err << "cbf:error:config: " << e.what() << '\n';
    return kExitConfig;
  } catch (const BlowUp& e) {
    err << "cbf:fail:blowup: " << e.what() << '\n';
    return kExitFailed;
  } catch (const std::exception& e) {
    err << "cbf:error:runtime: " << e.what() << '\n';
    return kExitFailed;
  }
}

}  // namespace cbf
