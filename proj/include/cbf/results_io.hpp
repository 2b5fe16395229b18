#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "cbf/config.hpp"
#include "cbf/experiments.hpp"

namespace cbf {

inline constexpr int kSchemaVersion = 1;

struct Provenance {
  std::string config_hash;
  std::uint64_t master_seed = 0;
};

/// Named tables produced by one command. Each entry becomes one file per format.
struct ResultSet {
  Provenance provenance;
  std::vector<std::pair<std::string, ConvergenceTable>> convergence;
  std::vector<std::pair<std::string, std::vector<InequalityReport>>> reports;
  std::vector<std::pair<std::string, TrajectoryRecord>> trajectories;
};

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

std::string convergence_csv(const ConvergenceTable& table, const Provenance& prov);
std::string reports_csv(const std::vector<InequalityReport>& reports, const Provenance& prov);
std::string trajectory_csv(const TrajectoryRecord& rec, const Provenance& prov);

std::string convergence_json(const ConvergenceTable& table, const Provenance& prov);
std::string reports_json(const std::vector<InequalityReport>& reports, const Provenance& prov);
std::string trajectory_json(const TrajectoryRecord& rec, const Provenance& prov);

ConvergenceTable read_convergence_json(const std::string& text, Provenance* prov = nullptr);
std::vector<InequalityReport> read_reports_json(const std::string& text, Provenance* prov = nullptr);

/// Write every table of `results` into `dir` (created if missing) as
/// <name>.csv and/or <name>.json; returns the paths in write order.
std::vector<std::string> write_results(const ResultSet& results, const std::string& dir, OutputFormat format);

}  // namespace cbf
