#include "cbf/results_io.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace cbf {

using nlohmann::ordered_json;

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

void provenance_lines(std::ostringstream& out, const Provenance& prov) {
  out << "# schema_version=" << kSchemaVersion << "\n";
  out << "# config_hash=" << prov.config_hash << "\n";
  out << "# master_seed=" << prov.master_seed << "\n";
}

ordered_json header(const char* kind, const Provenance& prov) {
  ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = kind;
  j["config_hash"] = prov.config_hash;
  j["master_seed"] = prov.master_seed;
  return j;
}

// JSON has no NaN; such values are written as null and read back as NaN.
ordered_json number(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); }

double read_number(const ordered_json& v) {
  return v.is_null() ? std::numeric_limits<double>::quiet_NaN() : v.get<double>();
}

ordered_json parse_kind(const std::string& text, const char* kind, Provenance* prov) {
  ordered_json j = ordered_json::parse(text);
  if (j.at("schema_version").get<int>() != kSchemaVersion) throw std::runtime_error("results: unsupported schema version");
  if (j.at("kind").get<std::string>() != kind) throw std::runtime_error(std::string("results: expected kind ") + kind);
  if (prov) {
    prov->config_hash = j.at("config_hash").get<std::string>();
    prov->master_seed = j.at("master_seed").get<std::uint64_t>();
  }
  return j;
}

}  // namespace

std::string convergence_csv(const ConvergenceTable& table, const Provenance& prov) {
  std::ostringstream out;
  provenance_lines(out, prov);
  out << "n,M,err,ci\n";
  for (const ConvergenceRow& r : table.rows) {
    out << r.n << ',' << r.samples << ',' << format_double(r.err) << ',' << format_double(r.ci_half_width) << '\n';
  }
  return out.str();
}

std::string reports_csv(const std::vector<InequalityReport>& reports, const Provenance& prov) {
  std::ostringstream out;
  provenance_lines(out, prov);
  out << "name,trials,worst_margin,tolerance,pass,statistic\n";
  for (const InequalityReport& r : reports) {
    out << r.name << ',' << r.trials << ',' << format_double(r.worst_margin) << ',' << format_double(r.tolerance)
        << ',' << (r.pass ? "true" : "false") << ',' << format_double(r.statistic) << '\n';
  }
  return out.str();
}

std::string trajectory_csv(const TrajectoryRecord& rec, const Provenance& prov) {
  std::ostringstream out;
  provenance_lines(out, prov);
  out << "t,norm_h,norm_v,norm_lp,energy_residual\n";
  for (std::size_t j = 0; j < rec.times.size(); ++j) {
    const double res = j < rec.energy_residual.size() ? rec.energy_residual[j] : std::nan("");
    out << format_double(rec.times[j]) << ',' << format_double(rec.norm_h[j]) << ',' << format_double(rec.norm_v[j])
        << ',' << format_double(rec.norm_lp[j]) << ',' << format_double(res) << '\n';
  }
  return out.str();
}

std::string convergence_json(const ConvergenceTable& table, const Provenance& prov) {
  ordered_json j = header("convergence", prov);
  j["rows"] = ordered_json::array();
  for (const ConvergenceRow& r : table.rows) {
    j["rows"].push_back(
        {{"n", r.n}, {"M", r.samples}, {"err", number(r.err)}, {"ci", number(r.ci_half_width)}, {"failed", r.failed}});
  }
  return j.dump(2) + "\n";
}

std::string reports_json(const std::vector<InequalityReport>& reports, const Provenance& prov) {
  ordered_json j = header("reports", prov);
  j["reports"] = ordered_json::array();
  for (const InequalityReport& r : reports) {
    j["reports"].push_back({{"name", r.name},
                            {"trials", r.trials},
                            {"worst_margin", number(r.worst_margin)},
                            {"tolerance", number(r.tolerance)},
                            {"pass", r.pass},
                            {"statistic", number(r.statistic)}});
  }
  return j.dump(2) + "\n";
}

std::string trajectory_json(const TrajectoryRecord& rec, const Provenance& prov) {
  ordered_json j = header("trajectory", prov);
  j["dt"] = rec.dt;
  j["r"] = rec.r;
  j["stiffness"] = rec.stiffness;
  auto series = [](const std::vector<double>& v) {
    ordered_json a = ordered_json::array();
    for (double x : v) a.push_back(number(x));
    return a;
  };
  j["t"] = series(rec.times);
  j["norm_h"] = series(rec.norm_h);
  j["norm_v"] = series(rec.norm_v);
  j["norm_lp"] = series(rec.norm_lp);
  j["energy_residual"] = series(rec.energy_residual);
  return j.dump(2) + "\n";
}

ConvergenceTable read_convergence_json(const std::string& text, Provenance* prov) {
  const ordered_json j = parse_kind(text, "convergence", prov);
  ConvergenceTable table;
  for (const auto& r : j.at("rows")) {
    ConvergenceRow row;
    row.n = r.at("n").get<int>();
    row.samples = r.at("M").get<int>();
    row.err = read_number(r.at("err"));
    row.ci_half_width = read_number(r.at("ci"));
    row.failed = r.at("failed").get<int>();
    table.rows.push_back(row);
  }
  return table;
}

std::vector<InequalityReport> read_reports_json(const std::string& text, Provenance* prov) {
  const ordered_json j = parse_kind(text, "reports", prov);
  std::vector<InequalityReport> out;
  for (const auto& r : j.at("reports")) {
    InequalityReport rep;
    rep.name = r.at("name").get<std::string>();
    rep.trials = r.at("trials").get<long>();
    rep.worst_margin = read_number(r.at("worst_margin"));
    rep.tolerance = read_number(r.at("tolerance"));
    rep.pass = r.at("pass").get<bool>();
    rep.statistic = read_number(r.at("statistic"));
    out.push_back(rep);
  }
  return out;
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& text, std::vector<std::string>& written) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("results: cannot open '" + path.string() + "' for writing");
  out << text;
  out.close();
  if (!out) throw std::runtime_error("results: write to '" + path.string() + "' failed");
  written.push_back(path.string());
}

}  // namespace

std::vector<std::string> write_results(const ResultSet& results, const std::string& dir, OutputFormat format) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("results: cannot create directory '" + dir + "': " + ec.message());
  const bool csv = format != OutputFormat::json;
  const bool js = format != OutputFormat::csv;
  const fs::path base(dir);
  const Provenance& prov = results.provenance;
  std::vector<std::string> written;
  for (const auto& [name, table] : results.convergence) {
    if (csv) write_file(base / (name + ".csv"), convergence_csv(table, prov), written);
    if (js) write_file(base / (name + ".json"), convergence_json(table, prov), written);
  }
  for (const auto& [name, reports] : results.reports) {
    if (csv) write_file(base / (name + ".csv"), reports_csv(reports, prov), written);
    if (js) write_file(base / (name + ".json"), reports_json(reports, prov), written);
  }
  for (const auto& [name, rec] : results.trajectories) {
    if (csv) write_file(base / (name + ".csv"), trajectory_csv(rec, prov), written);
    if (js) write_file(base / (name + ".json"), trajectory_json(rec, prov), written);
  }
  return written;
}

}  // namespace cbf
