#include "cbf/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace cbf {

using nlohmann::json;

std::string to_string(OutputFormat f) {
  switch (f) {
    case OutputFormat::csv: return "csv";
    case OutputFormat::json: return "json";
    case OutputFormat::both: return "both";
  }
  return "both";
}

OutputFormat output_format_from_string(const std::string& name) {
  if (name == "csv") return OutputFormat::csv;
  if (name == "json") return OutputFormat::json;
  if (name == "both") return OutputFormat::both;
  throw ConfigError("output.format: expected csv, json, or both, got '" + name + "'");
}

namespace {

// Reads typed members of one JSON object and rejects keys nobody asked for.
class Section {
 public:
  Section(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) throw ConfigError(path_ + ": expected an object");
  }

  bool has(const char* key) const { return node_.contains(key); }

  template <class T>
  void read(const char* key, T& out) {
    seen_.insert(key);
    if (!node_.contains(key)) return;
    const json& v = node_.at(key);
    try {
      if constexpr (std::is_same_v<T, bool>) {
        if (!v.is_boolean()) throw ConfigError(where(key) + ": expected a boolean");
      } else if constexpr (std::is_integral_v<T>) {
        if (!v.is_number_integer()) throw ConfigError(where(key) + ": expected an integer");
        if constexpr (std::is_unsigned_v<T>) {
          if (v.is_number_integer() && !v.is_number_unsigned()) {
            throw ConfigError(where(key) + ": expected a non-negative integer");
          }
        }
      } else if constexpr (std::is_floating_point_v<T>) {
        if (!v.is_number()) throw ConfigError(where(key) + ": expected a number");
      } else if constexpr (std::is_same_v<T, std::string>) {
        if (!v.is_string()) throw ConfigError(where(key) + ": expected a string");
      }
      out = v.get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(where(key) + ": " + e.what());
    }
  }

  Section child(const char* key) {
    seen_.insert(key);
    static const json empty = json::object();
    return Section(node_.contains(key) ? node_.at(key) : empty, where(key));
  }

  void finish() const {
    for (const auto& [key, value] : node_.items()) {
      if (!seen_.count(key)) throw ConfigError(where(key.c_str()) + ": unknown key");
    }
  }

  std::string where(const char* key) const { return path_.empty() ? std::string(key) : path_ + "." + key; }

 private:
  const json& node_;
  std::string path_;
  std::set<std::string> seen_;
};

void constraint(bool ok, const std::string& name, const std::string& message) {
  if (!ok) throw ConfigError("constraint " + name + ": " + message);
}

}  // namespace

void RunConfig::validate() const {
  try {
    params.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  constraint(grid.n >= 4 && grid.n % 2 == 0, "grid_size", "grid.n must be an even integer >= 4");
  constraint(grid.dealias > 0.0 && grid.dealias <= 1.0, "dealias_fraction", "grid.dealias must lie in (0, 1]");
  constraint(grid.cutoff() >= 1, "retained_modes", "grid.n and grid.dealias leave no retained mode");
  constraint(!noise.weights.empty(), "noise_dimension", "noise.weights must not be empty");
  for (double q : noise.weights) constraint(std::isfinite(q), "noise_weights", "noise.weights must be finite");
  if (noise.family != NoiseFamily::diagonal_linear) {
    constraint(int(noise.weights.size()) <= 2 * grid.retained_pairs(), "noise_dimension",
               "more noise modes than shear modes on the grid");
  }
  constraint(noise.gamma >= 0.0, "noise_gamma", "noise.gamma must be non-negative");

  constraint(solver.horizon > 0.0 && std::isfinite(solver.horizon), "horizon", "solver.T must be positive");
  const double scaled = std::ldexp(solver.horizon, 20);
  constraint(scaled == std::floor(scaled) && scaled < 9.0e15, "horizon_dyadic",
             "solver.T must be a dyadic rational m / 2^p with p <= 20");
  constraint(solver.step_level >= 1 && solver.step_level <= 24, "step_level", "solver.step_level must lie in [1, 24]");
  constraint(solver.record_stride >= 1, "record_stride", "solver.record_stride must be >= 1");
  constraint(solver.blowup_threshold > 0.0, "blowup_threshold", "solver.blowup_threshold must be positive");

  constraint(!experiment.levels.empty(), "levels", "experiment.levels must not be empty");
  for (std::size_t i = 0; i < experiment.levels.size(); ++i) {
    const int n = experiment.levels[i];
    constraint(n >= 1, "levels", "experiment.levels entries must be >= 1");
    constraint(i == 0 || n > experiment.levels[i - 1], "levels", "experiment.levels must be strictly increasing");
    constraint(n <= solver.step_level, "step_divides_sigma",
               "dt = T / 2^" + std::to_string(solver.step_level) + " does not divide sigma = T / 2^" +
                   std::to_string(n) + "; raise solver.step_level or lower experiment.levels");
    constraint(n <= int(noise.weights.size()), "level_within_noise_dimension",
               "experiment.levels entry " + std::to_string(n) + " exceeds the number of noise weights");
  }
  constraint(experiment.samples >= 1, "samples", "experiment.samples must be >= 1");
  constraint(experiment.threads >= 1, "threads", "experiment.threads must be >= 1");
  constraint(experiment.skeleton_seeds >= 1, "skeleton_seeds", "experiment.skeleton_seeds must be >= 1");
  constraint(experiment.monotonicity_trials >= 1 && experiment.identity_triples >= 1 && experiment.identity_pairs >= 1,
             "trials", "trial counts must be >= 1");
  constraint(experiment.control.mesh_level >= 0 && experiment.control.mesh_level <= solver.step_level,
             "control_mesh", "experiment.control.mesh_level must lie in [0, solver.step_level]");
  constraint(experiment.control.l2_norm >= 0.0 && std::isfinite(experiment.control.l2_norm), "control_norm",
             "experiment.control.l2_norm must be finite and non-negative");
}

NoiseModel RunConfig::noise_model() const {
  Eigen::VectorXd q = Eigen::Map<const Eigen::VectorXd>(noise.weights.data(), Eigen::Index(noise.weights.size()));
  return NoiseModel::make(noise.family, grid, q, noise.gamma);
}

StudySetup RunConfig::study_setup() const {
  return StudySetup{params, noise_model(), solver, default_initial(grid), experiment.threads};
}

ControlSignal RunConfig::control() const {
  return make_control(experiment.control, solver.horizon, int(noise.weights.size()));
}

bool operator==(const RunConfig& a, const RunConfig& b) {
  const auto pa = std::tie(a.params.mu, a.params.alpha, a.params.beta, a.params.r, a.params.convection);
  const auto pb = std::tie(b.params.mu, b.params.alpha, b.params.beta, b.params.r, b.params.convection);
  const auto sa = std::tie(a.solver.horizon, a.solver.step_level, a.solver.record_stride, a.solver.blowup_threshold);
  const auto sb = std::tie(b.solver.horizon, b.solver.step_level, b.solver.record_stride, b.solver.blowup_threshold);
  return pa == pb && a.grid == b.grid && a.noise == b.noise && sa == sb && a.experiment == b.experiment &&
         a.seed == b.seed && a.output == b.output;
}

RunConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: not valid JSON: ") + e.what());
  }
  RunConfig cfg;
  Section root(doc, "");
  root.read("seed", cfg.seed);

  Section params = root.child("params");
  params.read("mu", cfg.params.mu);
  params.read("alpha", cfg.params.alpha);
  params.read("beta", cfg.params.beta);
  params.read("r", cfg.params.r);
  params.read("convection", cfg.params.convection);
  params.finish();

  Section grid = root.child("grid");
  grid.read("n", cfg.grid.n);
  grid.read("dealias", cfg.grid.dealias);
  grid.finish();

  if (root.has("noise")) {
    Section noise = root.child("noise");
    if (!noise.has("family")) throw ConfigError("noise.family: missing required field");
    if (!noise.has("weights")) throw ConfigError("noise.weights: missing required field");
    std::string family;
    noise.read("family", family);
    try {
      cfg.noise.family = noise_family_from_string(family);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("noise.family: ") + e.what());
    }
    std::vector<double> weights;
    noise.read("weights", weights);
    cfg.noise.weights = weights;
    noise.read("gamma", cfg.noise.gamma);
    noise.finish();
  }

  Section solver = root.child("solver");
  solver.read("T", cfg.solver.horizon);
  solver.read("step_level", cfg.solver.step_level);
  solver.read("record_stride", cfg.solver.record_stride);
  solver.read("blowup_threshold", cfg.solver.blowup_threshold);
  solver.finish();

  Section exp = root.child("experiment");
  exp.read("levels", cfg.experiment.levels);
  exp.read("samples", cfg.experiment.samples);
  exp.read("threads", cfg.experiment.threads);
  exp.read("skeleton_seeds", cfg.experiment.skeleton_seeds);
  exp.read("monotonicity_trials", cfg.experiment.monotonicity_trials);
  exp.read("identity_triples", cfg.experiment.identity_triples);
  exp.read("identity_pairs", cfg.experiment.identity_pairs);
  Section control = exp.child("control");
  control.read("mesh_level", cfg.experiment.control.mesh_level);
  control.read("l2_norm", cfg.experiment.control.l2_norm);
  control.finish();
  exp.finish();

  Section output = root.child("output");
  output.read("dir", cfg.output.dir);
  std::string format = to_string(cfg.output.format);
  output.read("format", format);
  cfg.output.format = output_format_from_string(format);
  output.finish();
  root.finish();

  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

namespace {

json to_json(const RunConfig& c) {
  json j;
  j["seed"] = c.seed;
  j["params"] = {{"mu", c.params.mu},
                 {"alpha", c.params.alpha},
                 {"beta", c.params.beta},
                 {"r", c.params.r},
                 {"convection", c.params.convection}};
  j["grid"] = {{"n", c.grid.n}, {"dealias", c.grid.dealias}};
  j["noise"] = {{"family", to_string(c.noise.family)}, {"weights", c.noise.weights}, {"gamma", c.noise.gamma}};
  j["solver"] = {{"T", c.solver.horizon},
                 {"step_level", c.solver.step_level},
                 {"record_stride", c.solver.record_stride},
                 {"blowup_threshold", c.solver.blowup_threshold}};
  const ExperimentSpec& e = c.experiment;
  j["experiment"] = {{"levels", e.levels},
                     {"samples", e.samples},
                     {"threads", e.threads},
                     {"skeleton_seeds", e.skeleton_seeds},
                     {"monotonicity_trials", e.monotonicity_trials},
                     {"identity_triples", e.identity_triples},
                     {"identity_pairs", e.identity_pairs},
                     {"control", {{"mesh_level", e.control.mesh_level}, {"l2_norm", e.control.l2_norm}}}};
  j["output"] = {{"dir", c.output.dir}, {"format", to_string(c.output.format)}};
  return j;
}

}  // namespace

std::string serialize_config(const RunConfig& cfg) { return to_json(cfg).dump(2) + "\n"; }

std::string config_hash(const RunConfig& cfg) {
  // The thread count and output location do not affect results.
  RunConfig canonical = cfg;
  canonical.experiment.threads = 1;
  canonical.output = OutputSpec{};
  const std::string text = to_json(canonical).dump();
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

ControlSignal make_control(const ControlSpec& spec, double horizon, int k_dim) {
  const long cells = 1L << spec.mesh_level;
  Eigen::MatrixXd values(cells, k_dim);
  for (long c = 0; c < cells; ++c) {
    for (int k = 0; k < k_dim; ++k) values(c, k) = ((c + k) % 2 == 0 ? 1.0 : -1.0) / (k + 1.0);
  }
  const double norm = std::sqrt(std::ldexp(horizon, -spec.mesh_level) * values.squaredNorm());
  values *= spec.l2_norm / norm;
  return ControlSignal(horizon, spec.mesh_level, std::move(values));
}

}  // namespace cbf
