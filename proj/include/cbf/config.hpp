#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "cbf/experiments.hpp"

namespace cbf {

/// Raised for malformed, unknown, missing, or inconsistent configuration entries.
/// The message starts with the offending key path.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct NoiseSpec {
  NoiseFamily family = NoiseFamily::diagonal_linear;
  std::vector<double> weights{0.4, 0.3, 0.2, 0.15, 0.1, 0.08, 0.06, 0.05};
  double gamma = 0.0;

  friend bool operator==(const NoiseSpec&, const NoiseSpec&) = default;
};

/// Piecewise-constant control on 2^mesh_level cells with a fixed alternating
/// pattern, rescaled to the requested L^2(0, T) norm.
struct ControlSpec {
  int mesh_level = 2;
  double l2_norm = 1.0;

  friend bool operator==(const ControlSpec&, const ControlSpec&) = default;
};

struct ExperimentSpec {
  std::vector<int> levels{3, 4, 5, 6, 7, 8};
  int samples = 32;
  int threads = 1;
  int skeleton_seeds = 8;
  long monotonicity_trials = 10000;
  long identity_triples = 1000;
  long identity_pairs = 10000;
  ControlSpec control;

  friend bool operator==(const ExperimentSpec&, const ExperimentSpec&) = default;
};

enum class OutputFormat { csv, json, both };

std::string to_string(OutputFormat f);
OutputFormat output_format_from_string(const std::string& name);

struct OutputSpec {
  std::string dir;  ///< empty: fall back to CBF_OUT_DIR, then "results"
  OutputFormat format = OutputFormat::both;

  friend bool operator==(const OutputSpec&, const OutputSpec&) = default;
};

struct RunConfig {
  FluidParams params{1.0, 0.1, 1.0, 3.0, true};
  GridSpec grid;
  NoiseSpec noise;
  SolverConfig solver;
  ExperimentSpec experiment;
  std::uint64_t seed = 1;
  OutputSpec output;

  /// Cross-field checks; throws ConfigError naming the violated constraint.
  void validate() const;

  NoiseModel noise_model() const;
  StudySetup study_setup() const;
  ControlSignal control() const;
};

bool operator==(const RunConfig& a, const RunConfig& b);

/// Parse a JSON document. Every section and key is optional; absent ones take
/// the defaults above, except that a noise section must name both family and weights.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

/// Canonical JSON text (sorted keys, every field present).
std::string serialize_config(const RunConfig& cfg);

/// FNV-1a 64 of the canonical text, as 16 hex digits.
std::string config_hash(const RunConfig& cfg);

/// The fixed control pattern of ControlSpec on k_dim components.
ControlSignal make_control(const ControlSpec& spec, double horizon, int k_dim);

}  // namespace cbf
