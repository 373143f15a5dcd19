#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "nlsv/error.hpp"
#include "nlsv/grid_field.hpp"
#include "nlsv/potentials.hpp"
#include "nlsv/propagator.hpp"

namespace nlsv {

using Json = nlohmann::json;

enum class Experiment {
  GroundState,
  Thresholds,
  Evolve,
  DichotomyScan,
  VirialCheck,
  DispersiveCheck,
  DefocusingEvolve,
  InequalityFuzz,
};

const char* to_string(Experiment e);
std::optional<Experiment> experiment_from_string(const std::string& s);
const std::vector<std::string>& experiment_names();

struct InitialDataConfig {
  enum class Family { ScaledGroundState, Gaussian, FromSnapshot };
  Family family = Family::ScaledGroundState;
  double lambda = 0.5;       // scaled_ground_state
  double amplitude = 1.0;    // gaussian: A exp(-|x - c|^2 / width^2) e^{i k0.x}
  double width = 1.0;
  Vec3 center{};
  Vec3 boost{};
  std::string path;          // from_snapshot
};

struct GroundStateConfig {
  double tol = 1e-7;
  int max_iterations = 4000;
  double compression = 0.8;
  std::vector<Vec3> extra_centers;  // further maximizer starts
  bool fixed_frequency_surrogate = true;
};

struct ExperimentConfig {
  Experiment experiment = Experiment::Thresholds;
  int grid_n = 64;
  double box_length = 16.0;
  Json potential_json = Json::object();
  PotentialSpec potential;
  EvolutionConfig evolution;
  InitialDataConfig initial_data;
  GroundStateConfig ground_state;
  std::vector<double> virial_radii;    // default {L/8, L/6}
  double dispersive_t_min = 0.0;
  double dispersive_t_max = 0.0;
  std::vector<double> scan_lambdas{0.5, 0.8, 1.2};
  bool scan_evolve = false;
  int fuzz_trials = 1000;
  int fuzz_grid_n = 32;
  double fuzz_box_length = 16.0;
  bool save_snapshots = false;
  bool keep_fields = false;
  std::string output_dir = "out";
  std::uint64_t seed = 0;

  Grid grid() const { return Grid(grid_n, box_length); }
};

/// Sets a dotted key ("evolution.dt") to a value parsed as JSON, or taken as
/// a string when it does not parse.
void apply_override(Json& doc, const std::string& assignment);

/// Validates everything and throws ConfigError listing every violation.
ExperimentConfig parse_config(const Json& doc);

/// Potential description: {"family": ..., "amplitude", "width" | "radius" |
/// "decay", "center": [x, y, z]} or {"family": "sum", "members": [...]}.
PotentialSpec parse_potential(const Json& j, const std::string& key, std::vector<ConfigViolation>& out);
Json potential_to_json(const PotentialSpec& spec);

/// FNV-1a 64 over the sorted-key dump.
std::uint64_t config_hash(const Json& doc);
std::string hex64(std::uint64_t v);

Json load_json_file(const std::string& path);

}  // namespace nlsv
