#pragma once

#include <exception>
#include <optional>
#include <string>
#include <vector>

#include "nlsv/config.hpp"
#include "nlsv/ground_states.hpp"
#include "nlsv/thresholds.hpp"

namespace nlsv {

/// Process exit codes of the command-line driver.
enum ExitCode : int {
  kExitOk = 0,
  kExitInternal = 1,
  kExitConfig = 2,
  kExitNumerical = 3,
  kExitIo = 4,
};

int exit_code_for(const std::exception& e);

struct RunResult {
  Json report;
  int exit_code = kExitOk;
  std::vector<std::string> files;  // artifacts written, report last
};

/// Runs one experiment and, when `write_files` is set, writes report.json
/// plus CSV series and snapshots into cfg.output_dir. Evolution aborts are
/// recorded in the report and give kExitNumerical for the single-run
/// experiments; configuration, numerical and IO failures throw.
RunResult run_experiment(const ExperimentConfig& cfg, const Json& effective_config, bool write_files = true);

/// Free ground state, the maximizer when V has a negative part, and the
/// thresholds they generate.
struct ThresholdContext {
  FreeGroundState free;
  std::optional<GroundStateResult> maximizer;
  ThresholdReport report;

  /// The state whose scalings form the scan family: the maximizer if present.
  const Field& generator() const { return maximizer ? maximizer->profile : free.on_grid.profile; }
};

ThresholdContext threshold_context(const ExperimentConfig& cfg, const RealField& V);

/// Initial data of the config; scaled_ground_state needs `ctx`.
Field make_initial_data(const ExperimentConfig& cfg, const Grid& g, const ThresholdContext* ctx);

}  // namespace nlsv
