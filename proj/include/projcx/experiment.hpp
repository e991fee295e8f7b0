#pragma once

#include <optional>
#include <string>
#include <vector>

#include "projcx/action.hpp"
#include "projcx/blowup.hpp"
#include "projcx/complex.hpp"
#include "projcx/core.hpp"
#include "projcx/system.hpp"

namespace projcx {

/// Experiment configuration: precedence is flags > config file > defaults;
/// the seed is always recorded in outputs.
struct ExperimentConfig {
  std::string instance = "schottky-default";  // builtin name or JSON path
  int radius = 3;                             // schottky word radius
  std::optional<double> xi;                   // instance-xi override
  std::optional<double> theta;
  std::optional<double> K;
  bool auto_K = false;
  std::optional<double> Kprime;
  std::optional<double> L;
  MetricMode metric = MetricMode::modified;
  std::vector<std::string> suites;  // empty = command defaults
  std::size_t pairs = 200;
  std::uint64_t seed = 1;
  std::string out_dir = "out";
};

struct ExperimentResult {
  json report;
  std::vector<std::pair<std::string, std::string>> files;  // name -> contents
  bool failed = false;
  bool flagged = false;
};

/// Loads the configured instance (builtin or file) and derives CoreParams.
struct PreparedInstance {
  LoadedInstance loaded;
  CoreParams params;
  json provenance;  // instance hash, params, seed
};
PreparedInstance prepare_instance(const ExperimentConfig& cfg);

ExperimentResult cmd_validate(const ExperimentConfig& cfg);
ExperimentResult cmd_build(const ExperimentConfig& cfg);
ExperimentResult cmd_analyze(const ExperimentConfig& cfg);
ExperimentResult cmd_action(const ExperimentConfig& cfg);

/// Writes report.json plus the result's data files into cfg.out_dir; the
/// wall-clock goes to a separate timing.txt so report bytes stay
/// reproducible.
void write_result(const ExperimentConfig& cfg, const std::string& command,
                  const ExperimentResult& result, double elapsed_seconds);

}  // namespace projcx
