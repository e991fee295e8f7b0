// projcx: build projection complexes and blown-up quasi-trees from finite
// projection families and run the verification suites over them.

#include <chrono>
#include <iostream>

#include <CLI11.hpp>

#include "projcx/experiment.hpp"

namespace {

using projcx::ExperimentConfig;
using projcx::ExperimentResult;

struct Flags {
  ExperimentConfig cfg;
  double xi = -1, theta = -1, K = -1, Kprime = -1, L = -1;
  std::string metric = "modified";

  void finalize() {
    if (xi > 0) cfg.xi = xi;
    if (theta > 0) cfg.theta = theta;
    if (K > 0) cfg.K = K;
    if (Kprime > 0) cfg.Kprime = Kprime;
    if (L > 0) cfg.L = L;
    cfg.metric =
        metric == "raw" ? projcx::MetricMode::raw : projcx::MetricMode::modified;
  }
};

void add_common(CLI::App* cmd, Flags& flags) {
  cmd->set_config("--config", "", "TOML config mirroring the flag names");
  cmd->add_option("--instance", flags.cfg.instance,
                  "builtin (schottky-default, chain-synthetic, chain-tangent) or a "
                  "JSON instance file");
  cmd->add_option("--radius", flags.cfg.radius, "schottky word radius");
  cmd->add_option("--xi", flags.xi, "override the instance constant xi");
  cmd->add_option("--theta", flags.theta, "override theta (default 4 xi)");
  cmd->add_option("--K", flags.K, "override the edge threshold K (default 30 xi)");
  cmd->add_flag("--auto-K", flags.cfg.auto_K,
                "double K until the order relation is consistent");
  cmd->add_option("--Kprime", flags.Kprime, "override K' (default 5K + 30 xi)");
  cmd->add_option("--L", flags.L, "override the bridge length L (default K + 2 xi + 1)");
  cmd->add_option("--metric", flags.metric, "modified or raw")
      ->check(CLI::IsMember({"modified", "raw"}));
  cmd->add_option("--suite", flags.cfg.suites,
                  "suites to run (axioms, theorem-main, complex, blowup, raw-question)");
  cmd->add_option("--pairs", flags.cfg.pairs, "sample count for pair-based checks");
  cmd->add_option("--seed", flags.cfg.seed, "seed recorded in all outputs");
  cmd->add_option("--out", flags.cfg.out_dir, "output directory");
}

int run(const std::string& name, const Flags& flags,
        ExperimentResult (*fn)(const ExperimentConfig&)) {
  const auto start = std::chrono::steady_clock::now();
  const ExperimentResult result = fn(flags.cfg);
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  projcx::write_result(flags.cfg, name, result, elapsed);
  std::cout << name << ": " << (result.failed ? "FAIL" : "pass")
            << (result.flagged ? " (flagged entries, see report)" : "") << " -> "
            << flags.cfg.out_dir << "/" << name << "_report.json\n";
  return result.failed ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"projection complexes and quasi-trees of metric spaces"};
  app.require_subcommand(1);

  Flags flags;
  auto* validate = app.add_subcommand("validate", "axioms and modified-distance checks");
  auto* build = app.add_subcommand("build", "build the complex and blowup, export files");
  auto* analyze = app.add_subcommand("analyze", "distance bounds, separation, blowup suites");
  auto* action = app.add_subcommand("action", "equivariance, translation lengths, axes");
  for (auto* cmd : {validate, build, analyze, action}) add_common(cmd, flags);

  CLI11_PARSE(app, argc, argv);
  flags.finalize();

  try {
    if (validate->parsed()) return run("validate", flags, projcx::cmd_validate);
    if (build->parsed()) return run("build", flags, projcx::cmd_build);
    if (analyze->parsed()) return run("analyze", flags, projcx::cmd_analyze);
    if (action->parsed()) return run("action", flags, projcx::cmd_action);
  } catch (const std::invalid_argument& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const projcx::json::exception& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
