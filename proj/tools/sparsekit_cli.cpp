// Command-line front end: config parsing, experiment dispatch, deterministic
// seeding, CSV emission. Exit code 0 iff the run completed and all outputs
// were written.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "sparsekit/sparsekit.hpp"

namespace {

struct CommonOptions {
  std::string config_path;
  std::string output_path;
  std::optional<std::uint64_t> seed_override;
  std::size_t threads = 0;  // 0 = auto; affects speed only, never results
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("--config", opts.config_path, "path to the JSON config file")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--out", opts.output_path, "path of the CSV output")
      ->required();
  cmd->add_option("--seed", opts.seed_override,
                  "override the config's master_seed");
  cmd->add_option("--threads", opts.threads,
                  "worker threads (0 = auto); never changes results");
}

// detail file goes to --out; aggregates go next to it with an _agg suffix.
std::string aggregate_path(const std::string& out) {
  const std::size_t slash = out.find_last_of('/');
  const std::size_t dot = out.find_last_of('.');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
    return out + "_agg.csv";
  return out.substr(0, dot) + "_agg" + out.substr(dot);
}

int run_command(const std::string& command, const CommonOptions& opts) {
  const nlohmann::json config_json = sparsekit::load_json(opts.config_path);
  if (command == "sense-sweep") {
    sparsekit::ExperimentConfig config =
        sparsekit::parse_sense_sweep_config(config_json);
    if (opts.seed_override) config.master_seed = *opts.seed_override;
    if (!config.model.sparse_regime())
      std::cerr << "warning: expected occupancy "
                << sparsekit::format_number(config.model.expected_occupancy())
                << " is not sparse relative to n=" << config.model.n() << "\n";
    const sparsekit::SweepCsv csv =
        sparsekit::run_sense_sweep(config, opts.threads);
    sparsekit::emit_csv(csv.detail, opts.output_path);
    sparsekit::emit_csv(csv.aggregate, aggregate_path(opts.output_path));
    return 0;
  }
  if (command == "phase-transition") {
    sparsekit::PhaseTransitionConfig config =
        sparsekit::parse_phase_transition_config(config_json);
    if (opts.seed_override) config.master_seed = *opts.seed_override;
    sparsekit::emit_csv(sparsekit::run_phase_transition(config),
                        opts.output_path);
    return 0;
  }
  if (command == "gather-sim") {
    sparsekit::GatherScenario scenario =
        sparsekit::parse_gather_config(config_json);
    if (opts.seed_override) scenario.master_seed = *opts.seed_override;
    sparsekit::emit_csv(sparsekit::run_gather_sim(scenario), opts.output_path);
    return 0;
  }
  if (command == "ar-gather") {
    sparsekit::ArGatherScenario scenario =
        sparsekit::parse_ar_gather_config(config_json);
    if (opts.seed_override) scenario.master_seed = *opts.seed_override;
    sparsekit::emit_csv(sparsekit::run_ar_gather(scenario), opts.output_path);
    return 0;
  }
  if (command == "adaptive-demo") {
    sparsekit::AdaptiveScenario scenario =
        sparsekit::parse_adaptive_config(config_json);
    if (opts.seed_override) scenario.master_seed = *opts.seed_override;
    sparsekit::emit_csv(sparsekit::run_adaptive_demo(scenario),
                        opts.output_path);
    return 0;
  }
  std::cerr << "error: unknown command '" << command << "'\n";
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "sparsekit: weighted compressive wideband spectrum sensing and "
      "compressive D2D data gathering experiments"};
  app.require_subcommand(1);

  const char* commands[] = {"sense-sweep", "phase-transition", "gather-sim",
                            "ar-gather", "adaptive-demo"};
  const char* descriptions[] = {
      "Monte Carlo sweep of sensing strategies over an m/n grid",
      "empirical minimal measurement count versus sparsity",
      "D2D exchange / aggregation-tree gathering rounds with overhead ledger",
      "AR-assisted gathering over correlated rounds",
      "two-step adaptive measurement adjustment demo"};
  CommonOptions opts[5];
  for (int i = 0; i < 5; ++i)
    add_common(app.add_subcommand(commands[i], descriptions[i]), opts[i]);

  CLI11_PARSE(app, argc, argv);

  for (int i = 0; i < 5; ++i) {
    if (!app.get_subcommand(commands[i])->parsed()) continue;
    try {
      return run_command(commands[i], opts[i]);
    } catch (const sparsekit::error& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 1;
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 1;
    }
  }
  return 2;
}
