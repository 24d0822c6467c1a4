#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "sparsekit/config.hpp"
#include "sparsekit/csv.hpp"
#include "sparsekit/gather.hpp"
#include "sparsekit/pipeline.hpp"

namespace sparsekit {

// CSV bindings for each CLI command. Column orders are part of the output
// contract; see the README schema reference.

struct SweepCsv {
  CsvTable detail;
  CsvTable aggregate;
};

// The wall_time_s column is emitted as 0 so identical runs stay byte
// identical; measured times are available on TrialResult programmatically.
inline SweepCsv run_sense_sweep(const ExperimentConfig& config,
                                std::size_t threads = 1) {
  const SweepTable table = sweep(config, threads);
  SweepCsv out;
  out.detail.header = {"strategy",    "m_over_n", "trial",      "miss_detection",
                       "false_alarm", "nmse",     "wall_time_s"};
  for (const TrialResult& row : table.detail)
    out.detail.add_row({row.strategy, format_number(row.m_over_n),
                        format_number(row.trial),
                        format_number(row.metrics.miss_detection_rate),
                        format_number(row.metrics.false_alarm_rate),
                        format_number(row.metrics.nmse), format_number(0.0)});
  out.aggregate.header = {"strategy", "m_over_n", "mean_miss",
                          "se_miss",  "mean_fa",  "se_fa"};
  for (const AggregateRow& row : table.aggregate)
    out.aggregate.add_row({row.strategy, format_number(row.m_over_n),
                           format_number(row.mean_miss), format_number(row.se_miss),
                           format_number(row.mean_fa), format_number(row.se_fa)});
  return out;
}

inline CsvTable run_phase_transition(const PhaseTransitionConfig& config) {
  const PhaseTransitionResult result = phase_transition(
      config.n, config.k_grid, config.master_seed, config.success_threshold,
      config.trials_per_point);
  CsvTable table;
  table.header = {"k", "m_star", "fit_c", "fit_r2"};
  for (const PhaseTransitionPoint& p : result.points)
    table.add_row({format_number(p.k), format_number(p.m_star),
                   format_number(result.fit_c), format_number(result.fit_r2)});
  return table;
}

inline CsvTable run_gather_sim(const GatherScenario& scenario) {
  GatherNetwork net = init_network(
      scenario.nodes, scenario.pull_count, scenario.topology,
      derive_seed(scenario.master_seed,
                  {static_cast<std::uint64_t>(SeedStage::network)}));
  CsvTable table;
  table.header = {"mode",
                  "N",
                  "m",
                  "p",
                  "exact_recovery",
                  "bs_connections",
                  "d2d_multicasts",
                  "network_node_transmissions",
                  "sink_transmissions"};
  const bool tree = scenario.topology.kind == Topology::Kind::aggregation_tree;
  GatherSolver solver;
  solver.kind = scenario.solver;
  for (std::size_t round = 0; round < scenario.rounds; ++round) {
    const std::uint64_t seed = derive_seed(
        scenario.master_seed,
        {round, static_cast<std::uint64_t>(SeedStage::updates)});
    const UpdateMap updates =
        scenario.active_updaters
            ? draw_updates(scenario.nodes, *scenario.active_updaters,
                           scenario.value_lo, scenario.value_hi, seed)
            : draw_updates_bernoulli(scenario.nodes, *scenario.update_prob,
                                     scenario.value_lo, scenario.value_hi, seed);
    const std::size_t sparsity =
        scenario.expected_sparsity > 0
            ? scenario.expected_sparsity
            : std::max<std::size_t>(updates.size(), 1);
    net.reset_round();
    GatherResult result;
    if (tree) {
      result = net.run_aggregation_reporting(updates, solver, sparsity);
    } else {
      net.run_exchange(updates);
      result = net.bs_pull_and_recover(scenario.pull_count, solver, sparsity);
    }
    const SignalingLedger& ledger = net.ledger();
    table.add_row({tree ? "aggregation_tree" : "clique",
                   format_number(scenario.nodes),
                   format_number(scenario.pull_count),
                   format_number(updates.size()),
                   std::string(result.exact ? "1" : "0"),
                   format_number(ledger.bs_connections),
                   format_number(ledger.d2d_multicasts),
                   format_number(ledger.network_node_transmissions),
                   format_number(ledger.sink_transmissions)});
  }
  return table;
}

inline CsvTable run_ar_gather(const ArGatherScenario& scenario) {
  GatherNetwork net = init_network(
      scenario.nodes, scenario.pull_count, Topology{Topology::Kind::clique, 0},
      derive_seed(scenario.master_seed,
                  {static_cast<std::uint64_t>(SeedStage::network)}));
  GatherSolver solver;
  solver.kind = scenario.solver;
  CsvTable table;
  table.header = {"round", "p", "nmse", "exact_recovery", "sink_transmissions"};
  std::vector<double> truth(scenario.nodes, 0.0);
  std::vector<double> estimate(scenario.nodes, 0.0);
  for (std::size_t round = 0; round < scenario.rounds; ++round) {
    const UpdateMap innovations = draw_updates(
        scenario.nodes, scenario.innovation_sparsity, scenario.value_lo,
        scenario.value_hi,
        derive_seed(scenario.master_seed,
                    {round, static_cast<std::uint64_t>(SeedStage::innovation)}));
    net.reset_round();
    const GatherNetwork::ArRoundResult result = net.ar_gather_round(
        truth, scenario.alpha, innovations, solver,
        std::max<std::size_t>(scenario.innovation_sparsity, 1), &estimate);
    truth = result.truth;
    estimate = result.estimate;
    double err = 0.0, ref = 0.0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
      err += (estimate[i] - truth[i]) * (estimate[i] - truth[i]);
      ref += truth[i] * truth[i];
    }
    const double nmse = ref > 0.0 ? err / ref : (err > 0.0 ? 1.0 : 0.0);
    table.add_row({format_number(round), format_number(innovations.size()),
                   format_number(nmse), std::string(result.exact ? "1" : "0"),
                   format_number(net.ledger().sink_transmissions)});
  }
  return table;
}

inline CsvTable run_adaptive_demo(const AdaptiveScenario& scenario) {
  CsvTable table;
  table.header = {"trial", "k_true", "k_hat", "m0", "m_final", "exact_recovery"};
  for (std::size_t trial = 0; trial < scenario.trials; ++trial) {
    const SparseSignal x = detail::random_k_sparse(
        scenario.n, scenario.true_sparsity,
        derive_seed(scenario.master_seed,
                    {trial, static_cast<std::uint64_t>(SeedStage::signal)}));
    const AdaptiveResult result = adaptive_measurements(
        x, scenario.m0, scenario.safety_factor,
        derive_seed(scenario.master_seed,
                    {trial, static_cast<std::uint64_t>(SeedStage::sensing_matrix)}));
    const bool exact =
        detail::exact_support_match(result.estimate, *x.declared_support);
    table.add_row({format_number(trial), format_number(scenario.true_sparsity),
                   format_number(result.k_hat), format_number(scenario.m0),
                   format_number(result.m_final),
                   std::string(exact ? "1" : "0")});
  }
  return table;
}

}  // namespace sparsekit
