#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "sparsekit/csv.hpp"
#include "sparsekit/errors.hpp"
#include "sparsekit/gather.hpp"
#include "sparsekit/pipeline.hpp"

namespace sparsekit {

inline nlohmann::json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open config file '" + path + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw parse_error("config '" + path + "': " + e.what());
  }
}

// Strict object reader: every key must be consumed by the schema, unknown
// keys are rejected with their full path.
class JsonChecker {
 public:
  JsonChecker(const nlohmann::json& j, std::string path)
      : j_(j), path_(std::move(path)) {
    if (!j_.is_object())
      throw parse_error("key '" + path_ + "': expected an object");
  }

  const std::string& path() const { return path_; }

  bool has(const std::string& key) {
    return j_.contains(key);
  }

  const nlohmann::json& require(const std::string& key) {
    consumed_.insert(key);
    if (!j_.contains(key))
      throw parse_error("key '" + sub(key) + "' is required");
    return j_.at(key);
  }

  const nlohmann::json* optional(const std::string& key) {
    consumed_.insert(key);
    return j_.contains(key) ? &j_.at(key) : nullptr;
  }

  double number(const std::string& key, double lo, double hi,
                const char* constraint) {
    return check_number(require(key), sub(key), lo, hi, constraint);
  }

  double number_or(const std::string& key, double fallback, double lo,
                   double hi, const char* constraint) {
    const nlohmann::json* v = optional(key);
    if (!v) return fallback;
    return check_number(*v, sub(key), lo, hi, constraint);
  }

  std::uint64_t integer(const std::string& key, std::uint64_t lo,
                        std::uint64_t hi, const char* constraint) {
    return check_integer(require(key), sub(key), lo, hi, constraint);
  }

  std::uint64_t integer_or(const std::string& key, std::uint64_t fallback,
                           std::uint64_t lo, std::uint64_t hi,
                           const char* constraint) {
    const nlohmann::json* v = optional(key);
    if (!v) return fallback;
    return check_integer(*v, sub(key), lo, hi, constraint);
  }

  std::string string_or(const std::string& key, const std::string& fallback) {
    const nlohmann::json* v = optional(key);
    if (!v) return fallback;
    if (!v->is_string())
      throw parse_error("key '" + sub(key) + "': expected a string");
    return v->get<std::string>();
  }

  // Two-element [lo, hi] numeric range with 0 < lo <= hi.
  std::pair<double, double> positive_range_or(const std::string& key,
                                              double lo, double hi) {
    const nlohmann::json* v = optional(key);
    if (!v) return {lo, hi};
    if (!v->is_array() || v->size() != 2 || !(*v)[0].is_number() ||
        !(*v)[1].is_number())
      throw parse_error("key '" + sub(key) + "': expected [low, high]");
    const double a = (*v)[0].get<double>();
    const double b = (*v)[1].get<double>();
    if (!(a > 0.0) || b < a)
      throw parse_error("key '" + sub(key) + "': need 0 < low <= high");
    return {a, b};
  }

  std::string sub(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  void finish() {
    for (const auto& [key, value] : j_.items())
      if (!consumed_.contains(key))
        throw parse_error("unknown key '" + sub(key) + "'");
  }

  static double check_number(const nlohmann::json& v, const std::string& path,
                             double lo, double hi, const char* constraint) {
    if (!v.is_number())
      throw parse_error("key '" + path + "': expected a number");
    const double x = v.get<double>();
    if (!(x >= lo) || !(x <= hi))
      throw parse_error("key '" + path + "': value " + format_number(x) +
                        " violates " + constraint);
    return x;
  }

  static std::uint64_t check_integer(const nlohmann::json& v,
                                     const std::string& path, std::uint64_t lo,
                                     std::uint64_t hi, const char* constraint) {
    if (!v.is_number_integer() || (v.is_number() && v.get<double>() < 0))
      throw parse_error("key '" + path + "': expected a non-negative integer");
    const std::uint64_t x = v.get<std::uint64_t>();
    if (x < lo || x > hi)
      throw parse_error("key '" + path + "': value " + std::to_string(x) +
                        " violates " + constraint);
    return x;
  }

 private:
  const nlohmann::json& j_;
  std::string path_;
  std::set<std::string> consumed_;
};

namespace detail {

inline PredictorSpec parse_predictor(const nlohmann::json& j,
                                     const std::string& path) {
  JsonChecker c(j, path);
  const std::string kind = c.string_or("kind", "ar1");
  PredictorSpec spec;
  if (kind == "ar1") {
    spec.kind = PredictorKind::ar1;
  } else if (kind == "moving_average") {
    spec.kind = PredictorKind::moving_average;
    spec.window = static_cast<std::size_t>(
        c.integer_or("window", 10, 1, 1u << 20, "window >= 1"));
  } else if (kind == "linear_regression") {
    spec.kind = PredictorKind::linear_regression;
    spec.window = static_cast<std::size_t>(
        c.integer_or("window", 10, 2, 1u << 20, "window >= 2"));
  } else {
    throw parse_error("key '" + path + ".kind': unknown predictor '" + kind + "'");
  }
  c.finish();
  return spec;
}

inline SensingStrategy parse_strategy(const nlohmann::json& j,
                                      const std::string& path) {
  SensingStrategy s;
  std::string kind;
  if (j.is_string()) {
    kind = j.get<std::string>();
  } else if (j.is_object()) {
    JsonChecker c(j, path);
    const nlohmann::json& jkind = c.require("kind");
    if (!jkind.is_string())
      throw parse_error("key '" + path + ".kind': expected a string");
    kind = jkind.get<std::string>();
    if (c.has("predictor")) {
      if (kind != "weighted_l1_predicted")
        throw parse_error("key '" + path +
                          ".predictor': only valid for weighted_l1_predicted");
      s.predictor = parse_predictor(c.require("predictor"), path + ".predictor");
    }
    c.finish();
  } else {
    throw parse_error("key '" + path + "': expected a string or an object");
  }
  if (kind == "conventional_l1")
    s.kind = SensingStrategy::Kind::conventional_l1;
  else if (kind == "omp")
    s.kind = SensingStrategy::Kind::omp;
  else if (kind == "weighted_l1_expected")
    s.kind = SensingStrategy::Kind::weighted_l1_expected;
  else if (kind == "weighted_l1_history")
    s.kind = SensingStrategy::Kind::weighted_l1_history;
  else if (kind == "weighted_l1_predicted")
    s.kind = SensingStrategy::Kind::weighted_l1_predicted;
  else
    throw parse_error("key '" + path + "': unknown strategy '" + kind + "'");
  return s;
}

inline WidebandModel parse_model(const nlohmann::json& j,
                                 const std::string& path) {
  JsonChecker c(j, path);
  const nlohmann::json& jblocks = c.require("blocks");
  if (!jblocks.is_array() || jblocks.empty())
    throw parse_error("key '" + path + ".blocks': expected a non-empty array");
  std::vector<BlockSpec> blocks;
  std::size_t first = 0;
  for (std::size_t i = 0; i < jblocks.size(); ++i) {
    const std::string bpath = path + ".blocks[" + std::to_string(i) + "]";
    JsonChecker bc(jblocks[i], bpath);
    BlockSpec b;
    b.first_band = first;
    b.band_count = static_cast<std::size_t>(
        bc.integer("band_count", 1, 1u << 20, "band_count >= 1"));
    b.occupancy_prob =
        bc.number("occupancy_prob", 0.0, 1.0, "occupancy_prob in [0,1]");
    b.persistence = bc.number_or("persistence", 0.0, 0.0,
                                 std::nextafter(1.0, 0.0),
                                 "persistence in [0,1)");
    bc.finish();
    first += b.band_count;
    blocks.push_back(b);
  }
  const auto [lo, hi] = c.positive_range_or("amplitude_range", 1.0, 2.0);
  c.finish();
  return WidebandModel(std::move(blocks), lo, hi);
}

inline RecoveryConfig parse_recovery(JsonChecker& parent, double auto_lambda,
                                     bool* auto_tau) {
  RecoveryConfig rc;
  rc.lambda = auto_lambda;
  *auto_tau = true;
  const nlohmann::json* j = parent.optional("recovery");
  if (!j) return rc;
  JsonChecker c(*j, parent.sub("recovery"));
  rc.max_iterations = static_cast<std::size_t>(c.integer_or(
      "max_iterations", 500, 1, 100000000, "max_iterations >= 1"));
  rc.residual_tolerance = c.number_or("residual_tolerance", 1e-9, 0.0, 1e300,
                                      "residual_tolerance >= 0");
  if (const nlohmann::json* v = c.optional("lambda")) {
    if (v->is_string() && v->get<std::string>() == "auto") {
      rc.lambda = auto_lambda;
    } else {
      rc.lambda = JsonChecker::check_number(*v, c.sub("lambda"), 0.0, 1e300,
                                            "lambda >= 0");
    }
  }
  if (const nlohmann::json* v = c.optional("step_size")) {
    if (v->is_string() && v->get<std::string>() == "auto") {
      rc.step_policy = StepSizePolicy::inverse_spectral_norm;
    } else {
      rc.step_policy = StepSizePolicy::fixed;
      rc.fixed_step = JsonChecker::check_number(
          *v, c.sub("step_size"), std::nextafter(0.0, 1.0), 1e300,
          "step_size > 0");
    }
  }
  if (const nlohmann::json* v = c.optional("support_threshold")) {
    if (v->is_string() && v->get<std::string>() == "auto") {
      *auto_tau = true;
    } else {
      *auto_tau = false;
      rc.support_threshold = JsonChecker::check_number(
          *v, c.sub("support_threshold"), 0.0, 1e300, "support_threshold >= 0");
    }
  }
  c.finish();
  return rc;
}

inline GatherSolverKind parse_solver_kind(const std::string& s,
                                          const std::string& path) {
  if (s == "omp") return GatherSolverKind::omp;
  if (s == "weighted_l1") return GatherSolverKind::weighted_l1;
  throw parse_error("key '" + path + "': unknown solver '" + s + "'");
}

}  // namespace detail

// ---- sense-sweep ----------------------------------------------------------

inline ExperimentConfig parse_sense_sweep_config(const nlohmann::json& j) {
  JsonChecker c(j, "");
  WidebandModel model = detail::parse_model(c.require("model"), "model");

  const nlohmann::json& jgrid = c.require("m_over_n");
  if (!jgrid.is_array() || jgrid.empty())
    throw parse_error("key 'm_over_n': expected a non-empty array");
  std::vector<double> grid;
  for (std::size_t i = 0; i < jgrid.size(); ++i)
    grid.push_back(JsonChecker::check_number(
        jgrid[i], "m_over_n[" + std::to_string(i) + "]",
        std::nextafter(0.0, 1.0), 1.0, "m_over_n in (0,1]"));

  const bool has_noise = c.has("noise_std");
  const bool has_snr = c.has("snr_db");
  if (has_noise == has_snr)
    throw parse_error("exactly one of keys 'noise_std' and 'snr_db' must be given");
  double noise_std;
  if (has_noise)
    noise_std = c.number("noise_std", 0.0, 1e300, "noise_std >= 0");
  else
    noise_std = noise_std_for_snr_db(
        model, c.number("snr_db", -300.0, 300.0, "snr_db in [-300,300]"));

  const nlohmann::json& jstrat = c.require("strategies");
  if (!jstrat.is_array() || jstrat.empty())
    throw parse_error("key 'strategies': expected a non-empty array");
  std::vector<SensingStrategy> strategies;
  std::set<std::string> names;
  for (std::size_t i = 0; i < jstrat.size(); ++i) {
    strategies.push_back(detail::parse_strategy(
        jstrat[i], "strategies[" + std::to_string(i) + "]"));
    if (!names.insert(strategies.back().name()).second)
      throw parse_error("key 'strategies[" + std::to_string(i) +
                        "]': duplicate strategy '" + strategies.back().name() +
                        "'");
  }

  const auto trials = static_cast<std::size_t>(
      c.integer("trials", 1, 100000000, "trials >= 1"));
  const std::uint64_t master_seed =
      c.integer_or("master_seed", 0, 0, UINT64_MAX, "master_seed");
  const auto history_length = static_cast<std::size_t>(c.integer_or(
      "history_length", 100, 1, 100000000, "history_length >= 1"));

  const std::string dict = c.string_or("dictionary", "identity");
  if (dict != "identity" && dict != "dft")
    throw parse_error("key 'dictionary': must be 'identity' or 'dft'");
  const std::string ens = c.string_or("ensemble", "gaussian");
  if (ens != "gaussian" && ens != "rademacher")
    throw parse_error("key 'ensemble': must be 'gaussian' or 'rademacher'");
  const auto omp_budget = static_cast<std::size_t>(
      c.integer_or("omp_budget", 0, 0, 1u << 20, "omp_budget >= 0"));

  const double auto_lambda =
      noise_std * std::sqrt(2.0 * std::log(static_cast<double>(model.n())));
  bool auto_tau = true;
  RecoveryConfig recovery = detail::parse_recovery(c, auto_lambda, &auto_tau);
  c.finish();

  ExperimentConfig config{std::move(model)};
  config.m_over_n = std::move(grid);
  config.noise_std = noise_std;
  config.strategies = std::move(strategies);
  config.trials = trials;
  config.master_seed = master_seed;
  config.recovery = recovery;
  config.history_length = history_length;
  config.ensemble = ens == "gaussian" ? Ensemble::gaussian : Ensemble::rademacher;
  config.use_dft_dictionary = dict == "dft";
  config.omp_budget = omp_budget;
  config.auto_support_threshold = auto_tau;
  for (const SensingStrategy& s : config.strategies)
    if (s.kind == SensingStrategy::Kind::weighted_l1_predicted &&
        config.history_length < s.predictor.min_history())
      throw parse_error("key 'history_length': predicted strategy needs at least " +
                        std::to_string(s.predictor.min_history()) + " slots");
  config.validate();
  return config;
}

// ---- phase-transition -----------------------------------------------------

struct PhaseTransitionConfig {
  std::size_t n = 0;
  std::vector<std::size_t> k_grid;
  double success_threshold = 0.9;
  std::size_t trials_per_point = 50;
  std::uint64_t master_seed = 0;
};

inline PhaseTransitionConfig parse_phase_transition_config(
    const nlohmann::json& j) {
  JsonChecker c(j, "");
  PhaseTransitionConfig config;
  config.n = static_cast<std::size_t>(c.integer("n", 2, 1u << 20, "n >= 2"));
  const nlohmann::json& jk = c.require("k_grid");
  if (!jk.is_array() || jk.empty())
    throw parse_error("key 'k_grid': expected a non-empty array");
  for (std::size_t i = 0; i < jk.size(); ++i)
    config.k_grid.push_back(static_cast<std::size_t>(JsonChecker::check_integer(
        jk[i], "k_grid[" + std::to_string(i) + "]", 0, config.n / 2,
        "k <= n/2")));
  config.success_threshold = c.number_or(
      "success_threshold", 0.9, 1e-9, 1.0, "success_threshold in (0,1]");
  config.trials_per_point = static_cast<std::size_t>(c.integer_or(
      "trials_per_point", 50, 1, 1000000, "trials_per_point >= 1"));
  config.master_seed = c.integer_or("master_seed", 0, 0, UINT64_MAX, "master_seed");
  c.finish();
  return config;
}

// ---- gather-sim -----------------------------------------------------------

struct GatherScenario {
  std::size_t nodes = 0;
  std::size_t pull_count = 0;
  std::optional<std::size_t> active_updaters;  // exactly one of these two
  std::optional<double> update_prob;
  double value_lo = 1.0;
  double value_hi = 2.0;
  Topology topology;
  GatherSolverKind solver = GatherSolverKind::omp;
  std::size_t expected_sparsity = 0;  // 0: derived from updaters
  std::size_t rounds = 1;
  std::uint64_t master_seed = 0;
};

inline GatherScenario parse_gather_config(const nlohmann::json& j) {
  JsonChecker c(j, "");
  GatherScenario s;
  s.nodes = static_cast<std::size_t>(c.integer("nodes", 1, 1u << 20, "nodes >= 1"));
  s.pull_count = static_cast<std::size_t>(
      c.integer("pull_count", 1, s.nodes, "1 <= pull_count <= nodes"));
  const bool has_p = c.has("active_updaters");
  const bool has_q = c.has("update_prob");
  if (has_p == has_q)
    throw parse_error(
        "exactly one of keys 'active_updaters' and 'update_prob' must be given");
  if (has_p)
    s.active_updaters = static_cast<std::size_t>(c.integer(
        "active_updaters", 0, s.nodes, "active_updaters <= nodes"));
  else
    s.update_prob = c.number("update_prob", 0.0, 1.0, "update_prob in [0,1]");
  std::tie(s.value_lo, s.value_hi) = c.positive_range_or("update_value_range", 1.0, 2.0);

  if (const nlohmann::json* jt = c.optional("topology")) {
    if (jt->is_string() && jt->get<std::string>() == "clique") {
      s.topology.kind = Topology::Kind::clique;
    } else if (jt->is_object()) {
      JsonChecker tc(*jt, "topology");
      const nlohmann::json& ja = tc.require("aggregation_tree");
      JsonChecker ac(ja, "topology.aggregation_tree");
      s.topology.kind = Topology::Kind::aggregation_tree;
      s.topology.network_nodes = static_cast<std::size_t>(ac.integer(
          "network_nodes", 1, s.nodes, "1 <= network_nodes <= nodes"));
      ac.finish();
      tc.finish();
    } else {
      throw parse_error(
          "key 'topology': expected \"clique\" or {\"aggregation_tree\": ...}");
    }
  }
  s.solver = detail::parse_solver_kind(c.string_or("solver", "omp"), "solver");
  s.expected_sparsity = static_cast<std::size_t>(c.integer_or(
      "expected_sparsity", 0, 0, s.nodes, "expected_sparsity <= nodes"));
  s.rounds = static_cast<std::size_t>(
      c.integer_or("rounds", 1, 1, 1000000, "rounds >= 1"));
  s.master_seed = c.integer_or("master_seed", 0, 0, UINT64_MAX, "master_seed");
  c.finish();
  return s;
}

// ---- ar-gather ------------------------------------------------------------

struct ArGatherScenario {
  std::size_t nodes = 0;
  std::size_t pull_count = 0;
  double alpha = 0.9;
  std::size_t rounds = 1;
  std::size_t innovation_sparsity = 1;
  double value_lo = 1.0;
  double value_hi = 2.0;
  GatherSolverKind solver = GatherSolverKind::omp;
  std::uint64_t master_seed = 0;
};

inline ArGatherScenario parse_ar_gather_config(const nlohmann::json& j) {
  JsonChecker c(j, "");
  ArGatherScenario s;
  s.nodes = static_cast<std::size_t>(c.integer("nodes", 1, 1u << 20, "nodes >= 1"));
  s.pull_count = static_cast<std::size_t>(
      c.integer("pull_count", 1, s.nodes, "1 <= pull_count <= nodes"));
  s.alpha = c.number("alpha", std::nextafter(-1.0, 0.0), std::nextafter(1.0, 0.0),
                     "|alpha| < 1");
  s.rounds = static_cast<std::size_t>(
      c.integer_or("rounds", 1, 1, 1000000, "rounds >= 1"));
  s.innovation_sparsity = static_cast<std::size_t>(c.integer_or(
      "innovation_sparsity", 1, 0, s.nodes, "innovation_sparsity <= nodes"));
  std::tie(s.value_lo, s.value_hi) =
      c.positive_range_or("innovation_value_range", 1.0, 2.0);
  s.solver = detail::parse_solver_kind(c.string_or("solver", "omp"), "solver");
  s.master_seed = c.integer_or("master_seed", 0, 0, UINT64_MAX, "master_seed");
  c.finish();
  return s;
}

// ---- adaptive-demo --------------------------------------------------------

struct AdaptiveScenario {
  std::size_t n = 0;
  std::size_t true_sparsity = 0;
  std::size_t m0 = 0;
  double safety_factor = 2.0;
  std::size_t trials = 100;
  std::uint64_t master_seed = 0;
};

inline AdaptiveScenario parse_adaptive_config(const nlohmann::json& j) {
  JsonChecker c(j, "");
  AdaptiveScenario s;
  s.n = static_cast<std::size_t>(c.integer("n", 1, 1u << 20, "n >= 1"));
  s.true_sparsity = static_cast<std::size_t>(
      c.integer("true_sparsity", 0, s.n, "true_sparsity <= n"));
  s.m0 = static_cast<std::size_t>(c.integer("m0", 1, s.n, "1 <= m0 <= n"));
  s.safety_factor = c.number_or("safety_factor", 2.0, 1e-9, 1e6,
                                "safety_factor > 0");
  s.trials = static_cast<std::size_t>(
      c.integer_or("trials", 100, 1, 1000000, "trials >= 1"));
  s.master_seed = c.integer_or("master_seed", 0, 0, UINT64_MAX, "master_seed");
  c.finish();
  return s;
}

}  // namespace sparsekit
