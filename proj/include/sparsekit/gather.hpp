#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "sparsekit/errors.hpp"
#include "sparsekit/ista.hpp"
#include "sparsekit/linalg.hpp"
#include "sparsekit/matrix.hpp"
#include "sparsekit/omp.hpp"
#include "sparsekit/rng.hpp"
#include "sparsekit/sensing.hpp"
#include "sparsekit/signal.hpp"

namespace sparsekit {

// Transmission counters for one protocol round (Table-2 style accounting).
struct SignalingLedger {
  std::uint64_t d2d_multicasts = 0;
  std::uint64_t bs_connections = 0;
  std::uint64_t sink_transmissions = 0;
  std::uint64_t network_node_transmissions = 0;
};

struct IoTNode {
  std::size_t id = 0;
  std::vector<double> coefficient_row;  // its row of the N x N gathering matrix
  double accumulator = 0.0;
  double update_value = 0.0;  // 0 when the node has no update this round
  bool awake = true;
};

struct Topology {
  enum class Kind { clique, aggregation_tree };
  Kind kind = Kind::clique;
  std::size_t network_nodes = 0;  // aggregation_tree only
};

enum class GatherSolverKind { omp, weighted_l1 };

struct GatherSolver {
  GatherSolverKind kind = GatherSolverKind::omp;
  RecoveryConfig recovery;  // weighted_l1 path; lambda 0 means auto
  double debias_threshold = 1e-3;  // relative support cut before the refit

  GatherSolver() {
    recovery.max_iterations = 3000;
    recovery.residual_tolerance = 0.0;
  }
};

struct GatherResult {
  SparseSignal recovered;            // length N
  std::vector<double> measurements;  // the y the BS assembled (length m)
  bool exact = false;  // support and values match the round's updates
};

// Sparse update map: node id -> new replica value. Values of exactly 0 mean
// "no update" and are dropped.
using UpdateMap = std::map<std::size_t, double>;

class GatherNetwork {
 public:
  GatherNetwork(std::size_t node_count, std::size_t pull_count,
                Topology topology, std::uint64_t seed)
      : pull_count_(pull_count), topology_(topology) {
    if (node_count < 1)
      throw config_error("GatherNetwork: need at least one node");
    if (pull_count < 1 || pull_count > node_count)
      throw config_error("GatherNetwork: pull count must satisfy 1 <= m <= N");
    if (topology.kind == Topology::Kind::aggregation_tree &&
        topology.network_nodes < 1)
      throw config_error("GatherNetwork: aggregation tree needs >= 1 network node");
    const DenseMatrix coeffs =
        build_sensing_matrix(node_count, node_count, Ensemble::gaussian, seed);
    nodes_.reserve(node_count);
    for (std::size_t i = 0; i < node_count; ++i) {
      IoTNode node;
      node.id = i;
      node.coefficient_row.assign(coeffs.row(i).begin(), coeffs.row(i).end());
      nodes_.push_back(std::move(node));
    }
  }

  std::size_t size() const { return nodes_.size(); }
  std::size_t pull_count() const { return pull_count_; }
  const Topology& topology() const { return topology_; }
  const std::vector<IoTNode>& nodes() const { return nodes_; }
  const SignalingLedger& ledger() const { return ledger_; }

  // Wakes every node and clears accumulators, updates and the round ledger.
  void reset_round() {
    for (IoTNode& node : nodes_) {
      node.accumulator = 0.0;
      node.update_value = 0.0;
      node.awake = true;
    }
    ledger_ = SignalingLedger{};
    round_updates_.clear();
    exchanged_ = false;
  }

  // Slotted D2D exchange (clique): each updater multicasts its weighted
  // replica once; every node ends up holding sum_i row_j[i] * u_i. All nodes
  // then sleep until the next round's reset.
  void run_exchange(const UpdateMap& updates) {
    if (topology_.kind != Topology::Kind::clique)
      throw topology_error("run_exchange: requires the clique topology");
    if (exchanged_ || !all_awake())
      throw protocol_error("run_exchange: round already used; reset first");
    for (const auto& [id, value] : updates)
      if (id >= nodes_.size())
        throw update_error("run_exchange: update for unknown node " +
                           std::to_string(id));
    round_updates_ = updates;
    std::erase_if(round_updates_, [](const auto& kv) { return kv.second == 0.0; });
    for (IoTNode& node : nodes_) {
      double acc = 0.0;
      for (const auto& [id, value] : round_updates_)
        acc += node.coefficient_row[id] * value;
      node.accumulator = acc;
      node.update_value = 0.0;
      node.awake = false;
    }
    for (const auto& [id, value] : round_updates_)
      nodes_[id].update_value = value;
    ledger_.d2d_multicasts += round_updates_.size();
    exchanged_ = true;
  }

  // BS pulls the accumulators of the first m node ids and recovers the
  // update vector from those nodes' coefficient rows.
  GatherResult bs_pull_and_recover(std::size_t m, const GatherSolver& solver,
                                   std::size_t expected_sparsity) {
    if (topology_.kind != Topology::Kind::clique)
      throw topology_error("bs_pull_and_recover: requires the clique topology");
    if (!exchanged_)
      throw protocol_error("bs_pull_and_recover: pull before exchange");
    if (m < 1 || m > nodes_.size())
      throw config_error("bs_pull_and_recover: need 1 <= m <= N");
    std::vector<double> y(m);
    for (std::size_t i = 0; i < m; ++i) y[i] = nodes_[i].accumulator;
    ledger_.bs_connections += m;
    return recover_updates(pull_matrix(m), MeasurementVector(std::move(y)),
                           solver, expected_sparsity);
  }

  // Aggregation-tree reporting: each active IoT sends its measurement
  // contribution to its network node (p transmissions); each network node
  // adds what it received and reports once (n_agg transmissions). The BS sums
  // the reports into y and recovers as in the pull path.
  GatherResult run_aggregation_reporting(const UpdateMap& updates,
                                         const GatherSolver& solver,
                                         std::size_t expected_sparsity) {
    if (topology_.kind != Topology::Kind::aggregation_tree)
      throw topology_error(
          "run_aggregation_reporting: requires the aggregation_tree topology");
    if (exchanged_ || !all_awake())
      throw protocol_error(
          "run_aggregation_reporting: round already used; reset first");
    for (const auto& [id, value] : updates)
      if (id >= nodes_.size())
        throw update_error("run_aggregation_reporting: update for unknown node " +
                           std::to_string(id));
    round_updates_ = updates;
    std::erase_if(round_updates_, [](const auto& kv) { return kv.second == 0.0; });

    const std::size_t m = pull_count_;
    const std::size_t n_agg = topology_.network_nodes;
    const DenseMatrix phi = pull_matrix(m);

    // Per network node partial sums, then the BS total; IoT i reports to
    // network node i mod n_agg.
    std::vector<std::vector<double>> partial(n_agg, std::vector<double>(m, 0.0));
    for (const auto& [id, value] : round_updates_) {
      auto& sum = partial[id % n_agg];
      for (std::size_t r = 0; r < m; ++r) sum[r] += phi(r, id) * value;
      nodes_[id].update_value = value;
    }
    std::vector<double> y(m, 0.0);
    for (const auto& sum : partial)
      for (std::size_t r = 0; r < m; ++r) y[r] += sum[r];

    for (IoTNode& node : nodes_) node.awake = false;
    exchanged_ = true;
    ledger_.network_node_transmissions += n_agg + round_updates_.size();
    return recover_updates(phi, MeasurementVector(std::move(y)), solver,
                           expected_sparsity);
  }

  // AR-assisted gathering round: the true data evolve as x_t = alpha * x_prev
  // + u with sparse innovations u; the sink collects m measurements of x_t
  // and recovers u from the residual y - alpha * Phi * x_hat_prev, where
  // x_hat_prev is its own previous estimate (x_prev when omitted, i.e. the
  // sink is assumed synchronized).
  struct ArRoundResult {
    std::vector<double> truth;     // x_t
    std::vector<double> estimate;  // alpha * x_hat_prev + recovered innovation
    bool exact = false;            // innovation recovery matched u
  };

  ArRoundResult ar_gather_round(const std::vector<double>& x_prev, double alpha,
                                const UpdateMap& innovations,
                                const GatherSolver& solver,
                                std::size_t expected_sparsity,
                                const std::vector<double>* x_hat_prev = nullptr) {
    if (!(std::abs(alpha) < 1.0))
      throw model_error("ar_gather_round: |alpha| must be < 1");
    if (x_prev.size() != nodes_.size())
      throw dimension_error("ar_gather_round: x_prev length must be N");
    const std::vector<double>& prev_estimate = x_hat_prev ? *x_hat_prev : x_prev;
    if (prev_estimate.size() != nodes_.size())
      throw dimension_error("ar_gather_round: x_hat_prev length must be N");
    for (const auto& [id, value] : innovations)
      if (id >= nodes_.size())
        throw update_error("ar_gather_round: innovation for unknown node " +
                           std::to_string(id));

    const std::size_t m = pull_count_;
    const DenseMatrix phi = pull_matrix(m);

    ArRoundResult out;
    out.truth.resize(nodes_.size());
    for (std::size_t i = 0; i < nodes_.size(); ++i)
      out.truth[i] = alpha * x_prev[i];
    round_updates_ = innovations;
    std::erase_if(round_updates_, [](const auto& kv) { return kv.second == 0.0; });
    for (const auto& [id, value] : round_updates_) out.truth[id] += value;

    const std::vector<double> y = matvec(phi, out.truth);
    std::vector<double> residual = matvec(phi, prev_estimate);
    for (std::size_t r = 0; r < m; ++r)
      residual[r] = y[r] - alpha * residual[r];
    ledger_.sink_transmissions += m;

    const GatherResult rec = recover_updates(
        phi, MeasurementVector(std::move(residual)), solver, expected_sparsity);
    out.estimate.resize(nodes_.size());
    for (std::size_t i = 0; i < nodes_.size(); ++i)
      out.estimate[i] = alpha * prev_estimate[i] + rec.recovered.values[i];
    out.exact = rec.exact;
    return out;
  }

 private:
  bool all_awake() const {
    return std::all_of(nodes_.begin(), nodes_.end(),
                       [](const IoTNode& n) { return n.awake; });
  }

  // First m coefficient rows; the pull set is deterministic.
  DenseMatrix pull_matrix(std::size_t m) const {
    DenseMatrix phi(m, nodes_.size());
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < nodes_.size(); ++j)
        phi(i, j) = nodes_[i].coefficient_row[j];
    return phi;
  }

  GatherResult recover_updates(const DenseMatrix& phi,
                               const MeasurementVector& y,
                               const GatherSolver& solver,
                               std::size_t expected_sparsity) const {
    const std::size_t n = nodes_.size();
    SparseSignal uhat;
    if (phi.rows() == n) {
      // Determined system: direct solve.
      uhat = SparseSignal(solve_square(phi, y.values));
    } else if (solver.kind == GatherSolverKind::omp) {
      // Let OMP run past the declared sparsity: on a noiseless instance the
      // refit zeroes any spurious atom, and the slack absorbs occasional bad
      // greedy picks that would otherwise exhaust an exact-k budget. Extra
      // budget never changes the greedy path before the early residual stop.
      const std::size_t budget = std::min<std::size_t>(
          std::max<std::size_t>(
              std::max<std::size_t>(2 * expected_sparsity, 1),
              std::max<std::size_t>(phi.rows() / 2, 1)),
          phi.rows());
      uhat = omp(phi, y, budget, 1e-9 * norm2(y.values));
    } else {
      RecoveryConfig rc = solver.recovery;
      if (rc.lambda <= 0.0)
        rc.lambda = 1e-3 * norm_inf(matvec_transposed(phi, y.values));
      if (rc.lambda == 0.0) rc.lambda = 1e-12;  // y == 0
      const SparseSignal raw =
          ista_weighted_l1(phi, y, WeightVector::uniform(n), rc).estimate;
      // Debias: least squares on the detected support.
      const double cut = solver.debias_threshold * norm_inf(raw.values);
      std::vector<std::size_t> support;
      for (std::size_t i = 0; i < n; ++i)
        if (std::abs(raw.values[i]) > cut && raw.values[i] != 0.0)
          support.push_back(i);
      std::vector<double> x(n, 0.0);
      if (!support.empty() && support.size() <= phi.rows()) {
        const LeastSquaresResult ls =
            least_squares_on_support(phi, y.values, support);
        for (std::size_t t = 0; t < support.size(); ++t)
          x[support[t]] = ls.coeffs[t];
        uhat = SparseSignal(std::move(x), std::move(support));
      } else {
        uhat = raw;
      }
    }

    GatherResult result;
    result.recovered = std::move(uhat);
    result.measurements = y.values;
    result.exact = true;
    constexpr double tol = 1e-6;
    for (std::size_t i = 0; i < n; ++i) {
      const auto it = round_updates_.find(i);
      const double truth = it == round_updates_.end() ? 0.0 : it->second;
      if (std::abs(result.recovered.values[i] - truth) > tol ||
          ((std::abs(result.recovered.values[i]) > tol) != (truth != 0.0))) {
        result.exact = false;
        break;
      }
    }
    return result;
  }

  std::vector<IoTNode> nodes_;
  std::size_t pull_count_;
  Topology topology_;
  SignalingLedger ledger_;
  UpdateMap round_updates_;
  bool exchanged_ = false;
};

inline GatherNetwork init_network(std::size_t node_count, std::size_t pull_count,
                                  Topology topology, std::uint64_t seed) {
  return GatherNetwork(node_count, pull_count, topology, seed);
}

// p distinct updaters chosen uniformly, values uniform in [lo, hi].
inline UpdateMap draw_updates(std::size_t node_count, std::size_t p, double lo,
                              double hi, std::uint64_t seed) {
  if (p > node_count)
    throw config_error("draw_updates: more updaters than nodes");
  Rng rng(seed);
  std::vector<std::size_t> ids(node_count);
  std::iota(ids.begin(), ids.end(), std::size_t{0});
  for (std::size_t i = 0; i < p; ++i) {
    const std::size_t j = i + rng.uniform_index(node_count - i);
    std::swap(ids[i], ids[j]);
  }
  UpdateMap updates;
  for (std::size_t i = 0; i < p; ++i) updates[ids[i]] = rng.uniform(lo, hi);
  return updates;
}

// Bernoulli(q) updaters, values uniform in [lo, hi].
inline UpdateMap draw_updates_bernoulli(std::size_t node_count, double q,
                                        double lo, double hi,
                                        std::uint64_t seed) {
  if (q < 0.0 || q > 1.0)
    throw config_error("draw_updates_bernoulli: q must be in [0,1]");
  Rng rng(seed);
  UpdateMap updates;
  for (std::size_t i = 0; i < node_count; ++i)
    if (rng.bernoulli(q)) updates[i] = rng.uniform(lo, hi);
  return updates;
}

// Cooperative sensing overhead: one measurement report per SU per round,
// counted as base-station connections.
inline void cooperative_overhead(std::size_t num_sus, SignalingLedger& ledger) {
  ledger.bs_connections += num_sus;
}

// Rule-of-thumb pull count m >= c * p * log(N / p); the constant is the
// caller's to choose.
inline std::size_t suggested_pull_count(std::size_t node_count,
                                        std::size_t expected_updaters,
                                        double constant) {
  if (expected_updaters == 0) return 1;
  const double m = constant * static_cast<double>(expected_updaters) *
                   std::log(static_cast<double>(node_count) /
                            static_cast<double>(expected_updaters));
  return std::clamp<std::size_t>(static_cast<std::size_t>(std::ceil(m)), 1,
                                 node_count);
}

}  // namespace sparsekit
