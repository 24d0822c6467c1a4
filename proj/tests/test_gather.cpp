#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "sparsekit/gather.hpp"

using namespace sparsekit;

namespace {

const Topology kClique{Topology::Kind::clique, 0};

DenseMatrix coefficient_matrix(const GatherNetwork& net) {
  DenseMatrix m(net.size(), net.size());
  for (std::size_t i = 0; i < net.size(); ++i)
    for (std::size_t j = 0; j < net.size(); ++j)
      m(i, j) = net.nodes()[i].coefficient_row[j];
  return m;
}

}  // namespace

TEST_CASE("init_network: single node holds a 1x1 coefficient") {
  const GatherNetwork net = init_network(1, 1, kClique, 3);
  CHECK(net.size() == 1);
  CHECK(net.nodes()[0].coefficient_row.size() == 1);
  CHECK(net.nodes()[0].awake);
  CHECK_THROWS_AS(init_network(4, 5, kClique, 3), config_error);
}

TEST_CASE("init_network: same seed reproduces the coefficient assignment") {
  const GatherNetwork a = init_network(16, 8, kClique, 77);
  const GatherNetwork b = init_network(16, 8, kClique, 77);
  for (std::size_t i = 0; i < 16; ++i)
    CHECK(a.nodes()[i].coefficient_row == b.nodes()[i].coefficient_row);
}

TEST_CASE("init_network: coefficient matrix is full rank (elimination oracle)") {
  const GatherNetwork net = init_network(32, 8, kClique, 5);
  CHECK(oracle::rank(coefficient_matrix(net)) == 32);
}

TEST_CASE("run_exchange: no updates leave all accumulators zero") {
  GatherNetwork net = init_network(8, 4, kClique, 1);
  net.run_exchange({});
  for (const IoTNode& node : net.nodes()) {
    CHECK(node.accumulator == 0.0);
    CHECK_FALSE(node.awake);
  }
  CHECK(net.ledger().d2d_multicasts == 0);
}

TEST_CASE("run_exchange: a single updater scales its coefficient column") {
  GatherNetwork net = init_network(8, 4, kClique, 2);
  const DenseMatrix coeffs = coefficient_matrix(net);
  net.run_exchange({{3, 5.0}});
  for (std::size_t j = 0; j < 8; ++j)
    CHECK(net.nodes()[j].accumulator == doctest::Approx(5.0 * coeffs(j, 3)));
  CHECK(net.ledger().d2d_multicasts == 1);
}

TEST_CASE("run_exchange: accumulators equal the product oracle within 1e-12") {
  GatherNetwork net = init_network(16, 8, kClique, 9);
  const DenseMatrix coeffs = coefficient_matrix(net);
  const UpdateMap updates = draw_updates(16, 3, 1.0, 2.0, 11);
  std::vector<double> u(16, 0.0);
  for (const auto& [id, value] : updates) u[id] = value;
  net.run_exchange(updates);
  const std::vector<double> expected = oracle::product(coeffs, u);
  for (std::size_t j = 0; j < 16; ++j)
    CHECK(std::abs(net.nodes()[j].accumulator - expected[j]) <= 1e-12);
  CHECK(net.ledger().d2d_multicasts == 3);
}

TEST_CASE("run_exchange: protocol and argument errors") {
  GatherNetwork net = init_network(8, 4, kClique, 1);
  CHECK_THROWS_AS(net.run_exchange({{9, 1.0}}), update_error);
  net.run_exchange({{1, 1.0}});
  CHECK_THROWS_AS(net.run_exchange({{1, 1.0}}), protocol_error);  // asleep
  net.reset_round();
  CHECK_NOTHROW(net.run_exchange({{1, 1.0}}));
  GatherNetwork tree = init_network(8, 4, {Topology::Kind::aggregation_tree, 2}, 1);
  CHECK_THROWS_AS(tree.run_exchange({{1, 1.0}}), topology_error);
}

TEST_CASE("bs_pull: pull before exchange is a protocol error") {
  GatherNetwork net = init_network(8, 4, kClique, 1);
  GatherSolver solver;
  CHECK_THROWS_AS(net.bs_pull_and_recover(4, solver, 1), protocol_error);
}

TEST_CASE("bs_pull: no updates recover exactly to zero") {
  GatherNetwork net = init_network(12, 6, kClique, 21);
  net.run_exchange({});
  GatherSolver solver;
  const GatherResult r = net.bs_pull_and_recover(6, solver, 2);
  CHECK(r.exact);
  CHECK(r.recovered.l0_norm() == 0);
  CHECK(net.ledger().bs_connections == 6);
}

TEST_CASE("bs_pull: sparse update recovery with OMP, ledger counts m") {
  GatherNetwork net = init_network(64, 24, kClique, 31);
  const UpdateMap updates = draw_updates(64, 3, 1.0, 2.0, 32);
  net.run_exchange(updates);
  GatherSolver solver;
  const GatherResult r = net.bs_pull_and_recover(24, solver, 3);
  CHECK(r.exact);
  for (const auto& [id, value] : updates)
    CHECK(r.recovered.values[id] == doctest::Approx(value).epsilon(1e-9));
  CHECK(net.ledger().bs_connections == 24);
}

TEST_CASE("bs_pull: m = N solves the determined system regardless of p") {
  GatherNetwork net = init_network(12, 12, kClique, 41);
  const UpdateMap updates = draw_updates(12, 10, 1.0, 2.0, 42);
  net.run_exchange(updates);
  GatherSolver solver;
  const GatherResult r = net.bs_pull_and_recover(12, solver, 10);
  CHECK(r.exact);
}

TEST_CASE("bs_pull: weighted_l1 solver recovers a small instance") {
  GatherNetwork net = init_network(32, 16, kClique, 51);
  const UpdateMap updates = draw_updates(32, 2, 1.0, 2.0, 52);
  net.run_exchange(updates);
  GatherSolver solver;
  solver.kind = GatherSolverKind::weighted_l1;
  const GatherResult r = net.bs_pull_and_recover(16, solver, 2);
  CHECK(r.exact);
}

TEST_CASE("sleep invariant: every node sleeps after the exchange") {
  GatherNetwork net = init_network(10, 5, kClique, 61);
  net.run_exchange(draw_updates(10, 2, 1.0, 2.0, 62));
  for (const IoTNode& node : net.nodes()) CHECK_FALSE(node.awake);
  net.reset_round();
  for (const IoTNode& node : net.nodes()) {
    CHECK(node.awake);
    CHECK(node.accumulator == 0.0);
    CHECK(node.update_value == 0.0);
  }
}

TEST_CASE("aggregation: transmissions are n_agg + p") {
  GatherNetwork net = init_network(32, 16, {Topology::Kind::aggregation_tree, 4}, 71);
  GatherSolver solver;
  net.run_aggregation_reporting({}, solver, 1);
  CHECK(net.ledger().network_node_transmissions == 4);  // p = 0

  net.reset_round();
  const UpdateMap updates = draw_updates(32, 10, 1.0, 2.0, 72);
  net.run_aggregation_reporting(updates, solver, 10);
  CHECK(net.ledger().network_node_transmissions == 14);  // n + p = 4 + 10
}

TEST_CASE("aggregation: recovery matches clique mode on the same updates") {
  const UpdateMap updates = draw_updates(48, 3, 1.0, 2.0, 82);
  GatherSolver solver;

  GatherNetwork clique_net = init_network(48, 24, kClique, 81);
  clique_net.run_exchange(updates);
  const GatherResult via_clique = clique_net.bs_pull_and_recover(24, solver, 3);

  GatherNetwork tree_net =
      init_network(48, 24, {Topology::Kind::aggregation_tree, 6}, 81);
  const GatherResult via_tree =
      tree_net.run_aggregation_reporting(updates, solver, 3);

  CHECK(via_clique.exact);
  CHECK(via_tree.exact);
  REQUIRE(via_clique.measurements.size() == via_tree.measurements.size());
  for (std::size_t i = 0; i < via_tree.measurements.size(); ++i)
    CHECK(std::abs(via_clique.measurements[i] - via_tree.measurements[i]) <= 1e-12);
  for (std::size_t i = 0; i < 48; ++i)
    CHECK(via_clique.recovered.values[i] ==
          doctest::Approx(via_tree.recovered.values[i]).epsilon(1e-9));

  GatherNetwork wrong = init_network(8, 4, kClique, 1);
  CHECK_THROWS_AS(wrong.run_aggregation_reporting({}, solver, 1), topology_error);
}

TEST_CASE("ar round: zero innovation propagates the AR state exactly") {
  GatherNetwork net = init_network(16, 8, kClique, 91);
  std::vector<double> x_prev(16);
  Rng rng(92);
  for (double& v : x_prev) v = rng.normal();
  GatherSolver solver;
  const auto r = net.ar_gather_round(x_prev, 0.7, {}, solver, 1);
  for (std::size_t i = 0; i < 16; ++i) {
    CHECK(r.truth[i] == doctest::Approx(0.7 * x_prev[i]));
    CHECK(r.estimate[i] == doctest::Approx(0.7 * x_prev[i]).epsilon(1e-10));
  }
  CHECK(r.exact);
  CHECK(net.ledger().sink_transmissions == 8);
}

TEST_CASE("ar round: alpha = 0 reduces to plain pull recovery") {
  const UpdateMap innovations = draw_updates(32, 3, 1.0, 2.0, 101);
  GatherSolver solver;

  GatherNetwork ar_net = init_network(32, 16, kClique, 100);
  const auto ar = ar_net.ar_gather_round(std::vector<double>(32, 0.5), 0.0,
                                         innovations, solver, 3);

  GatherNetwork pull_net = init_network(32, 16, kClique, 100);
  pull_net.run_exchange(innovations);
  const GatherResult pulled = pull_net.bs_pull_and_recover(16, solver, 3);

  CHECK(ar.exact);
  for (std::size_t i = 0; i < 32; ++i) {
    const auto it = innovations.find(i);
    const double u = it == innovations.end() ? 0.0 : it->second;
    CHECK(ar.estimate[i] == doctest::Approx(u).epsilon(1e-9));
    CHECK(pulled.recovered.values[i] == doctest::Approx(u).epsilon(1e-9));
  }
}

TEST_CASE("ar round: twenty 1-sparse rounds track the truth to 1e-6") {
  GatherNetwork net = init_network(128, 40, kClique, 111);
  GatherSolver solver;
  std::vector<double> truth(128, 0.0), estimate(128, 0.0);
  for (std::uint64_t round = 0; round < 20; ++round) {
    const UpdateMap innovations = draw_updates(128, 1, 1.0, 2.0,
                                               derive_seed(112, {round}));
    net.reset_round();
    const auto r = net.ar_gather_round(truth, 0.9, innovations, solver, 1, &estimate);
    truth = r.truth;
    estimate = r.estimate;
    double err = 0.0, ref = 0.0;
    for (std::size_t i = 0; i < 128; ++i) {
      err += (estimate[i] - truth[i]) * (estimate[i] - truth[i]);
      ref += truth[i] * truth[i];
    }
    CHECK(err / ref <= 1e-6);
    CHECK(net.ledger().sink_transmissions == 40);
  }
}

TEST_CASE("ar round: |alpha| >= 1 is rejected") {
  GatherNetwork net = init_network(8, 4, kClique, 3);
  GatherSolver solver;
  CHECK_THROWS_AS(
      net.ar_gather_round(std::vector<double>(8, 0.0), 1.0, {}, solver, 1),
      model_error);
  CHECK_THROWS_AS(
      net.ar_gather_round(std::vector<double>(8, 0.0), -1.2, {}, solver, 1),
      model_error);
}

TEST_CASE("cooperative overhead: one report per SU, additive across rounds") {
  SignalingLedger ledger;
  cooperative_overhead(0, ledger);
  CHECK(ledger.bs_connections == 0);
  cooperative_overhead(5, ledger);
  CHECK(ledger.bs_connections == 5);
  cooperative_overhead(3, ledger);
  cooperative_overhead(3, ledger);
  CHECK(ledger.bs_connections == 11);
}

TEST_CASE("suggested pull count: c * p * log(N/p) guideline") {
  CHECK(suggested_pull_count(256, 8, 2.0) ==
        static_cast<std::size_t>(std::ceil(16.0 * std::log(32.0))));
  CHECK(suggested_pull_count(256, 0, 2.0) == 1);
  CHECK(suggested_pull_count(16, 8, 100.0) == 16);  // clamped to N
}

TEST_CASE("measurement consistency: exchange, tree and direct product agree") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const std::size_t n = 24, m = 10, p = 3;
    const UpdateMap updates =
        draw_updates(n, p, 1.0, 2.0, derive_seed(900, {seed, 1}));
    std::vector<double> u(n, 0.0);
    for (const auto& [id, value] : updates) u[id] = value;

    GatherNetwork clique_net =
        init_network(n, m, kClique, derive_seed(900, {seed, 2}));
    const DenseMatrix coeffs = coefficient_matrix(clique_net);
    clique_net.run_exchange(updates);

    GatherNetwork tree_net = init_network(
        n, m, {Topology::Kind::aggregation_tree, 4}, derive_seed(900, {seed, 2}));
    GatherSolver solver;
    const GatherResult tree = tree_net.run_aggregation_reporting(updates, solver, p);

    const std::vector<double> direct = oracle::product(coeffs, u);
    for (std::size_t i = 0; i < m; ++i) {
      CHECK(std::abs(clique_net.nodes()[i].accumulator - direct[i]) <= 1e-12);
      CHECK(std::abs(tree.measurements[i] - direct[i]) <= 1e-12);
    }
  }
}
