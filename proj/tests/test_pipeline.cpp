#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "sparsekit/pipeline.hpp"
#include "sparsekit/runner.hpp"

using namespace sparsekit;

namespace {

WidebandModel small_model(double p = 0.2, std::size_t n = 16,
                          double persistence = 0.0) {
  return WidebandModel({{0, n, p, persistence}}, 1.0, 2.0);
}

OccupancySnapshot snapshot_from(const std::vector<std::uint8_t>& bits) {
  OccupancySnapshot snap;
  snap.bits = bits;
  std::size_t k = 0;
  for (auto b : bits) k += b;
  snap.per_block_counts = {k};
  return snap;
}

}  // namespace

TEST_CASE("metrics: perfect detection") {
  const auto truth = snapshot_from({1, 0, 1, 0});
  const SparseSignal x(std::vector<double>{1.0, 0.0, 2.0, 0.0});
  const Metrics m = compute_metrics(truth, {1, 0, 1, 0}, x, x);
  CHECK(m.miss_detection_rate == 0.0);
  CHECK(m.false_alarm_rate == 0.0);
  CHECK(m.support_error_count == 0);
  CHECK(m.nmse == 0.0);
}

TEST_CASE("metrics: all-vacant detection misses everything occupied") {
  const auto truth = snapshot_from({1, 1, 1, 1, 0, 0});
  const SparseSignal x(std::vector<double>{1, 1, 1, 1, 0, 0});
  const Metrics m =
      compute_metrics(truth, {0, 0, 0, 0, 0, 0}, x, SparseSignal::zeros(6));
  CHECK(m.miss_detection_rate == 1.0);
  CHECK(m.false_alarm_rate == 0.0);
  CHECK(m.nmse == doctest::Approx(1.0));
}

TEST_CASE("metrics: mixed confusion counts") {
  const auto truth = snapshot_from({1, 0, 1, 0});
  const SparseSignal x(std::vector<double>{1, 0, 1, 0});
  const SparseSignal xhat(std::vector<double>{1, 1, 0, 0});
  const Metrics m = compute_metrics(truth, {1, 1, 0, 0}, x, xhat);
  CHECK(m.miss_detection_rate == doctest::Approx(0.5));
  CHECK(m.false_alarm_rate == doctest::Approx(0.5));
  CHECK(m.support_error_count == 2);
}

TEST_CASE("metrics: confusion identity miss*occ + correct = occ") {
  Rng rng(606);
  for (int rep = 0; rep < 30; ++rep) {
    const std::size_t n = 12;
    std::vector<std::uint8_t> truth_bits(n), detected(n);
    for (std::size_t i = 0; i < n; ++i) {
      truth_bits[i] = rng.bernoulli(0.4);
      detected[i] = rng.bernoulli(0.5);
    }
    const auto truth = snapshot_from(truth_bits);
    std::vector<double> xv(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) xv[i] = truth_bits[i] ? 1.0 : 0.0;
    const SparseSignal x(xv);
    const Metrics m = compute_metrics(truth, detected, x, x);
    std::size_t occ = 0, correct = 0;
    for (std::size_t i = 0; i < n; ++i) {
      occ += truth_bits[i];
      correct += truth_bits[i] && detected[i];
    }
    const double lhs = m.miss_detection_rate *
                           static_cast<double>(std::max<std::size_t>(occ, 1)) +
                       static_cast<double>(correct);
    CHECK(lhs == doctest::Approx(static_cast<double>(occ)));
  }
}

TEST_CASE("metrics: nmse conventions for the zero signal") {
  const auto truth = snapshot_from({0, 0});
  const SparseSignal zero = SparseSignal::zeros(2);
  CHECK(compute_metrics(truth, {0, 0}, zero, zero).nmse == 0.0);
  const SparseSignal spurious(std::vector<double>{0.5, 0.0});
  CHECK(compute_metrics(truth, {1, 0}, zero, spurious).nmse == 1.0);
  CHECK_THROWS_AS(compute_metrics(truth, {0, 0, 0}, zero, zero), input_error);
}

TEST_CASE("run_trial: fully determined noiseless system recovers exactly") {
  ExperimentConfig config(small_model(0.3, 16));
  config.m_over_n = {1.0};
  config.noise_std = 0.0;
  config.trials = 1;
  config.master_seed = 9001;
  config.history_length = 4;
  config.recovery.lambda = 1e-12;
  config.recovery.max_iterations = 40000;
  config.recovery.residual_tolerance = 0.0;
  config.strategies = {{SensingStrategy::Kind::conventional_l1, {}}};
  const TrialResult r =
      run_trial(config, config.strategies[0], 1.0, 0);
  CHECK(r.metrics.nmse <= 1e-6);
}

TEST_CASE("run_trial: all-vacant model has zero miss rate by convention") {
  ExperimentConfig config(small_model(0.0, 12));
  config.m_over_n = {0.5};
  config.noise_std = 0.0;
  config.trials = 1;
  config.recovery.lambda = 0.1;
  config.strategies = {{SensingStrategy::Kind::conventional_l1, {}}};
  const TrialResult r = run_trial(config, config.strategies[0], 0.5, 0);
  CHECK(r.metrics.miss_detection_rate == 0.0);
  CHECK(r.metrics.nmse == 0.0);
}

TEST_CASE("run_trial: identical arguments reproduce the result bitwise") {
  ExperimentConfig config(small_model(0.25, 24));
  config.m_over_n = {0.5};
  config.noise_std = 0.2;
  config.trials = 1;
  config.master_seed = 404;
  config.recovery.lambda = 0.3;
  config.strategies = {{SensingStrategy::Kind::weighted_l1_expected, {}}};
  const TrialResult a = run_trial(config, config.strategies[0], 0.5, 3);
  const TrialResult b = run_trial(config, config.strategies[0], 0.5, 3);
  CHECK(a.metrics.miss_detection_rate == b.metrics.miss_detection_rate);
  CHECK(a.metrics.false_alarm_rate == b.metrics.false_alarm_rate);
  CHECK(a.metrics.nmse == b.metrics.nmse);
}

TEST_CASE("run_trial: omp strategy runs with the auto budget") {
  ExperimentConfig config(small_model(0.2, 20));
  config.m_over_n = {0.6};
  config.noise_std = 0.0;
  config.trials = 1;
  config.strategies = {{SensingStrategy::Kind::omp, {}}};
  const TrialResult r = run_trial(config, config.strategies[0], 0.6, 1);
  CHECK(r.metrics.nmse >= 0.0);
  CHECK(r.strategy == "omp");
}

TEST_CASE("sweep: one cell gives one detail row and one aggregate row") {
  ExperimentConfig config(small_model());
  config.m_over_n = {0.5};
  config.noise_std = 0.1;
  config.trials = 1;
  config.recovery.lambda = 0.2;
  config.strategies = {{SensingStrategy::Kind::conventional_l1, {}}};
  const SweepTable table = sweep(config);
  CHECK(table.detail.size() == 1);
  CHECK(table.aggregate.size() == 1);
  CHECK(table.aggregate[0].se_miss == 0.0);
}

TEST_CASE("sweep: aggregate of all-zero misses is zero") {
  ExperimentConfig config(small_model(0.0, 8));
  config.m_over_n = {1.0};
  config.noise_std = 0.0;
  config.trials = 5;
  config.recovery.lambda = 0.1;
  config.strategies = {{SensingStrategy::Kind::conventional_l1, {}}};
  const SweepTable table = sweep(config);
  CHECK(table.aggregate[0].mean_miss == 0.0);
}

TEST_CASE("sweep: row order and values independent of the thread count") {
  ExperimentConfig config(small_model(0.3, 24));
  config.m_over_n = {0.4, 0.7};
  config.noise_std = 0.15;
  config.trials = 4;
  config.master_seed = 77;
  config.recovery.lambda = 0.25;
  config.strategies = {{SensingStrategy::Kind::conventional_l1, {}},
                       {SensingStrategy::Kind::weighted_l1_expected, {}}};
  const SweepCsv a = run_sense_sweep(config, 1);
  const SweepCsv b = run_sense_sweep(config, 3);
  CHECK(a.detail.rows == b.detail.rows);
  CHECK(a.aggregate.rows == b.aggregate.rows);
  // (strategy, m_over_n, trial) ordering
  CHECK(a.detail.rows[0][0] == "conventional_l1");
  CHECK(a.detail.rows.size() == 2 * 2 * 4);
}

TEST_CASE("strategy reduction: homogeneous expected weights equal a rescaled lambda") {
  const WidebandModel model(
      {{0, 8, 0.2, 0.0}, {8, 8, 0.2, 0.0}, {16, 8, 0.2, 0.0}}, 1.0, 2.0);
  const WeightVector w = block_weights(model);
  const double constant = w.weights[0];
  for (double v : w.weights) CHECK(v == constant);

  const DenseMatrix a = build_sensing_matrix(12, 24, Ensemble::gaussian, 31);
  Rng rng(32);
  std::vector<double> yv(12);
  for (double& v : yv) v = rng.normal();
  const MeasurementVector y(yv);
  RecoveryConfig base;
  base.lambda = 0.2;
  base.max_iterations = 60;
  base.residual_tolerance = 0.0;
  RecoveryConfig rescaled = base;
  rescaled.lambda = base.lambda * constant;
  const IstaResult weighted = ista_weighted_l1(a, y, w, base);
  const IstaResult conventional =
      ista_weighted_l1(a, y, WeightVector::uniform(24), rescaled);
  CHECK(weighted.estimate.values == conventional.estimate.values);
}

TEST_CASE("phase transition: k = 0 needs no measurements") {
  const PhaseTransitionResult r = phase_transition(32, {0}, 5, 0.9, 10);
  REQUIRE(r.points.size() == 1);
  CHECK(r.points[0].m_star == 0);
}

TEST_CASE("phase transition: m* is monotone and bounded by n on a small grid") {
  const PhaseTransitionResult r = phase_transition(32, {1, 2, 4}, 6, 0.9, 20);
  REQUIRE(r.points.size() == 3);
  CHECK(r.points[0].m_star <= r.points[1].m_star);
  CHECK(r.points[1].m_star <= r.points[2].m_star);
  for (const auto& p : r.points) CHECK(p.m_star <= 32);
  CHECK(r.fit_c > 0.0);
  CHECK_THROWS_AS(phase_transition(32, {17}, 1, 0.9, 10), config_error);
}

TEST_CASE("adaptive measurements: zero signal keeps the probe budget") {
  const SparseSignal x = SparseSignal::zeros(64);
  const AdaptiveResult r = adaptive_measurements(x, 10, 2.0, 42);
  CHECK(r.k_hat == 0);
  CHECK(r.m_final == 10);
  CHECK(r.estimate.l0_norm() == 0);
}

TEST_CASE("adaptive measurements: m0 = n clamps to a single step") {
  const SparseSignal x = detail::random_k_sparse(32, 4, 9);
  const AdaptiveResult r = adaptive_measurements(x, 32, 5.0, 43);
  CHECK(r.m_final == 32);
}

TEST_CASE("adaptive measurements: second step beats the fixed-m0 probe") {
  // Paired comparison: safety factor ~0 collapses to the probe-only scheme.
  const std::size_t n = 128, k = 6, m0 = 16;
  int adaptive_hits = 0, fixed_hits = 0;
  const int seeds = 100;
  for (int s = 0; s < seeds; ++s) {
    const SparseSignal x = detail::random_k_sparse(
        n, k, derive_seed(800, {static_cast<std::uint64_t>(s), 2}));
    const std::uint64_t mseed = derive_seed(800, {static_cast<std::uint64_t>(s), 3});
    const AdaptiveResult two_step = adaptive_measurements(x, m0, 2.0, mseed);
    const AdaptiveResult probe_only = adaptive_measurements(x, m0, 1e-9, mseed);
    adaptive_hits +=
        detail::exact_support_match(two_step.estimate, *x.declared_support);
    fixed_hits +=
        detail::exact_support_match(probe_only.estimate, *x.declared_support);
    CHECK(two_step.m_final >= m0);
    CHECK(two_step.m_final <= n);
  }
  CHECK(adaptive_hits >= fixed_hits);
  CHECK(adaptive_hits > 0);
}

TEST_CASE("run_trial: rademacher ensemble and history weights run end to end") {
  ExperimentConfig config(small_model(0.25, 24, 0.6));
  config.m_over_n = {0.5};
  config.noise_std = 0.1;
  config.trials = 1;
  config.master_seed = 52;
  config.history_length = 30;
  config.ensemble = Ensemble::rademacher;
  config.recovery.lambda = 0.2;
  config.strategies = {{SensingStrategy::Kind::weighted_l1_history, {}}};
  const TrialResult r = run_trial(config, config.strategies[0], 0.5, 0);
  CHECK(r.strategy == "weighted_l1_history");
  CHECK(r.metrics.miss_detection_rate >= 0.0);
  CHECK(r.metrics.miss_detection_rate <= 1.0);
  CHECK(std::isfinite(r.metrics.nmse));
}

TEST_CASE("run_trial: dft dictionary path recovers a frequency-sparse signal") {
  ExperimentConfig config(small_model(0.15, 24));
  config.m_over_n = {1.0};
  config.noise_std = 0.0;
  config.trials = 1;
  config.master_seed = 15;
  config.use_dft_dictionary = true;
  config.recovery.lambda = 1e-10;
  config.recovery.max_iterations = 200000;
  config.recovery.residual_tolerance = 0.0;
  config.strategies = {{SensingStrategy::Kind::conventional_l1, {}}};
  const TrialResult r = run_trial(config, config.strategies[0], 1.0, 0);
  CHECK(r.metrics.nmse <= 1e-5);
}

TEST_CASE("adaptive measurements: bad arguments are rejected") {
  const SparseSignal x = SparseSignal::zeros(16);
  CHECK_THROWS_AS(adaptive_measurements(x, 0, 2.0, 1), config_error);
  CHECK_THROWS_AS(adaptive_measurements(x, 17, 2.0, 1), config_error);
  CHECK_THROWS_AS(adaptive_measurements(x, 4, 0.0, 1), config_error);
}

TEST_CASE("recovery config: invariants are validated") {
  RecoveryConfig config;
  config.max_iterations = 0;
  CHECK_THROWS_AS(config.validate(), config_error);
  config = RecoveryConfig{};
  config.residual_tolerance = -1.0;
  CHECK_THROWS_AS(config.validate(), config_error);
  config = RecoveryConfig{};
  config.lambda = -0.5;
  CHECK_THROWS_AS(config.validate(), config_error);
}

TEST_CASE("snr convention: 10 dB with amplitudes [1,2]") {
  const WidebandModel model({{0, 8, 0.2, 0.0}}, 1.0, 2.0);
  CHECK(mean_occupied_power(model) == doctest::Approx(7.0 / 3.0));
  CHECK(noise_std_for_snr_db(model, 10.0) ==
        doctest::Approx(std::sqrt(7.0 / 30.0)));
}
