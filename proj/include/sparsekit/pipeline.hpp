#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <string>
#include <thread>
#include <vector>

#include "sparsekit/errors.hpp"
#include "sparsekit/ista.hpp"
#include "sparsekit/l0_oracle.hpp"
#include "sparsekit/matrix.hpp"
#include "sparsekit/omp.hpp"
#include "sparsekit/predict.hpp"
#include "sparsekit/rng.hpp"
#include "sparsekit/sensing.hpp"
#include "sparsekit/signal.hpp"
#include "sparsekit/spectrum.hpp"

namespace sparsekit {

struct Metrics {
  double miss_detection_rate = 0.0;
  double false_alarm_rate = 0.0;
  std::size_t support_error_count = 0;
  double nmse = 0.0;
  double wall_time_s = 0.0;
};

// Confusion-count metrics against the true occupancy. Rates use max(count, 1)
// denominators so degenerate all-vacant / all-occupied truths stay defined.
inline Metrics compute_metrics(const OccupancySnapshot& truth,
                               const std::vector<std::uint8_t>& detected,
                               const SparseSignal& x, const SparseSignal& xhat) {
  const std::size_t n = truth.bits.size();
  if (detected.size() != n || x.length() != n || xhat.length() != n)
    throw input_error("compute_metrics: length mismatch");
  std::size_t occupied = 0, vacant = 0, missed = 0, false_alarms = 0, hamming = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (truth.bits[i]) {
      ++occupied;
      if (!detected[i]) ++missed;
    } else {
      ++vacant;
      if (detected[i]) ++false_alarms;
    }
    if ((truth.bits[i] != 0) != (detected[i] != 0)) ++hamming;
  }
  Metrics m;
  m.miss_detection_rate =
      static_cast<double>(missed) / static_cast<double>(std::max<std::size_t>(occupied, 1));
  m.false_alarm_rate =
      static_cast<double>(false_alarms) / static_cast<double>(std::max<std::size_t>(vacant, 1));
  m.support_error_count = hamming;
  double err = 0.0, ref = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = xhat.values[i] - x.values[i];
    err += d * d;
    ref += x.values[i] * x.values[i];
  }
  m.nmse = ref > 0.0 ? err / ref : (err > 0.0 ? 1.0 : 0.0);
  return m;
}

struct SensingStrategy {
  enum class Kind {
    conventional_l1,
    omp,
    weighted_l1_expected,
    weighted_l1_history,
    weighted_l1_predicted,
  };
  Kind kind = Kind::conventional_l1;
  PredictorSpec predictor;  // weighted_l1_predicted only

  std::string name() const {
    switch (kind) {
      case Kind::conventional_l1: return "conventional_l1";
      case Kind::omp: return "omp";
      case Kind::weighted_l1_expected: return "weighted_l1_expected";
      case Kind::weighted_l1_history: return "weighted_l1_history";
      case Kind::weighted_l1_predicted:
        switch (predictor.kind) {
          case PredictorKind::moving_average:
            return "weighted_l1_predicted_ma" + std::to_string(predictor.window);
          case PredictorKind::linear_regression:
            return "weighted_l1_predicted_linreg" + std::to_string(predictor.window);
          case PredictorKind::ar1: return "weighted_l1_predicted_ar1";
        }
    }
    return "unknown";
  }
};

struct ExperimentConfig {
  explicit ExperimentConfig(WidebandModel m) : model(std::move(m)) {}

  WidebandModel model;
  std::vector<double> m_over_n;
  double noise_std = 0.0;
  std::vector<SensingStrategy> strategies;
  std::size_t trials = 1;
  std::uint64_t master_seed = 0;
  RecoveryConfig recovery;
  std::size_t history_length = 100;
  Ensemble ensemble = Ensemble::gaussian;
  bool use_dft_dictionary = false;
  std::size_t omp_budget = 0;           // 0: ceil of expected occupancy
  bool auto_support_threshold = true;   // tau = 3 * noise_std / sqrt(m)

  void validate() const {
    if (trials < 1) throw config_error("ExperimentConfig: trials must be >= 1");
    if (m_over_n.empty())
      throw config_error("ExperimentConfig: m_over_n grid is empty");
    for (double r : m_over_n)
      if (!(r > 0.0) || r > 1.0)
        throw config_error("ExperimentConfig: m_over_n values must be in (0,1]");
    if (noise_std < 0.0)
      throw config_error("ExperimentConfig: noise_std must be >= 0");
    if (history_length < 1)
      throw config_error("ExperimentConfig: history_length must be >= 1");
    recovery.validate();
  }
};

// Mean occupied-band power E[a^2] for magnitudes uniform on [low, high].
inline double mean_occupied_power(const WidebandModel& model) {
  const double lo = model.amplitude_low();
  const double hi = model.amplitude_high();
  return (lo * lo + lo * hi + hi * hi) / 3.0;
}

// SNR convention: per-measurement noise variance relative to the mean
// occupied-band power, with the columns of Phi*Psi normalized to unit norm.
inline double noise_std_for_snr_db(const WidebandModel& model, double snr_db) {
  return std::sqrt(mean_occupied_power(model) / std::pow(10.0, snr_db / 10.0));
}

struct TrialResult {
  std::string strategy;
  double m_over_n = 0.0;
  std::size_t trial = 0;
  Metrics metrics;
};

namespace detail {

inline OccupancyHistory history_prefix(const OccupancyHistory& h,
                                       std::size_t slots) {
  OccupancyHistory out;
  out.snapshots.assign(h.snapshots.begin(), h.snapshots.begin() + slots);
  out.per_block_series.reserve(h.per_block_series.size());
  for (const auto& s : h.per_block_series)
    out.per_block_series.emplace_back(s.begin(), s.begin() + slots);
  return out;
}

inline void normalize_columns(DenseMatrix& a) {
  for (std::size_t j = 0; j < a.cols(); ++j) {
    const double nj = column_norm(a, j);
    if (nj == 0.0) continue;
    for (std::size_t i = 0; i < a.rows(); ++i) a(i, j) /= nj;
  }
}

inline std::size_t measurement_count(double ratio, std::size_t n) {
  const auto m = static_cast<std::size_t>(
      std::llround(ratio * static_cast<double>(n)));
  return std::clamp<std::size_t>(m, 1, n);
}

}  // namespace detail

// One end-to-end sensing trial. All randomness is derived from
// (master_seed, trial_index, stage), so the occupancy, signal, matrix and
// noise are shared across strategies: the comparison is paired.
inline TrialResult run_trial(const ExperimentConfig& config,
                             const SensingStrategy& strategy, double m_over_n,
                             std::size_t trial_index) {
  config.validate();
  const std::size_t n = config.model.n();
  const std::size_t m = detail::measurement_count(m_over_n, n);
  const std::uint64_t ms = config.master_seed;

  // History of T slots plus one more: the final slot is the sensed truth,
  // so predictors forecast exactly the slot being recovered.
  const OccupancyHistory history = evolve_history(
      config.model, config.history_length + 1,
      derive_seed(ms, {trial_index, static_cast<std::uint64_t>(SeedStage::history)}));
  const OccupancySnapshot& truth = history.snapshots.back();
  const SparseSignal x = synthesize_signal(
      truth, config.model,
      derive_seed(ms, {trial_index, static_cast<std::uint64_t>(SeedStage::signal)}));

  DenseMatrix a = build_sensing_matrix(
      m, n, config.ensemble,
      derive_seed(ms, {trial_index,
                       static_cast<std::uint64_t>(SeedStage::sensing_matrix)}));
  if (config.use_dft_dictionary) a = matmul(a, build_dft_dictionary(n));
  detail::normalize_columns(a);

  const MeasurementVector y = measure(
      a, std::nullopt, x, config.noise_std,
      derive_seed(ms, {trial_index, static_cast<std::uint64_t>(SeedStage::noise)}));

  const auto start = std::chrono::steady_clock::now();
  SparseSignal xhat;
  switch (strategy.kind) {
    case SensingStrategy::Kind::omp: {
      std::size_t budget = config.omp_budget;
      if (budget == 0)
        budget = static_cast<std::size_t>(
            std::ceil(config.model.expected_occupancy()));
      budget = std::clamp<std::size_t>(budget, 1, m);
      const double tol = config.noise_std * std::sqrt(static_cast<double>(m));
      xhat = omp(a, y, budget, tol);
      break;
    }
    case SensingStrategy::Kind::conventional_l1:
      xhat = ista_weighted_l1(a, y, WeightVector::uniform(n), config.recovery)
                 .estimate;
      break;
    case SensingStrategy::Kind::weighted_l1_expected:
      xhat = ista_weighted_l1(a, y, block_weights(config.model), config.recovery)
                 .estimate;
      break;
    case SensingStrategy::Kind::weighted_l1_history: {
      const OccupancyHistory past =
          detail::history_prefix(history, config.history_length);
      xhat = ista_weighted_l1(a, y, block_weights(config.model, past),
                              config.recovery)
                 .estimate;
      break;
    }
    case SensingStrategy::Kind::weighted_l1_predicted: {
      const OccupancyHistory past =
          detail::history_prefix(history, config.history_length);
      const PredictionResult pred =
          predict_blocks(strategy.predictor, past, config.model);
      xhat = ista_weighted_l1(a, y,
                              block_weights(config.model, pred.per_block_khat),
                              config.recovery)
                 .estimate;
      break;
    }
  }
  const auto stop = std::chrono::steady_clock::now();

  const double tau = config.auto_support_threshold
                         ? 3.0 * config.noise_std / std::sqrt(static_cast<double>(m))
                         : config.recovery.support_threshold;
  const std::vector<std::uint8_t> detected = support_detect(xhat, tau);

  TrialResult result;
  result.strategy = strategy.name();
  result.m_over_n = m_over_n;
  result.trial = trial_index;
  result.metrics = compute_metrics(truth, detected, x, xhat);
  result.metrics.wall_time_s =
      std::chrono::duration<double>(stop - start).count();
  return result;
}

struct AggregateRow {
  std::string strategy;
  double m_over_n = 0.0;
  double mean_miss = 0.0;
  double se_miss = 0.0;
  double mean_fa = 0.0;
  double se_fa = 0.0;
};

struct SweepTable {
  std::vector<TrialResult> detail;      // ordered (strategy, m_over_n, trial)
  std::vector<AggregateRow> aggregate;  // ordered (strategy, m_over_n)
};

// Full factorial sweep. Trials may execute on several threads; the row order
// and every numeric result are independent of the thread count.
inline SweepTable sweep(const ExperimentConfig& config,
                        std::size_t threads = 1) {
  config.validate();
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());

  struct Cell {
    const SensingStrategy* strategy;
    double ratio;
    std::size_t trial;
  };
  std::vector<Cell> cells;
  for (const SensingStrategy& s : config.strategies)
    for (double r : config.m_over_n)
      for (std::size_t t = 0; t < config.trials; ++t)
        cells.push_back({&s, r, t});

  SweepTable table;
  table.detail.resize(cells.size());
  const auto worker = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i)
      table.detail[i] =
          run_trial(config, *cells[i].strategy, cells[i].ratio, cells[i].trial);
  };
  if (threads <= 1 || cells.size() <= 1) {
    worker(0, cells.size());
  } else {
    const std::size_t used = std::min<std::size_t>(threads, cells.size());
    std::vector<std::thread> pool;
    const std::size_t chunk = (cells.size() + used - 1) / used;
    for (std::size_t t = 0; t < used; ++t) {
      const std::size_t begin = t * chunk;
      const std::size_t end = std::min(cells.size(), begin + chunk);
      if (begin < end) pool.emplace_back(worker, begin, end);
    }
    for (std::thread& th : pool) th.join();
  }

  for (const SensingStrategy& s : config.strategies) {
    for (double r : config.m_over_n) {
      std::vector<double> miss, fa;
      for (const TrialResult& row : table.detail)
        if (row.strategy == s.name() && row.m_over_n == r) {
          miss.push_back(row.metrics.miss_detection_rate);
          fa.push_back(row.metrics.false_alarm_rate);
        }
      const auto mean_se = [](const std::vector<double>& v) {
        double mean = 0.0;
        for (double x : v) mean += x;
        mean /= static_cast<double>(v.size());
        double var = 0.0;
        for (double x : v) var += (x - mean) * (x - mean);
        const double se = v.size() > 1
                              ? std::sqrt(var / static_cast<double>(v.size() - 1) /
                                          static_cast<double>(v.size()))
                              : 0.0;
        return std::pair<double, double>(mean, se);
      };
      const auto [mm, sm] = mean_se(miss);
      const auto [mf, sf] = mean_se(fa);
      table.aggregate.push_back({s.name(), r, mm, sm, mf, sf});
    }
  }
  return table;
}

struct PhaseTransitionPoint {
  std::size_t k = 0;
  std::size_t m_star = 0;
};

struct PhaseTransitionResult {
  std::vector<PhaseTransitionPoint> points;
  double fit_c = 0.0;   // least-squares coefficient in m* ~ c * k * log(n/k)
  double fit_r2 = 0.0;
};

namespace detail {

// Standard-normal n x n master matrix; taking the first m rows extends the
// measurement set without redrawing earlier rows.
inline DenseMatrix master_gaussian(std::size_t n, std::uint64_t seed) {
  DenseMatrix a(n, n);
  Rng rng(seed);
  for (double& v : a.entries()) v = rng.normal();
  return a;
}

inline DenseMatrix take_rows(const DenseMatrix& master, std::size_t m,
                             double scale) {
  DenseMatrix a(m, master.cols());
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < master.cols(); ++j)
      a(i, j) = scale * master(i, j);
  return a;
}

// k-sparse signal with a uniformly random support and magnitudes in [1, 2].
inline SparseSignal random_k_sparse(std::size_t n, std::size_t k,
                                    std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), std::size_t{0});
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + rng.uniform_index(n - i);
    std::swap(all[i], all[j]);
  }
  std::vector<std::size_t> support(all.begin(), all.begin() + k);
  std::sort(support.begin(), support.end());
  std::vector<double> x(n, 0.0);
  for (std::size_t i : support) x[i] = rng.uniform(1.0, 2.0);
  return SparseSignal(std::move(x), std::move(support));
}

inline bool exact_support_match(const SparseSignal& xhat,
                                const std::vector<std::size_t>& truth,
                                double tau = 1e-6) {
  std::vector<std::size_t> found;
  for (std::size_t i = 0; i < xhat.length(); ++i)
    if (std::abs(xhat.values[i]) > tau) found.push_back(i);
  return found == truth;
}

}  // namespace detail

// Empirical measurement-count scaling: for each k, the smallest m at which
// noiseless OMP recovers the exact support in at least `success_threshold`
// of the trials. Instances are shared across candidate m values (nested
// matrix rows, same signals), which keeps the success curve monotone enough
// for a binary search.
inline PhaseTransitionResult phase_transition(
    std::size_t n, const std::vector<std::size_t>& k_grid, std::uint64_t seed,
    double success_threshold, std::size_t trials_per_point = 50) {
  if (!(success_threshold > 0.0) || success_threshold > 1.0)
    throw config_error("phase_transition: success threshold must be in (0,1]");
  for (std::size_t k : k_grid)
    if (k > n / 2)
      throw config_error("phase_transition: k values must be <= n/2");

  PhaseTransitionResult out;
  for (std::size_t k : k_grid) {
    if (k == 0) {
      out.points.push_back({0, 0});
      continue;
    }
    std::vector<DenseMatrix> masters;
    std::vector<SparseSignal> signals;
    for (std::size_t t = 0; t < trials_per_point; ++t) {
      masters.push_back(detail::master_gaussian(
          n, derive_seed(seed, {k, t, static_cast<std::uint64_t>(
                                          SeedStage::sensing_matrix)})));
      signals.push_back(detail::random_k_sparse(
          n, k,
          derive_seed(seed, {k, t, static_cast<std::uint64_t>(SeedStage::signal)})));
    }
    const auto success_rate = [&](std::size_t m) {
      if (m < k) return 0.0;
      std::size_t hits = 0;
      for (std::size_t t = 0; t < trials_per_point; ++t) {
        const DenseMatrix a = detail::take_rows(
            masters[t], m, 1.0 / std::sqrt(static_cast<double>(m)));
        const MeasurementVector y(matvec(a, signals[t].values));
        try {
          const SparseSignal xhat = omp(a, y, k, 1e-9 * norm2(y.values));
          hits += detail::exact_support_match(xhat, *signals[t].declared_support);
        } catch (const degenerate_support_error&) {
          // counted as a failure
        }
      }
      return static_cast<double>(hits) / static_cast<double>(trials_per_point);
    };
    std::size_t lo = 1, hi = n;
    while (lo < hi) {
      const std::size_t mid = lo + (hi - lo) / 2;
      if (success_rate(mid) >= success_threshold)
        hi = mid;
      else
        lo = mid + 1;
    }
    out.points.push_back({k, lo});
  }

  // One-parameter fit m* = c * k * log(n/k) over the k >= 1 points.
  double sgg = 0.0, sgm = 0.0, sm = 0.0;
  std::size_t count = 0;
  for (const auto& p : out.points) {
    if (p.k == 0) continue;
    const double g = static_cast<double>(p.k) *
                     std::log(static_cast<double>(n) / static_cast<double>(p.k));
    sgg += g * g;
    sgm += g * static_cast<double>(p.m_star);
    sm += static_cast<double>(p.m_star);
    ++count;
  }
  if (count > 0 && sgg > 0.0) {
    out.fit_c = sgm / sgg;
    const double mean = sm / static_cast<double>(count);
    double ss_res = 0.0, ss_tot = 0.0;
    for (const auto& p : out.points) {
      if (p.k == 0) continue;
      const double g = static_cast<double>(p.k) *
                       std::log(static_cast<double>(n) / static_cast<double>(p.k));
      const double r = static_cast<double>(p.m_star) - out.fit_c * g;
      ss_res += r * r;
      ss_tot += (static_cast<double>(p.m_star) - mean) *
                (static_cast<double>(p.m_star) - mean);
    }
    out.fit_r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : (ss_res == 0.0 ? 1.0 : 0.0);
  }
  return out;
}

struct AdaptiveResult {
  std::size_t k_hat = 0;
  std::size_t m_final = 0;
  SparseSignal estimate;
};

// Two-step measurement adjustment: probe with m0 rows, estimate the sparsity
// from the probe recovery, then extend the same matrix to
// ceil(c * k_hat * log(n / max(k_hat, 1))) rows (clamped to [m0, n]) and
// recover again. Noiseless; OMP on both steps, probe budget m0/2.
inline AdaptiveResult adaptive_measurements(const SparseSignal& x,
                                            std::size_t m0, double safety_factor,
                                            std::uint64_t seed,
                                            double detect_tau = 1e-6) {
  const std::size_t n = x.length();
  if (m0 < 1 || m0 > n)
    throw config_error("adaptive_measurements: need 1 <= m0 <= n");
  if (safety_factor <= 0.0)
    throw config_error("adaptive_measurements: safety factor must be > 0");

  const DenseMatrix master = detail::master_gaussian(n, seed);

  const DenseMatrix a0 = detail::take_rows(master, m0, 1.0);
  const MeasurementVector y0(matvec(a0, x.values));
  const std::size_t probe_budget = std::max<std::size_t>(1, m0 / 2);
  const SparseSignal probe = omp(a0, y0, probe_budget, 1e-9 * norm2(y0.values));

  std::size_t k_hat = 0;
  for (double v : probe.values) k_hat += std::abs(v) > detect_tau;

  const double target =
      safety_factor * static_cast<double>(k_hat) *
      std::log(static_cast<double>(n) /
               static_cast<double>(std::max<std::size_t>(k_hat, 1)));
  const std::size_t m_final = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::ceil(target)), m0, n);

  AdaptiveResult result;
  result.k_hat = k_hat;
  result.m_final = m_final;
  if (m_final > m0) {
    const DenseMatrix a1 = detail::take_rows(master, m_final, 1.0);
    const MeasurementVector y1(matvec(a1, x.values));
    const std::size_t budget = std::min<std::size_t>(
        std::max<std::size_t>(k_hat, 1), m_final);
    result.estimate = omp(a1, y1, budget, 1e-9 * norm2(y1.values));
  } else {
    result.estimate = probe;
  }
  return result;
}

}  // namespace sparsekit
