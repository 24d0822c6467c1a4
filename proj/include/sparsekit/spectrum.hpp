#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "sparsekit/errors.hpp"
#include "sparsekit/rng.hpp"
#include "sparsekit/signal.hpp"

namespace sparsekit {

// One contiguous run of bands sharing occupancy statistics.
struct BlockSpec {
  std::size_t first_band = 0;
  std::size_t band_count = 0;
  double occupancy_prob = 0.0;  // stationary per-band occupancy probability
  double persistence = 0.0;     // lag-1 temporal correlation, in [0, 1)
};

// Heterogeneous wideband occupancy model: blocks partition the n bands.
class WidebandModel {
 public:
  WidebandModel(std::vector<BlockSpec> blocks, double amplitude_low,
                double amplitude_high)
      : blocks_(std::move(blocks)),
        amplitude_low_(amplitude_low),
        amplitude_high_(amplitude_high) {
    if (blocks_.empty()) throw config_error("WidebandModel: no blocks");
    if (!(amplitude_low_ > 0.0) || amplitude_high_ < amplitude_low_)
      throw config_error("WidebandModel: need 0 < low <= high amplitude");
    std::size_t next = 0;
    for (const BlockSpec& b : blocks_) {
      if (b.band_count < 1)
        throw config_error("WidebandModel: block band_count must be >= 1");
      if (b.first_band != next)
        throw config_error("WidebandModel: blocks must partition 0..n-1 "
                           "contiguously; gap or overlap at band " +
                           std::to_string(next));
      if (b.occupancy_prob < 0.0 || b.occupancy_prob > 1.0)
        throw config_error("WidebandModel: occupancy_prob must be in [0,1]");
      if (b.persistence < 0.0 || b.persistence >= 1.0)
        throw config_error("WidebandModel: persistence must be in [0,1)");
      next += b.band_count;
    }
    n_ = next;
  }

  // Convenience: blocks laid out back to back in the given order.
  static WidebandModel contiguous(
      const std::vector<std::pair<std::size_t, double>>& count_prob,
      double persistence, double amplitude_low, double amplitude_high) {
    std::vector<BlockSpec> blocks;
    std::size_t first = 0;
    for (const auto& [count, prob] : count_prob) {
      blocks.push_back({first, count, prob, persistence});
      first += count;
    }
    return WidebandModel(std::move(blocks), amplitude_low, amplitude_high);
  }

  std::size_t n() const { return n_; }
  const std::vector<BlockSpec>& blocks() const { return blocks_; }
  double amplitude_low() const { return amplitude_low_; }
  double amplitude_high() const { return amplitude_high_; }

  double expected_occupancy() const {
    double k = 0.0;
    for (const BlockSpec& b : blocks_)
      k += b.occupancy_prob * static_cast<double>(b.band_count);
    return k;
  }

  // Sparse-regime assumption; advisory, callers may warn but not fail.
  bool sparse_regime() const { return expected_occupancy() < static_cast<double>(n_); }

 private:
  std::vector<BlockSpec> blocks_;
  double amplitude_low_;
  double amplitude_high_;
  std::size_t n_ = 0;
};

// Instantaneous occupancy plus the per-block occupied counts k_i.
struct OccupancySnapshot {
  std::vector<std::uint8_t> bits;
  std::vector<std::size_t> per_block_counts;

  std::size_t occupied_total() const {
    std::size_t k = 0;
    for (std::uint8_t b : bits) k += b;
    return k;
  }
};

// T consecutive snapshots and the per-block count series k_i(t).
struct OccupancyHistory {
  std::vector<OccupancySnapshot> snapshots;
  std::vector<std::vector<double>> per_block_series;  // [block][slot]

  std::size_t slots() const { return snapshots.size(); }
};

namespace detail {

inline OccupancySnapshot snapshot_from_bits(const WidebandModel& model,
                                            std::vector<std::uint8_t> bits) {
  OccupancySnapshot snap;
  snap.bits = std::move(bits);
  snap.per_block_counts.reserve(model.blocks().size());
  for (const BlockSpec& b : model.blocks()) {
    std::size_t k = 0;
    for (std::size_t i = 0; i < b.band_count; ++i)
      k += snap.bits[b.first_band + i];
    snap.per_block_counts.push_back(k);
  }
  return snap;
}

}  // namespace detail

// Each band occupied independently with its block's probability.
inline OccupancySnapshot sample_occupancy(const WidebandModel& model,
                                          std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::uint8_t> bits(model.n(), 0);
  for (const BlockSpec& b : model.blocks())
    for (std::size_t i = 0; i < b.band_count; ++i)
      bits[b.first_band + i] = rng.bernoulli(b.occupancy_prob) ? 1 : 0;
  return detail::snapshot_from_bits(model, std::move(bits));
}

// Per-band two-state Markov chain with stationary probability p and lag-1
// correlation equal to the block's persistence:
//   P(occ -> occ) = p + persistence * (1 - p)
//   P(vac -> occ) = p * (1 - persistence)
// The initial slot is drawn from the stationary distribution. Bands evolve
// one after the other over a single stream, so the result is a pure function
// of (model, T, seed).
inline OccupancyHistory evolve_history(const WidebandModel& model,
                                       std::size_t slots, std::uint64_t seed) {
  if (slots < 1) throw config_error("evolve_history: T must be >= 1");
  Rng rng(seed);
  std::vector<std::vector<std::uint8_t>> band_series(
      model.n(), std::vector<std::uint8_t>(slots, 0));
  for (const BlockSpec& b : model.blocks()) {
    const double p_stay = b.occupancy_prob +
                          b.persistence * (1.0 - b.occupancy_prob);
    const double p_enter = b.occupancy_prob * (1.0 - b.persistence);
    for (std::size_t i = 0; i < b.band_count; ++i) {
      auto& series = band_series[b.first_band + i];
      bool occ = rng.bernoulli(b.occupancy_prob);
      series[0] = occ ? 1 : 0;
      for (std::size_t t = 1; t < slots; ++t) {
        occ = rng.bernoulli(occ ? p_stay : p_enter);
        series[t] = occ ? 1 : 0;
      }
    }
  }
  OccupancyHistory history;
  history.snapshots.reserve(slots);
  for (std::size_t t = 0; t < slots; ++t) {
    std::vector<std::uint8_t> bits(model.n());
    for (std::size_t i = 0; i < model.n(); ++i) bits[i] = band_series[i][t];
    history.snapshots.push_back(
        detail::snapshot_from_bits(model, std::move(bits)));
  }
  history.per_block_series.assign(model.blocks().size(),
                                  std::vector<double>(slots, 0.0));
  for (std::size_t t = 0; t < slots; ++t)
    for (std::size_t bi = 0; bi < model.blocks().size(); ++bi)
      history.per_block_series[bi][t] =
          static_cast<double>(history.snapshots[t].per_block_counts[bi]);
  return history;
}

// Occupied bands get a magnitude uniform in the model's amplitude range with
// a random sign; vacant bands are exactly zero.
inline SparseSignal synthesize_signal(const OccupancySnapshot& snapshot,
                                      const WidebandModel& model,
                                      std::uint64_t seed) {
  if (snapshot.bits.size() != model.n())
    throw dimension_error("synthesize_signal: snapshot length mismatch");
  Rng rng(seed);
  std::vector<double> x(model.n(), 0.0);
  std::vector<std::size_t> support;
  for (std::size_t i = 0; i < model.n(); ++i) {
    if (!snapshot.bits[i]) continue;
    const double mag = rng.uniform(model.amplitude_low(), model.amplitude_high());
    x[i] = rng.bernoulli(0.5) ? mag : -mag;
    support.push_back(i);
  }
  return SparseSignal(std::move(x), std::move(support));
}

// Floor on the per-block average occupancy; 1/k is undefined at zero.
inline constexpr double kWeightEpsilon = 1e-3;

namespace detail {

inline WeightVector weights_from_block_kbar(const WidebandModel& model,
                                            const std::vector<double>& kbar) {
  std::vector<double> w(model.n(), 1.0);
  for (std::size_t bi = 0; bi < model.blocks().size(); ++bi) {
    const BlockSpec& b = model.blocks()[bi];
    const double wi = 1.0 / std::max(kbar[bi], kWeightEpsilon);
    for (std::size_t i = 0; i < b.band_count; ++i) w[b.first_band + i] = wi;
  }
  return WeightVector(std::move(w));
}

}  // namespace detail

// w_i = 1 / kbar_i with kbar_i = p_i * band_count_i (expected occupancy).
inline WeightVector block_weights(const WidebandModel& model) {
  std::vector<double> kbar;
  kbar.reserve(model.blocks().size());
  for (const BlockSpec& b : model.blocks())
    kbar.push_back(b.occupancy_prob * static_cast<double>(b.band_count));
  return detail::weights_from_block_kbar(model, kbar);
}

// w_i = 1 / kbar_i with kbar_i the time average of the block's k_i(t).
inline WeightVector block_weights(const WidebandModel& model,
                                  const OccupancyHistory& history) {
  if (history.per_block_series.size() != model.blocks().size() ||
      history.slots() == 0)
    throw missing_prediction_error("block_weights: history does not cover the model");
  std::vector<double> kbar;
  kbar.reserve(model.blocks().size());
  for (const auto& series : history.per_block_series) {
    double acc = 0.0;
    for (double v : series) acc += v;
    kbar.push_back(acc / static_cast<double>(series.size()));
  }
  return detail::weights_from_block_kbar(model, kbar);
}

// w_i = 1 / khat_i with khat_i a per-block occupancy prediction.
inline WeightVector block_weights(const WidebandModel& model,
                                  const std::vector<double>& predicted_khat) {
  if (predicted_khat.size() != model.blocks().size())
    throw missing_prediction_error(
        "block_weights: prediction missing for some block (" +
        std::to_string(predicted_khat.size()) + " of " +
        std::to_string(model.blocks().size()) + " provided)");
  for (double v : predicted_khat)
    if (!std::isfinite(v))
      throw missing_prediction_error("block_weights: non-finite prediction");
  return detail::weights_from_block_kbar(model, predicted_khat);
}

}  // namespace sparsekit
