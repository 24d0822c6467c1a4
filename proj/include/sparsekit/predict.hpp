#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "sparsekit/errors.hpp"
#include "sparsekit/spectrum.hpp"

namespace sparsekit {

enum class PredictorKind { moving_average, linear_regression, ar1 };

struct PredictorSpec {
  PredictorKind kind = PredictorKind::ar1;
  std::size_t window = 10;  // moving_average / linear_regression only

  std::size_t min_history() const {
    switch (kind) {
      case PredictorKind::moving_average: return 1;
      case PredictorKind::linear_regression: return 2;
      case PredictorKind::ar1: return 3;
    }
    return 1;
  }
};

// Arithmetic mean of the last min(window, T) values.
inline double predict_ma(std::span<const double> series, std::size_t window) {
  if (window < 1) throw config_error("predict_ma: window must be >= 1");
  if (series.empty())
    throw insufficient_history_error("predict_ma: empty series");
  const std::size_t w = std::min(window, series.size());
  double acc = 0.0;
  for (std::size_t t = series.size() - w; t < series.size(); ++t)
    acc += series[t];
  return acc / static_cast<double>(w);
}

// Ordinary least-squares line over the last min(window, T) points, evaluated
// one slot past the end of the series.
inline double predict_linreg(std::span<const double> series,
                             std::size_t window) {
  if (window < 2) throw config_error("predict_linreg: window must be >= 2");
  const std::size_t w = std::min(window, series.size());
  if (w < 2)
    throw insufficient_history_error(
        "predict_linreg: need at least 2 points after truncation");
  // Local abscissa 0..w-1; the next slot sits at w.
  const std::size_t base = series.size() - w;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t t = 0; t < w; ++t) {
    const double x = static_cast<double>(t);
    const double y = series[base + t];
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double denom = static_cast<double>(w) * sxx - sx * sx;
  const double slope = (static_cast<double>(w) * sxy - sx * sy) / denom;
  const double intercept = (sy - slope * sx) / static_cast<double>(w);
  return intercept + slope * static_cast<double>(w);
}

struct Ar1Fit {
  double mean = 0.0;
  double phi = 0.0;
  double residual_variance = 0.0;
};

// Sample-moment AR(1) fit. Both the variance and the lag-1 autocovariance
// divide by T (the biased estimator), which keeps |phi| <= 1 on finite data.
// phi is defined as 0 when the series is (numerically) constant.
inline Ar1Fit ar1_fit(std::span<const double> series) {
  if (series.size() < 3)
    throw insufficient_history_error("ar1_fit: need at least 3 slots");
  const double t_count = static_cast<double>(series.size());
  double mean = 0.0;
  for (double v : series) mean += v;
  mean /= t_count;
  double variance = 0.0;
  for (double v : series) variance += (v - mean) * (v - mean);
  variance /= t_count;
  double autocov = 0.0;
  for (std::size_t t = 0; t + 1 < series.size(); ++t)
    autocov += (series[t] - mean) * (series[t + 1] - mean);
  autocov /= t_count;
  Ar1Fit fit;
  fit.mean = mean;
  fit.phi = variance < 1e-12 ? 0.0 : autocov / variance;
  fit.residual_variance = variance * (1.0 - fit.phi * fit.phi);
  return fit;
}

// mu + phi * (last - mu), from the sample-moment fit above.
inline double predict_ar1(std::span<const double> series) {
  const Ar1Fit fit = ar1_fit(series);
  return fit.mean + fit.phi * (series.back() - fit.mean);
}

struct PredictionResult {
  std::vector<double> per_block_khat;        // clamped to [0, band_count]
  std::vector<double> fit_residual_variance;
};

// Next-slot occupancy prediction per block, clamped to the physical range
// [0, band_count] so the 1/khat weights stay meaningful.
inline PredictionResult predict_blocks(const PredictorSpec& spec,
                                       const OccupancyHistory& history,
                                       const WidebandModel& model) {
  if (history.per_block_series.size() != model.blocks().size())
    throw missing_prediction_error("predict_blocks: history/model mismatch");
  PredictionResult out;
  for (std::size_t bi = 0; bi < model.blocks().size(); ++bi) {
    const std::vector<double>& series = history.per_block_series[bi];
    double khat = 0.0;
    double resid_var = 0.0;
    switch (spec.kind) {
      case PredictorKind::moving_average: {
        khat = predict_ma(series, spec.window);
        const std::size_t w = std::min(spec.window, series.size());
        for (std::size_t t = series.size() - w; t < series.size(); ++t)
          resid_var += (series[t] - khat) * (series[t] - khat);
        resid_var /= static_cast<double>(w);
        break;
      }
      case PredictorKind::linear_regression: {
        khat = predict_linreg(series, spec.window);
        const std::size_t w = std::min(spec.window, series.size());
        const double mean = predict_ma(series, w);
        for (std::size_t t = series.size() - w; t < series.size(); ++t)
          resid_var += (series[t] - mean) * (series[t] - mean);
        resid_var /= static_cast<double>(w);
        break;
      }
      case PredictorKind::ar1: {
        const Ar1Fit fit = ar1_fit(series);
        khat = fit.mean + fit.phi * (series.back() - fit.mean);
        resid_var = fit.residual_variance;
        break;
      }
    }
    const double cap = static_cast<double>(model.blocks()[bi].band_count);
    out.per_block_khat.push_back(std::clamp(khat, 0.0, cap));
    out.fit_residual_variance.push_back(resid_var);
  }
  return out;
}

}  // namespace sparsekit
