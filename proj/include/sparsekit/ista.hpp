#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "sparsekit/errors.hpp"
#include "sparsekit/linalg.hpp"
#include "sparsekit/matrix.hpp"
#include "sparsekit/signal.hpp"

namespace sparsekit {

enum class StepSizePolicy { fixed, inverse_spectral_norm };

// Solver controls shared by the l1 path and support detection.
struct RecoveryConfig {
  std::size_t max_iterations = 500;
  double residual_tolerance = 1e-9;  // stop when the objective decrease drops below
  StepSizePolicy step_policy = StepSizePolicy::inverse_spectral_norm;
  double fixed_step = 0.0;           // used only under the fixed policy
  double lambda = 0.0;
  double support_threshold = 0.0;    // tau for support_detect

  void validate() const {
    if (max_iterations < 1)
      throw config_error("RecoveryConfig: max_iterations must be >= 1");
    if (residual_tolerance < 0.0)
      throw config_error("RecoveryConfig: residual_tolerance must be >= 0");
    if (lambda < 0.0) throw config_error("RecoveryConfig: lambda must be >= 0");
    if (support_threshold < 0.0)
      throw config_error("RecoveryConfig: support_threshold must be >= 0");
    if (step_policy == StepSizePolicy::fixed && fixed_step <= 0.0)
      throw config_error("RecoveryConfig: fixed step must be > 0");
  }
};

struct IstaResult {
  SparseSignal estimate;
  std::vector<double> objectives;  // objective value before and after each iteration
  std::size_t iterations = 0;
  double step = 0.0;
};

inline double soft_threshold(double v, double t) {
  if (v > t) return v - t;
  if (v < -t) return v + t;
  return 0.0;
}

// Minimizes 0.5 ||y - A x||^2 + lambda * sum_i w_i |x_i| by gradient steps
// plus per-coordinate soft thresholding. With a step no larger than
// 1/||A^T A||_2 the objective is non-increasing at every iteration.
inline IstaResult ista_weighted_l1(const DenseMatrix& a,
                                   const MeasurementVector& y,
                                   const WeightVector& w,
                                   const RecoveryConfig& config) {
  config.validate();
  if (y.length() != a.rows())
    throw dimension_error("ista_weighted_l1: y length must equal matrix rows");
  if (w.length() != a.cols())
    throw dimension_error("ista_weighted_l1: weight length must equal matrix cols");
  if (!all_finite(a.entries()) || !all_finite(y.values) ||
      !all_finite(w.weights))
    throw input_error("ista_weighted_l1: non-finite entries in inputs");

  const std::size_t n = a.cols();
  double step;
  if (config.step_policy == StepSizePolicy::fixed) {
    step = config.fixed_step;
  } else {
    const double lip = spectral_norm_sq(a);
    // Small inflation keeps the step strictly below 1/L despite the power
    // iteration's downward bias.
    step = lip > 0.0 ? 1.0 / (lip * (1.0 + 1e-6)) : 1.0;
  }

  // Per-coordinate penalty, computed once so that scaling lambda and scaling
  // the weights by the same factor give bitwise-identical iterates.
  std::vector<double> penalty(n);
  for (std::size_t i = 0; i < n; ++i) penalty[i] = config.lambda * w.weights[i];

  std::vector<double> x(n, 0.0);
  const auto objective = [&](const std::vector<double>& xv) {
    std::vector<double> ax = matvec(a, xv);
    double quad = 0.0;
    for (std::size_t i = 0; i < ax.size(); ++i) {
      const double d = y.values[i] - ax[i];
      quad += d * d;
    }
    double l1 = 0.0;
    for (std::size_t i = 0; i < n; ++i) l1 += penalty[i] * std::abs(xv[i]);
    return 0.5 * quad + l1;
  };

  IstaResult out;
  out.step = step;
  out.objectives.push_back(objective(x));

  for (std::size_t it = 0; it < config.max_iterations; ++it) {
    std::vector<double> ax = matvec(a, x);
    for (std::size_t i = 0; i < ax.size(); ++i) ax[i] -= y.values[i];
    std::vector<double> grad = matvec_transposed(a, ax);
    for (std::size_t i = 0; i < n; ++i)
      x[i] = soft_threshold(x[i] - step * grad[i], step * penalty[i]);

    out.objectives.push_back(objective(x));
    out.iterations = it + 1;
    const std::size_t t = out.objectives.size();
    if (out.objectives[t - 2] - out.objectives[t - 1] <
        config.residual_tolerance)
      break;
  }

  std::vector<std::size_t> support;
  for (std::size_t i = 0; i < n; ++i)
    if (x[i] != 0.0) support.push_back(i);
  out.estimate = SparseSignal(std::move(x), std::move(support));
  return out;
}

}  // namespace sparsekit
