#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sparsekit/errors.hpp"

namespace sparsekit {

// Spectrum occupancy vector (or any recovery unknown). When a support is
// declared, every entry outside it is exactly zero.
struct SparseSignal {
  std::vector<double> values;
  std::optional<std::vector<std::size_t>> declared_support;  // sorted ascending

  SparseSignal() = default;

  explicit SparseSignal(std::vector<double> v) : values(std::move(v)) {}

  SparseSignal(std::vector<double> v, std::vector<std::size_t> support)
      : values(std::move(v)), declared_support(std::move(support)) {
    std::sort(declared_support->begin(), declared_support->end());
    std::vector<bool> in(values.size(), false);
    for (std::size_t i : *declared_support) {
      if (i >= values.size())
        throw dimension_error("SparseSignal: support index out of range");
      in[i] = true;
    }
    for (std::size_t i = 0; i < values.size(); ++i)
      if (!in[i] && values[i] != 0.0)
        throw input_error("SparseSignal: nonzero value outside declared support at index " +
                          std::to_string(i));
  }

  static SparseSignal zeros(std::size_t n) {
    return SparseSignal(std::vector<double>(n, 0.0), {});
  }

  std::size_t length() const { return values.size(); }

  std::size_t l0_norm() const {
    std::size_t k = 0;
    for (double v : values) k += v != 0.0;
    return k;
  }
};

// Compressed observations y.
struct MeasurementVector {
  std::vector<double> values;

  MeasurementVector() = default;
  explicit MeasurementVector(std::vector<double> v) : values(std::move(v)) {}

  std::size_t length() const { return values.size(); }
};

// Per-band l1 penalties w (w_i > 0, finite).
struct WeightVector {
  std::vector<double> weights;

  WeightVector() = default;

  explicit WeightVector(std::vector<double> w) : weights(std::move(w)) {
    for (double x : weights)
      if (!(x > 0.0) || !std::isfinite(x))
        throw input_error("WeightVector: weights must be positive and finite");
  }

  static WeightVector uniform(std::size_t n) {
    return WeightVector(std::vector<double>(n, 1.0));
  }

  std::size_t length() const { return weights.size(); }
};

// Band i is declared occupied iff |x_i| > tau, strictly.
inline std::vector<std::uint8_t> support_detect(const SparseSignal& x,
                                                double tau) {
  if (tau < 0.0) throw config_error("support_detect: tau must be >= 0");
  std::vector<std::uint8_t> occupied(x.length(), 0);
  for (std::size_t i = 0; i < x.length(); ++i)
    occupied[i] = std::abs(x.values[i]) > tau ? 1 : 0;
  return occupied;
}

}  // namespace sparsekit
