#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "sparsekit/errors.hpp"
#include "sparsekit/linalg.hpp"
#include "sparsekit/matrix.hpp"
#include "sparsekit/signal.hpp"

namespace sparsekit {

// Largest n the exhaustive search will accept.
inline constexpr std::size_t kL0OracleMaxDim = 20;

// Exact l0 reference: enumerates every support of size <= k in lexicographic
// order, solves least squares on each, and keeps the smallest residual.
// Lexicographic enumeration plus strict improvement makes ties resolve to the
// lexicographically smallest support. NP-hard in general; usable at test
// scale only, hence the dimension guard.
inline SparseSignal l0_oracle(const DenseMatrix& a, const MeasurementVector& y,
                              std::size_t k) {
  const std::size_t n = a.cols();
  if (n > kL0OracleMaxDim)
    throw enumeration_error("l0_oracle: n=" + std::to_string(n) +
                            " exceeds enumeration limit " +
                            std::to_string(kL0OracleMaxDim));
  if (y.length() != a.rows())
    throw dimension_error("l0_oracle: y length must equal matrix rows");
  if (k > a.rows())
    throw budget_error("l0_oracle: k must not exceed m");

  std::vector<std::size_t> best_support;
  std::vector<double> best_coeffs;
  double best_residual = norm2(y.values);  // the empty support

  std::vector<std::size_t> current;
  const auto evaluate = [&]() {
    LeastSquaresResult ls = least_squares_on_support(a, y.values, current);
    std::vector<double> r(y.values);
    for (std::size_t t = 0; t < current.size(); ++t)
      for (std::size_t i = 0; i < a.rows(); ++i)
        r[i] -= a(i, current[t]) * ls.coeffs[t];
    const double res = norm2(r);
    if (res < best_residual) {
      best_residual = res;
      best_support = current;
      best_coeffs = ls.coeffs;
    }
  };

  // Depth-first extension visits supports in lexicographic order:
  // {0}, {0,1}, ..., {0,n-1}, {1}, {1,2}, ...
  const auto recurse = [&](auto&& self, std::size_t start) -> void {
    for (std::size_t j = start; j < n; ++j) {
      current.push_back(j);
      evaluate();
      if (current.size() < k) self(self, j + 1);
      current.pop_back();
    }
  };
  if (k > 0) recurse(recurse, 0);

  std::vector<double> x(n, 0.0);
  for (std::size_t t = 0; t < best_support.size(); ++t)
    x[best_support[t]] = best_coeffs[t];
  return SparseSignal(std::move(x), std::move(best_support));
}

}  // namespace sparsekit
