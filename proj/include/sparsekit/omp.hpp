#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "sparsekit/errors.hpp"
#include "sparsekit/linalg.hpp"
#include "sparsekit/matrix.hpp"
#include "sparsekit/signal.hpp"

namespace sparsekit {

// Orthogonal matching pursuit: greedily add the column with the largest
// normalized correlation to the residual, refit by least squares on the
// accumulated support. Stops at the sparsity budget, at the residual
// tolerance, or when no column correlates with the residual. Atoms whose
// final coefficient is negligible relative to the largest one are pruned
// from the declared support; on a noiseless instance an early wrong pick
// ends up with an exactly-zero coefficient once the true atoms are in.
inline SparseSignal omp(const DenseMatrix& a, const MeasurementVector& y,
                        std::size_t sparsity_budget,
                        double residual_tolerance) {
  if (y.length() != a.rows())
    throw dimension_error("omp: y length must equal matrix rows");
  if (sparsity_budget > a.rows())
    throw budget_error("omp: sparsity budget " +
                       std::to_string(sparsity_budget) + " exceeds m=" +
                       std::to_string(a.rows()));
  if (residual_tolerance < 0.0)
    throw config_error("omp: residual tolerance must be >= 0");

  const std::size_t n = a.cols();
  std::vector<double> col_norm(n);
  for (std::size_t j = 0; j < n; ++j) col_norm[j] = column_norm(a, j);

  std::vector<std::size_t> support;
  std::vector<double> coeffs;
  std::vector<double> residual(y.values);
  std::vector<bool> selected(n, false);

  while (norm2(residual) > residual_tolerance &&
         support.size() < sparsity_budget) {
    std::size_t best = n;
    double best_corr = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (selected[j] || col_norm[j] == 0.0) continue;
      double c = 0.0;
      for (std::size_t i = 0; i < a.rows(); ++i) c += a(i, j) * residual[i];
      c = std::abs(c) / col_norm[j];
      if (c > best_corr) {
        best_corr = c;
        best = j;
      }
    }
    if (best == n) break;  // residual orthogonal to every remaining column
    selected[best] = true;
    support.push_back(best);

    LeastSquaresResult ls = least_squares_on_support(a, y.values, support);
    if (ls.rank_deficient) {
      std::vector<std::size_t> s = support;
      std::sort(s.begin(), s.end());
      std::string what = "omp: rank-deficient least squares on support {";
      for (std::size_t t = 0; t < s.size(); ++t)
        what += (t ? ", " : "") + std::to_string(s[t]);
      what += "}";
      throw degenerate_support_error(what, std::move(s));
    }
    coeffs = std::move(ls.coeffs);

    residual = y.values;
    for (std::size_t t = 0; t < support.size(); ++t)
      for (std::size_t i = 0; i < a.rows(); ++i)
        residual[i] -= a(i, support[t]) * coeffs[t];
  }

  double peak = 0.0;
  for (double c : coeffs) peak = std::max(peak, std::abs(c));
  std::vector<double> x(n, 0.0);
  std::vector<std::size_t> pruned;
  for (std::size_t t = 0; t < support.size(); ++t) {
    if (std::abs(coeffs[t]) <= 1e-10 * peak) continue;
    x[support[t]] = coeffs[t];
    pruned.push_back(support[t]);
  }
  return SparseSignal(std::move(x), std::move(pruned));
}

}  // namespace sparsekit
