#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <vector>

#include "sparsekit/errors.hpp"
#include "sparsekit/matrix.hpp"

namespace sparsekit {

// Pivot below this is treated as a rank drop in the normal equations.
inline constexpr double kPivotTolerance = 1e-10;

struct LeastSquaresResult {
  std::vector<double> coeffs;  // one per support column, in support order
  bool rank_deficient = false;
};

namespace detail {

// Gaussian elimination on the normal equations with diagonal (column)
// pivoting. The system is consistent by construction, so zeroing the free
// variables still yields a residual-minimizing solution.
inline LeastSquaresResult solve_normal_pivoted(std::vector<double> g,
                                               std::vector<double> b,
                                               std::size_t k) {
  std::vector<std::size_t> piv(k);
  std::iota(piv.begin(), piv.end(), std::size_t{0});
  std::size_t rank = k;
  for (std::size_t s = 0; s < k; ++s) {
    std::size_t best = s;
    for (std::size_t t = s + 1; t < k; ++t)
      if (g[piv[t] * k + piv[t]] > g[piv[best] * k + piv[best]]) best = t;
    std::swap(piv[s], piv[best]);
    const double d = g[piv[s] * k + piv[s]];
    if (d < kPivotTolerance) {
      rank = s;
      break;
    }
    for (std::size_t r = s + 1; r < k; ++r) {
      const double f = g[piv[r] * k + piv[s]] / d;
      if (f == 0.0) continue;
      for (std::size_t c = s; c < k; ++c)
        g[piv[r] * k + piv[c]] -= f * g[piv[s] * k + piv[c]];
      b[piv[r]] -= f * b[piv[s]];
    }
  }
  LeastSquaresResult out;
  out.coeffs.assign(k, 0.0);
  out.rank_deficient = rank < k;
  for (std::size_t si = rank; si-- > 0;) {
    double acc = b[piv[si]];
    for (std::size_t c = si + 1; c < rank; ++c)
      acc -= g[piv[si] * k + piv[c]] * out.coeffs[piv[c]];
    out.coeffs[piv[si]] = acc / g[piv[si] * k + piv[si]];
  }
  return out;
}

}  // namespace detail

// min ||y - A_S x||_2 over the columns listed in `support`. Normal equations
// with Cholesky; falls back to pivoted elimination when a pivot drops below
// kPivotTolerance, reporting rank deficiency instead of failing.
inline LeastSquaresResult least_squares_on_support(
    const DenseMatrix& a, std::span<const double> y,
    std::span<const std::size_t> support) {
  if (y.size() != a.rows())
    throw dimension_error("least_squares_on_support: y length mismatch");
  const std::size_t k = support.size();
  LeastSquaresResult out;
  if (k == 0) return out;

  // Gram matrix and right-hand side restricted to the support.
  std::vector<double> g(k * k, 0.0);
  std::vector<double> b(k, 0.0);
  for (std::size_t p = 0; p < k; ++p) {
    for (std::size_t q = p; q < k; ++q) {
      double acc = 0.0;
      for (std::size_t i = 0; i < a.rows(); ++i)
        acc += a(i, support[p]) * a(i, support[q]);
      g[p * k + q] = acc;
      g[q * k + p] = acc;
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
      acc += a(i, support[p]) * y[i];
    b[p] = acc;
  }

  // Cholesky G = L L^T.
  std::vector<double> l(k * k, 0.0);
  bool ok = true;
  for (std::size_t i = 0; i < k && ok; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double acc = g[i * k + j];
      for (std::size_t t = 0; t < j; ++t) acc -= l[i * k + t] * l[j * k + t];
      if (i == j) {
        if (acc < kPivotTolerance) {
          ok = false;
          break;
        }
        l[i * k + i] = std::sqrt(acc);
      } else {
        l[i * k + j] = acc / l[j * k + j];
      }
    }
  }
  if (!ok) return detail::solve_normal_pivoted(std::move(g), std::move(b), k);

  // Forward then backward substitution.
  std::vector<double> z(k, 0.0);
  for (std::size_t i = 0; i < k; ++i) {
    double acc = b[i];
    for (std::size_t t = 0; t < i; ++t) acc -= l[i * k + t] * z[t];
    z[i] = acc / l[i * k + i];
  }
  out.coeffs.assign(k, 0.0);
  for (std::size_t i = k; i-- > 0;) {
    double acc = z[i];
    for (std::size_t t = i + 1; t < k; ++t) acc -= l[t * k + i] * out.coeffs[t];
    out.coeffs[i] = acc / l[i * k + i];
  }
  return out;
}

// Solves a square system by partial-pivoting elimination.
inline std::vector<double> solve_square(const DenseMatrix& a,
                                        std::span<const double> y) {
  if (a.rows() != a.cols() || y.size() != a.rows())
    throw dimension_error("solve_square: matrix must be square, y matching");
  const std::size_t n = a.rows();
  std::vector<double> m(a.entries());
  std::vector<double> b(y.begin(), y.end());
  for (std::size_t s = 0; s < n; ++s) {
    std::size_t best = s;
    for (std::size_t r = s + 1; r < n; ++r)
      if (std::abs(m[r * n + s]) > std::abs(m[best * n + s])) best = r;
    if (std::abs(m[best * n + s]) < kPivotTolerance)
      throw dimension_error("solve_square: matrix is singular");
    if (best != s) {
      for (std::size_t c = 0; c < n; ++c) std::swap(m[s * n + c], m[best * n + c]);
      std::swap(b[s], b[best]);
    }
    for (std::size_t r = s + 1; r < n; ++r) {
      const double f = m[r * n + s] / m[s * n + s];
      if (f == 0.0) continue;
      for (std::size_t c = s; c < n; ++c) m[r * n + c] -= f * m[s * n + c];
      b[r] -= f * b[s];
    }
  }
  std::vector<double> x(n, 0.0);
  for (std::size_t s = n; s-- > 0;) {
    double acc = b[s];
    for (std::size_t c = s + 1; c < n; ++c) acc -= m[s * n + c] * x[c];
    x[s] = acc / m[s * n + s];
  }
  return x;
}

// ||A^T A||_2 = sigma_max(A)^2 by power iteration with a deterministic start.
inline double spectral_norm_sq(const DenseMatrix& a, std::size_t max_iters = 300,
                               double rel_tol = 1e-12) {
  const std::size_t n = a.cols();
  std::vector<double> v(n, 1.0 / std::sqrt(static_cast<double>(n)));
  double lambda = 0.0;
  for (std::size_t it = 0; it < max_iters; ++it) {
    std::vector<double> av = matvec(a, v);
    std::vector<double> w = matvec_transposed(a, av);
    const double wn = norm2(w);
    if (wn == 0.0) return 0.0;
    const double next = dot(v, w);  // Rayleigh quotient for A^T A
    for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / wn;
    if (it > 0 && std::abs(next - lambda) <= rel_tol * std::max(1.0, next)) {
      lambda = next;
      break;
    }
    lambda = next;
  }
  return lambda;
}

}  // namespace sparsekit
