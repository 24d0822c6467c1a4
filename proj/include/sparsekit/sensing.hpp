#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>

#include "sparsekit/errors.hpp"
#include "sparsekit/matrix.hpp"
#include "sparsekit/rng.hpp"
#include "sparsekit/signal.hpp"

namespace sparsekit {

enum class Ensemble { gaussian, rademacher };

// m x n random projection. Gaussian entries are N(0, 1/m); rademacher entries
// are +-1/sqrt(m). Entries are drawn row-major, so the first m0 rows of a
// (m, n) matrix equal the full rows of the (m0, n) matrix only when m == m0;
// row extension is done by generating once at the larger size.
inline DenseMatrix build_sensing_matrix(std::size_t m, std::size_t n,
                                        Ensemble ensemble, std::uint64_t seed) {
  if (m == 0 || n == 0 || m > n)
    throw dimension_error("build_sensing_matrix: need 1 <= m <= n, got m=" +
                          std::to_string(m) + " n=" + std::to_string(n));
  DenseMatrix phi(m, n);
  Rng rng(seed);
  const double scale = 1.0 / std::sqrt(static_cast<double>(m));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j)
      phi(i, j) = ensemble == Ensemble::gaussian
                      ? scale * rng.normal()
                      : (rng.bernoulli(0.5) ? scale : -scale);
  return phi;
}

// Real orthonormal basis of the inverse DFT: DC column, interleaved
// cosine/sine pairs per frequency, and the alternating column for even n.
inline DenseMatrix build_dft_dictionary(std::size_t n) {
  if (n == 0) throw dimension_error("build_dft_dictionary: n must be >= 1");
  DenseMatrix psi(n, n);
  const double dc = 1.0 / std::sqrt(static_cast<double>(n));
  for (std::size_t i = 0; i < n; ++i) psi(i, 0) = dc;
  const double amp = std::sqrt(2.0 / static_cast<double>(n));
  const double tau = 2.0 * 3.141592653589793238462643383279502884;
  std::size_t col = 1;
  for (std::size_t f = 1; 2 * f + 1 <= n; ++f) {
    for (std::size_t i = 0; i < n; ++i) {
      const double angle = tau * static_cast<double>(f) *
                           static_cast<double>(i) / static_cast<double>(n);
      psi(i, col) = amp * std::cos(angle);
      psi(i, col + 1) = amp * std::sin(angle);
    }
    col += 2;
  }
  if (n % 2 == 0 && n > 1) {
    for (std::size_t i = 0; i < n; ++i)
      psi(i, n - 1) = (i % 2 == 0 ? dc : -dc);
  }
  return psi;
}

// y = Phi Psi x + e, e ~ N(0, noise_std^2) i.i.d. Pass nullopt for Psi to use
// the identity dictionary.
inline MeasurementVector measure(const DenseMatrix& phi,
                                 const std::optional<DenseMatrix>& psi,
                                 const SparseSignal& x, double noise_std,
                                 std::uint64_t seed) {
  if (noise_std < 0.0) throw config_error("measure: noise_std must be >= 0");
  if (psi) {
    if (psi->rows() != psi->cols() || phi.cols() != psi->rows() ||
        x.length() != psi->cols())
      throw dimension_error("measure: Phi/Psi/x dimensions incompatible");
  } else if (phi.cols() != x.length()) {
    throw dimension_error("measure: Phi cols must equal x length");
  }
  std::vector<double> s =
      psi ? matvec(*psi, x.values) : x.values;
  std::vector<double> y = matvec(phi, s);
  if (noise_std > 0.0) {
    Rng rng(seed);
    for (double& v : y) v += noise_std * rng.normal();
  }
  return MeasurementVector(std::move(y));
}

}  // namespace sparsekit
