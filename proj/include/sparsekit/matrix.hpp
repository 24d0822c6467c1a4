#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "sparsekit/errors.hpp"

namespace sparsekit {

// Dense row-major matrix. Sized at construction; entries are mutable but the
// shape is not.
class DenseMatrix {
 public:
  DenseMatrix() = default;

  DenseMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), entries_(rows * cols, 0.0) {
    if (rows == 0 || cols == 0)
      throw dimension_error("DenseMatrix: rows and cols must be >= 1");
  }

  static DenseMatrix identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t r, std::size_t c) {
    return entries_[r * cols_ + c];
  }
  double operator()(std::size_t r, std::size_t c) const {
    return entries_[r * cols_ + c];
  }

  std::span<const double> row(std::size_t r) const {
    return {entries_.data() + r * cols_, cols_};
  }

  const std::vector<double>& entries() const { return entries_; }
  std::vector<double>& entries() { return entries_; }

  bool operator==(const DenseMatrix& other) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> entries_;
};

inline std::vector<double> matvec(const DenseMatrix& a,
                                  std::span<const double> x) {
  if (x.size() != a.cols())
    throw dimension_error("matvec: vector length " + std::to_string(x.size()) +
                          " does not match matrix cols " +
                          std::to_string(a.cols()));
  std::vector<double> y(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double acc = 0.0;
    const auto ri = a.row(i);
    for (std::size_t j = 0; j < a.cols(); ++j) acc += ri[j] * x[j];
    y[i] = acc;
  }
  return y;
}

// y = A^T x without forming the transpose.
inline std::vector<double> matvec_transposed(const DenseMatrix& a,
                                             std::span<const double> x) {
  if (x.size() != a.rows())
    throw dimension_error("matvec_transposed: vector length does not match");
  std::vector<double> y(a.cols(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const auto ri = a.row(i);
    const double xi = x[i];
    for (std::size_t j = 0; j < a.cols(); ++j) y[j] += ri[j] * xi;
  }
  return y;
}

inline DenseMatrix transpose(const DenseMatrix& a) {
  DenseMatrix t(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  return t;
}

inline DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows()) throw dimension_error("matmul: shape mismatch");
  DenseMatrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

inline double norm2(std::span<const double> v) {
  return std::sqrt(dot(v, v));
}

inline double norm_inf(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

inline double column_norm(const DenseMatrix& a, std::size_t j) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) acc += a(i, j) * a(i, j);
  return std::sqrt(acc);
}

inline bool all_finite(std::span<const double> v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

}  // namespace sparsekit
