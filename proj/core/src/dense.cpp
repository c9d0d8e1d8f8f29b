#include "mstab/dense.hpp"

#include <algorithm>

#include "mstab/errors.hpp"

namespace mstab {

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

void DenseMatrix::set_col(std::size_t j, std::span<const Complex> v) {
  std::copy(v.begin(), v.end(), col(j).begin());
}

Vector gemv(const DenseMatrix& a, std::span<const Complex> x) {
  if (x.size() != a.cols()) throw DimensionMismatch("gemv: size mismatch");
  Vector y(a.rows(), Complex(0.0));
  for (std::size_t j = 0; j < a.cols(); ++j) axpy(x[j], a.col(j), y);
  return y;
}

Vector gemv_adjoint(const DenseMatrix& a, std::span<const Complex> x) {
  if (x.size() != a.rows()) throw DimensionMismatch("gemv_adjoint: size mismatch");
  Vector y(a.cols());
  for (std::size_t j = 0; j < a.cols(); ++j) y[j] = dot(a.col(j), x);
  return y;
}

DenseMatrix gemm(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows()) throw DimensionMismatch("gemm: size mismatch");
  DenseMatrix c(a.rows(), b.cols());
  for (std::size_t j = 0; j < b.cols(); ++j) {
    auto cj = c.col(j);
    for (std::size_t k = 0; k < a.cols(); ++k) axpy(b(k, j), a.col(k), cj);
  }
  return c;
}

DenseMatrix adjoint(const DenseMatrix& a) {
  DenseMatrix t(a.cols(), a.rows());
  for (std::size_t j = 0; j < a.cols(); ++j)
    for (std::size_t i = 0; i < a.rows(); ++i) t(j, i) = std::conj(a(i, j));
  return t;
}

DenseMatrix hcat(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows() && a.cols() != 0 && b.cols() != 0)
    throw DimensionMismatch("hcat: row mismatch");
  const std::size_t rows = a.cols() ? a.rows() : b.rows();
  DenseMatrix c(rows, a.cols() + b.cols());
  for (std::size_t j = 0; j < a.cols(); ++j) c.set_col(j, a.col(j));
  for (std::size_t j = 0; j < b.cols(); ++j) c.set_col(a.cols() + j, b.col(j));
  return c;
}

bool is_real(const DenseMatrix& a) { return is_real(a.data()); }

}  // namespace mstab
