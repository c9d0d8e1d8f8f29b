#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mstab/types.hpp"

namespace mstab {

/// Column-major dense matrix of complex scalars.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols) {}

  static DenseMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  Complex& operator()(std::size_t i, std::size_t j) { return data_[j * rows_ + i]; }
  const Complex& operator()(std::size_t i, std::size_t j) const { return data_[j * rows_ + i]; }

  std::span<Complex> col(std::size_t j) { return {data_.data() + j * rows_, rows_}; }
  std::span<const Complex> col(std::size_t j) const { return {data_.data() + j * rows_, rows_}; }

  std::span<const Complex> data() const { return data_; }
  std::span<Complex> data() { return data_; }

  void set_col(std::size_t j, std::span<const Complex> v);

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Complex> data_;
};

/// y = A * x
Vector gemv(const DenseMatrix& a, std::span<const Complex> x);

/// y = A^H * x
Vector gemv_adjoint(const DenseMatrix& a, std::span<const Complex> x);

DenseMatrix gemm(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix adjoint(const DenseMatrix& a);

/// Horizontal concatenation [a | b]; both must share the row count.
DenseMatrix hcat(const DenseMatrix& a, const DenseMatrix& b);

bool is_real(const DenseMatrix& a);

}  // namespace mstab
