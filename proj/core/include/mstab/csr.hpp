#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <tuple>
#include <vector>

#include "mstab/dense.hpp"
#include "mstab/types.hpp"

namespace mstab {

/// Compressed sparse row matrix; the only large-N object that is
/// multiplied repeatedly. Immutable after construction by convention,
/// safe to share across concurrent independent solves.
struct CsrMatrix {
  std::size_t n_rows = 0;
  std::size_t n_cols = 0;
  std::vector<std::size_t> row_ptr;  ///< length n_rows + 1, nondecreasing
  std::vector<std::size_t> col_idx;  ///< strictly increasing within a row
  std::vector<Complex> values;

  std::size_t nnz() const { return values.size(); }

  /// Checks the structural invariants; throws Error on violation.
  void validate() const;

  bool is_real() const;

  /// FNV-1a content hash over dimensions, pattern and values.
  std::uint64_t checksum() const;

  DenseMatrix to_dense() const;

  /// Builds from (row, col, value) triplets; duplicates are summed.
  static CsrMatrix from_triplets(
      std::size_t n_rows, std::size_t n_cols,
      std::vector<std::tuple<std::size_t, std::size_t, Complex>> triplets);

  static CsrMatrix identity(std::size_t n);

  /// tridiag(a, b, c): a on the subdiagonal, b on the diagonal, c on the
  /// superdiagonal, so that A * e1 = (b, a, 0, ...).
  static CsrMatrix tridiag(Complex a, Complex b, Complex c, std::size_t n);
};

/// y = A * x. No allocation proportional to nnz beyond the output.
Vector spmv(const CsrMatrix& a, std::span<const Complex> x);

/// y = A^H * x.
Vector spmv_adjoint(const CsrMatrix& a, std::span<const Complex> x);

}  // namespace mstab
