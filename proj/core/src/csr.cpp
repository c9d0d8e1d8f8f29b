#include "mstab/csr.hpp"

#include <algorithm>
#include <bit>
#include <cstring>

#include "mstab/errors.hpp"

namespace mstab {

void CsrMatrix::validate() const {
  if (row_ptr.size() != n_rows + 1) throw Error("csr: row_ptr length");
  if (row_ptr.front() != 0 || row_ptr.back() != values.size())
    throw Error("csr: row_ptr bounds");
  if (col_idx.size() != values.size()) throw Error("csr: col_idx length");
  for (std::size_t i = 0; i < n_rows; ++i) {
    if (row_ptr[i] > row_ptr[i + 1]) throw Error("csr: row_ptr not nondecreasing");
    for (std::size_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k) {
      if (col_idx[k] >= n_cols) throw Error("csr: column index out of range");
      if (k > row_ptr[i] && col_idx[k - 1] >= col_idx[k])
        throw Error("csr: columns not strictly increasing within a row");
    }
  }
}

bool CsrMatrix::is_real() const { return mstab::is_real(std::span<const Complex>(values)); }

std::uint64_t CsrMatrix::checksum() const {
  std::uint64_t h = 1469598103934665603ull;  // FNV-1a
  auto mix = [&h](const void* p, std::size_t len) {
    const unsigned char* b = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < len; ++i) {
      h ^= b[i];
      h *= 1099511628211ull;
    }
  };
  const std::uint64_t dims[3] = {n_rows, n_cols, nnz()};
  mix(dims, sizeof(dims));
  for (std::size_t v : row_ptr) mix(&v, sizeof(v));
  for (std::size_t v : col_idx) mix(&v, sizeof(v));
  mix(values.data(), values.size() * sizeof(Complex));
  return h;
}

DenseMatrix CsrMatrix::to_dense() const {
  DenseMatrix d(n_rows, n_cols);
  for (std::size_t i = 0; i < n_rows; ++i)
    for (std::size_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k)
      d(i, col_idx[k]) = values[k];
  return d;
}

CsrMatrix CsrMatrix::from_triplets(
    std::size_t n_rows, std::size_t n_cols,
    std::vector<std::tuple<std::size_t, std::size_t, Complex>> triplets) {
  std::sort(triplets.begin(), triplets.end(), [](const auto& a, const auto& b) {
    return std::get<0>(a) != std::get<0>(b) ? std::get<0>(a) < std::get<0>(b)
                                            : std::get<1>(a) < std::get<1>(b);
  });
  CsrMatrix m;
  m.n_rows = n_rows;
  m.n_cols = n_cols;
  m.row_ptr.assign(n_rows + 1, 0);
  for (std::size_t t = 0; t < triplets.size(); ++t) {
    const auto& [i, j, v] = triplets[t];
    if (i >= n_rows || j >= n_cols) throw Error("from_triplets: index out of range");
    if (!m.col_idx.empty() && t > 0 && std::get<0>(triplets[t - 1]) == i &&
        std::get<1>(triplets[t - 1]) == j) {
      m.values.back() += v;  // duplicates are summed
      continue;
    }
    m.row_ptr[i + 1]++;
    m.col_idx.push_back(j);
    m.values.push_back(v);
  }
  for (std::size_t i = 0; i < n_rows; ++i) m.row_ptr[i + 1] += m.row_ptr[i];
  m.validate();
  return m;
}

CsrMatrix CsrMatrix::identity(std::size_t n) {
  CsrMatrix m;
  m.n_rows = m.n_cols = n;
  m.row_ptr.resize(n + 1);
  m.col_idx.resize(n);
  m.values.assign(n, Complex(1.0));
  for (std::size_t i = 0; i <= n; ++i) m.row_ptr[i] = i;
  for (std::size_t i = 0; i < n; ++i) m.col_idx[i] = i;
  return m;
}

CsrMatrix CsrMatrix::tridiag(Complex a, Complex b, Complex c, std::size_t n) {
  std::vector<std::tuple<std::size_t, std::size_t, Complex>> t;
  t.reserve(3 * n);
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0) t.emplace_back(i, i - 1, a);
    t.emplace_back(i, i, b);
    if (i + 1 < n) t.emplace_back(i, i + 1, c);
  }
  return from_triplets(n, n, std::move(t));
}

Vector spmv(const CsrMatrix& a, std::span<const Complex> x) {
  if (x.size() != a.n_cols) throw DimensionMismatch("spmv: dimension mismatch");
  Vector y(a.n_rows);
  for (std::size_t i = 0; i < a.n_rows; ++i) {
    Complex acc = 0.0;
    for (std::size_t k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k)
      acc += a.values[k] * x[a.col_idx[k]];
    y[i] = acc;
  }
  return y;
}

Vector spmv_adjoint(const CsrMatrix& a, std::span<const Complex> x) {
  if (x.size() != a.n_rows) throw DimensionMismatch("spmv_adjoint: dimension mismatch");
  Vector y(a.n_cols, Complex(0.0));
  for (std::size_t i = 0; i < a.n_rows; ++i) {
    const Complex xi = x[i];
    for (std::size_t k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k)
      y[a.col_idx[k]] += std::conj(a.values[k]) * xi;
  }
  return y;
}

}  // namespace mstab
