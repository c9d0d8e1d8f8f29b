#include "mstab/operator.hpp"

#include <algorithm>

#include "mstab/errors.hpp"

namespace mstab {

Vector LinearOperator::apply(std::span<const Complex> x) const {
  Vector y(size());
  apply(x, y);
  return y;
}

Vector LinearOperator::apply_adjoint(std::span<const Complex> x) const {
  Vector y(size());
  apply_adjoint(x, y);
  return y;
}

CsrOperator::CsrOperator(const CsrMatrix& a) : a_(&a) {
  if (a.n_rows != a.n_cols) throw DimensionMismatch("CsrOperator: square matrix required");
}

void CsrOperator::apply(std::span<const Complex> x, std::span<Complex> y) const {
  Vector t = spmv(*a_, x);
  std::copy(t.begin(), t.end(), y.begin());
}

void CsrOperator::apply_adjoint(std::span<const Complex> x, std::span<Complex> y) const {
  Vector t = spmv_adjoint(*a_, x);
  std::copy(t.begin(), t.end(), y.begin());
}

std::uint64_t CsrOperator::fingerprint() const { return a_->checksum(); }

bool CsrOperator::is_real() const { return a_->is_real(); }

}  // namespace mstab
