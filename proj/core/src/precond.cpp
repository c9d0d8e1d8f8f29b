#include "mstab/precond.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "mstab/errors.hpp"

namespace mstab {

namespace {

double diag_scale(const CsrMatrix& a) {
  double s = 0.0;
  for (const Complex& z : a.values) s = std::max(s, std::abs(z));
  return s;
}

}  // namespace

SplitPreconditioner build_none() { return {CsrMatrix{}, CsrMatrix{}, PrecondKind::None}; }

SplitPreconditioner build_jacobi(const CsrMatrix& a) {
  if (a.n_rows != a.n_cols) throw DimensionMismatch("jacobi: square matrix required");
  const double scale = diag_scale(a);
  std::vector<std::tuple<std::size_t, std::size_t, Complex>> t;
  t.reserve(a.n_rows);
  for (std::size_t i = 0; i < a.n_rows; ++i) {
    Complex d = 0.0;
    for (std::size_t k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k)
      if (a.col_idx[k] == i) d = a.values[k];
    if (std::abs(d) < 1e-14 * scale || scale == 0.0) throw ZeroPivot(i);
    t.emplace_back(i, i, std::sqrt(d));
  }
  CsrMatrix f = CsrMatrix::from_triplets(a.n_rows, a.n_cols, std::move(t));
  return {f, f, PrecondKind::Jacobi};
}

SplitPreconditioner build_ilu0(const CsrMatrix& a) {
  if (a.n_rows != a.n_cols) throw DimensionMismatch("ilu0: square matrix required");
  a.validate();
  const std::size_t n = a.n_rows;
  const double scale = diag_scale(a);

  // factor in place on A's pattern (IKJ ordering)
  std::vector<Complex> val = a.values;
  std::vector<std::size_t> diag_pos(n, static_cast<std::size_t>(-1));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k)
      if (a.col_idx[k] == i) diag_pos[i] = k;
  for (std::size_t i = 0; i < n; ++i)
    if (diag_pos[i] == static_cast<std::size_t>(-1)) throw ZeroPivot(i);

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t ki = a.row_ptr[i]; ki < a.row_ptr[i + 1]; ++ki) {
      const std::size_t k = a.col_idx[ki];
      if (k >= i) break;
      const Complex piv = val[diag_pos[k]];
      if (std::abs(piv) < 1e-14 * scale || scale == 0.0) throw ZeroPivot(k);
      const Complex lik = val[ki] / piv;
      val[ki] = lik;
      // subtract lik * row_k on the shared pattern right of k
      std::size_t pk = diag_pos[k] + 1;
      std::size_t pi = ki + 1;
      while (pk < a.row_ptr[k + 1] && pi < a.row_ptr[i + 1]) {
        if (a.col_idx[pk] < a.col_idx[pi]) {
          ++pk;
        } else if (a.col_idx[pk] > a.col_idx[pi]) {
          ++pi;
        } else {
          val[pi] -= lik * val[pk];
          ++pk;
          ++pi;
        }
      }
    }
    if (std::abs(val[diag_pos[i]]) < 1e-14 * scale || scale == 0.0) throw ZeroPivot(i);
  }

  std::vector<std::tuple<std::size_t, std::size_t, Complex>> lt, rt;
  for (std::size_t i = 0; i < n; ++i) {
    lt.emplace_back(i, i, Complex(1.0));
    for (std::size_t k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) {
      const std::size_t j = a.col_idx[k];
      if (j < i)
        lt.emplace_back(i, j, val[k]);
      else
        rt.emplace_back(i, j, val[k]);
    }
  }
  return {CsrMatrix::from_triplets(n, n, std::move(lt)),
          CsrMatrix::from_triplets(n, n, std::move(rt)), PrecondKind::Ilu0};
}

Vector lower_solve(const CsrMatrix& l, std::span<const Complex> b) {
  const std::size_t n = l.n_rows;
  Vector x(b.begin(), b.end());
  for (std::size_t i = 0; i < n; ++i) {
    Complex diag = 0.0;
    for (std::size_t k = l.row_ptr[i]; k < l.row_ptr[i + 1]; ++k) {
      const std::size_t j = l.col_idx[k];
      if (j < i)
        x[i] -= l.values[k] * x[j];
      else if (j == i)
        diag = l.values[k];
    }
    x[i] /= diag;
  }
  return x;
}

Vector upper_solve(const CsrMatrix& r, std::span<const Complex> b) {
  const std::size_t n = r.n_rows;
  Vector x(b.begin(), b.end());
  for (std::size_t i = n; i-- > 0;) {
    Complex diag = 0.0;
    for (std::size_t k = r.row_ptr[i]; k < r.row_ptr[i + 1]; ++k) {
      const std::size_t j = r.col_idx[k];
      if (j > i)
        x[i] -= r.values[k] * x[j];
      else if (j == i)
        diag = r.values[k];
    }
    x[i] /= diag;
  }
  return x;
}

Vector lower_solve_adjoint(const CsrMatrix& l, std::span<const Complex> b) {
  // L^H is upper triangular; scatter form over L's rows, back to front
  const std::size_t n = l.n_rows;
  Vector x(b.begin(), b.end());
  for (std::size_t i = n; i-- > 0;) {
    Complex diag = 0.0;
    for (std::size_t k = l.row_ptr[i]; k < l.row_ptr[i + 1]; ++k)
      if (l.col_idx[k] == i) diag = l.values[k];
    x[i] /= std::conj(diag);
    for (std::size_t k = l.row_ptr[i]; k < l.row_ptr[i + 1]; ++k) {
      const std::size_t j = l.col_idx[k];
      if (j < i) x[j] -= std::conj(l.values[k]) * x[i];
    }
  }
  return x;
}

Vector upper_solve_adjoint(const CsrMatrix& r, std::span<const Complex> b) {
  // R^H is lower triangular; scatter form over R's rows, front to back
  const std::size_t n = r.n_rows;
  Vector x(b.begin(), b.end());
  for (std::size_t i = 0; i < n; ++i) {
    Complex diag = 0.0;
    for (std::size_t k = r.row_ptr[i]; k < r.row_ptr[i + 1]; ++k)
      if (r.col_idx[k] == i) diag = r.values[k];
    x[i] /= std::conj(diag);
    for (std::size_t k = r.row_ptr[i]; k < r.row_ptr[i + 1]; ++k) {
      const std::size_t j = r.col_idx[k];
      if (j > i) x[j] -= std::conj(r.values[k]) * x[i];
    }
  }
  return x;
}

Vector apply_preconditioned(const SplitPreconditioner& pc, const CsrMatrix& a,
                            std::span<const Complex> x) {
  if (pc.kind == PrecondKind::None) return spmv(a, x);
  Vector t = upper_solve(pc.r_factor, x);
  t = spmv(a, t);
  return lower_solve(pc.l_factor, t);
}

Vector unpreconditioned_solution(const SplitPreconditioner& pc, const Vector& x_tilde) {
  if (pc.kind == PrecondKind::None) return x_tilde;
  return upper_solve(pc.r_factor, x_tilde);
}

Vector preconditioned_rhs(const SplitPreconditioner& pc, const Vector& b) {
  if (pc.kind == PrecondKind::None) return b;
  return lower_solve(pc.l_factor, b);
}

PreconditionedOperator::PreconditionedOperator(const SplitPreconditioner& pc,
                                               const CsrMatrix& a)
    : pc_(&pc), a_(&a) {
  if (a.n_rows != a.n_cols) throw DimensionMismatch("precond operator: square required");
}

std::size_t PreconditionedOperator::size() const { return a_->n_rows; }

void PreconditionedOperator::apply(std::span<const Complex> x, std::span<Complex> y) const {
  Vector t = apply_preconditioned(*pc_, *a_, x);
  std::copy(t.begin(), t.end(), y.begin());
}

void PreconditionedOperator::apply_adjoint(std::span<const Complex> x,
                                           std::span<Complex> y) const {
  // (L^-1 A R^-1)^H = R^-H A^H L^-H
  Vector t(x.begin(), x.end());
  if (pc_->kind != PrecondKind::None) t = lower_solve_adjoint(pc_->l_factor, t);
  t = spmv_adjoint(*a_, t);
  if (pc_->kind != PrecondKind::None) t = upper_solve_adjoint(pc_->r_factor, t);
  std::copy(t.begin(), t.end(), y.begin());
}

std::uint64_t PreconditionedOperator::fingerprint() const {
  std::uint64_t h = a_->checksum();
  if (pc_->kind != PrecondKind::None) {
    h ^= pc_->l_factor.checksum() + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    h ^= pc_->r_factor.checksum() + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  }
  return h;
}

bool PreconditionedOperator::is_real() const {
  return a_->is_real() &&
         (pc_->kind == PrecondKind::None ||
          (pc_->l_factor.is_real() && pc_->r_factor.is_real()));
}

}  // namespace mstab
