#include "mstab/oracle.hpp"

#include <algorithm>
#include <cmath>

#include "mstab/errors.hpp"

namespace mstab::oracle {

SubspaceBasis SubspaceBasis::full_space(std::size_t n) {
  return {DenseMatrix::identity(n)};
}

SubspaceBasis SubspaceBasis::zero_space(std::size_t n) {
  return {DenseMatrix(n, 0)};
}

SubspaceBasis SubspaceBasis::from_span(const DenseMatrix& cols, double tol) {
  return {orthonormalize(cols, tol).q};
}

SubspaceBasis SubspaceBasis::span_of(std::span<const Complex> v) {
  DenseMatrix m(v.size(), 1);
  m.set_col(0, v);
  return from_span(m);
}

SubspaceBasis krylov_block(const DenseMatrix& a, const SubspaceBasis& t, std::size_t j) {
  const std::size_t n = a.rows();
  if (j == 0 || t.dim() == 0) return SubspaceBasis::zero_space(n);
  DenseMatrix stack = t.basis;
  DenseMatrix last = t.basis;
  for (std::size_t k = 1; k < j; ++k) {
    last = gemm(a, last);
    stack = hcat(stack, last);
  }
  return SubspaceBasis::from_span(stack);
}

SubspaceBasis subspace_sum(const SubspaceBasis& s1, const SubspaceBasis& s2) {
  if (s1.ambient() != s2.ambient()) throw DimensionMismatch("subspace_sum: ambient mismatch");
  return SubspaceBasis::from_span(hcat(s1.basis, s2.basis));
}

SubspaceBasis subspace_perp(const SubspaceBasis& s) {
  const std::size_t n = s.ambient();
  // complete the basis over [B | I] and keep the completion columns
  OrthoResult full = orthonormalize(hcat(s.basis, DenseMatrix::identity(n)));
  const std::size_t d = s.dim();
  DenseMatrix out(n, full.rank - d);
  for (std::size_t j = d; j < full.rank; ++j) out.set_col(j - d, full.q.col(j));
  return {std::move(out)};
}

SubspaceBasis subspace_intersect(const SubspaceBasis& s1, const SubspaceBasis& s2) {
  if (s1.ambient() != s2.ambient())
    throw DimensionMismatch("subspace_intersect: ambient mismatch");
  return subspace_perp(subspace_sum(subspace_perp(s1), subspace_perp(s2)));
}

SubspaceBasis apply_shifted(const DenseMatrix& a, Complex omega, const SubspaceBasis& s) {
  if (omega == Complex(0.0)) throw Error("apply_shifted: omega must be nonzero");
  DenseMatrix shifted = gemm(a, s.basis);
  for (std::size_t j = 0; j < shifted.cols(); ++j) {
    auto c = shifted.col(j);
    auto b = s.basis.col(j);
    for (std::size_t i = 0; i < shifted.rows(); ++i) c[i] = b[i] - omega * c[i];
  }
  return SubspaceBasis::from_span(shifted);
}

SubspaceBasis sonneveld_recursive(const DenseMatrix& a, const SubspaceBasis& p,
                                  const OmegaSequence& omegas, std::size_t j) {
  SubspaceBasis g = SubspaceBasis::full_space(a.rows());
  const SubspaceBasis pperp = subspace_perp(p);
  for (std::size_t k = 1; k <= j; ++k)
    g = apply_shifted(a, omegas[k], subspace_intersect(g, pperp));
  return g;
}

SubspaceBasis sonneveld_direct(const DenseMatrix& a, const SubspaceBasis& p,
                               const OmegaSequence& omegas, std::size_t j) {
  SubspaceBasis w = subspace_perp(krylov_block(adjoint(a), p, j));
  for (std::size_t k = 1; k <= j; ++k) w = apply_shifted(a, omegas[k], w);
  return w;
}

namespace {

/// Solves (I - omega * A^H) X = B.
DenseMatrix shifted_adjoint_solve(const DenseMatrix& a, Complex omega,
                                  const DenseMatrix& b) {
  const std::size_t n = a.rows();
  DenseMatrix m(n, n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i)
      m(i, j) = (i == j ? Complex(1.0) : Complex(0.0)) - omega * std::conj(a(j, i));
  LuFactor lu(m);
  if (lu.singular())
    throw ShiftSingular("test_space: (I - omega A^H) is singular");
  return lu.solve_block(b);
}

}  // namespace

SubspaceBasis test_space(const DenseMatrix& a, const SubspaceBasis& p,
                         const OmegaSequence& omegas, std::size_t j, TestSpaceMode mode) {
  const std::size_t n = a.rows();
  if (j == 0) return SubspaceBasis::zero_space(n);

  if (mode == TestSpaceMode::Direct) {
    // span over k of (p_{0,k}(A^H))^-1 P, accumulated by successive solves
    DenseMatrix y = p.basis;
    DenseMatrix stack(n, 0);
    for (std::size_t k = 1; k <= j; ++k) {
      y = shifted_adjoint_solve(a, omegas[k], y);
      stack = hcat(stack, y);
    }
    return SubspaceBasis::from_span(stack);
  }

  SubspaceBasis c = SubspaceBasis::from_span(shifted_adjoint_solve(a, omegas[1], p.basis));
  for (std::size_t k = 2; k <= j; ++k) {
    DenseMatrix grown = shifted_adjoint_solve(a, omegas[k], c.basis);
    c = SubspaceBasis::from_span(hcat(c.basis, grown));
  }
  return c;
}

SubspaceBasis mspace_recursive(const DenseMatrix& a,
                               std::span<const SubspaceBasis> p_seq,
                               std::span<const SubspaceBasis> q_seq,
                               const OmegaSequence& omegas, std::size_t j,
                               MspaceOrder order) {
  if (p_seq.size() < j || q_seq.size() < j)
    throw DimensionMismatch("mspace_recursive: sequences shorter than j");
  SubspaceBasis m = SubspaceBasis::full_space(a.rows());
  for (std::size_t k = 1; k <= j; ++k) {
    const SubspaceBasis pperp = subspace_perp(p_seq[k - 1]);
    const SubspaceBasis& q = q_seq[k - 1];
    if (order == MspaceOrder::CutShearAdd) {
      m = subspace_sum(apply_shifted(a, omegas[k], subspace_intersect(m, pperp)), q);
    } else {
      m = apply_shifted(a, omegas[k], subspace_intersect(subspace_sum(m, q), pperp));
    }
  }
  return m;
}

bool is_subspace(const SubspaceBasis& s1, const SubspaceBasis& s2, double tol) {
  for (std::size_t j = 0; j < s1.dim(); ++j)
    if (distance_to(s2, s1.basis.col(j)) > tol) return false;
  return true;
}

double distance_to(const SubspaceBasis& s, std::span<const Complex> v) {
  Vector coeff = gemv_adjoint(s.basis, v);
  Vector proj = gemv(s.basis, coeff);
  double acc = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) acc += std::norm(v[i] - proj[i]);
  return std::sqrt(acc);
}

double directed_gap(const SubspaceBasis& s1, const SubspaceBasis& s2) {
  if (s1.dim() == 0) return 0.0;
  // columns of (I - P2) B1, largest singular value via the Gram spectrum
  DenseMatrix m = s1.basis;
  DenseMatrix coeff = gemm(adjoint(s2.basis), s1.basis);
  DenseMatrix proj = gemm(s2.basis, coeff);
  for (std::size_t j = 0; j < m.cols(); ++j) {
    auto c = m.col(j);
    auto p = proj.col(j);
    for (std::size_t i = 0; i < m.rows(); ++i) c[i] -= p[i];
  }
  DenseMatrix gram = gemm(adjoint(m), m);
  const double lmax = hermitian_eigenvalues(gram).back();
  return std::sqrt(std::max(0.0, lmax));
}

double subspace_gap(const SubspaceBasis& s1, const SubspaceBasis& s2) {
  return std::max(directed_gap(s1, s2), directed_gap(s2, s1));
}

}  // namespace mstab::oracle
