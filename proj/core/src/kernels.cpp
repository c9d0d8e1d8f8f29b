#include "mstab/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mstab/errors.hpp"

namespace mstab {

namespace {

double max_abs(const DenseMatrix& m) {
  double v = 0.0;
  for (const Complex& z : m.data()) v = std::max(v, std::abs(z));
  return v;
}

}  // namespace

OrthoResult orthonormalize(const DenseMatrix& v, double tol) {
  const std::size_t n = v.rows();
  DenseMatrix q(n, v.cols());
  std::size_t rank = 0;

  Vector w(n);
  for (std::size_t j = 0; j < v.cols(); ++j) {
    auto vj = v.col(j);
    const double norm0 = norm2(vj);
    std::copy(vj.begin(), vj.end(), w.begin());

    // classical Gram-Schmidt, applied twice
    for (int pass = 0; pass < 2 && rank > 0; ++pass) {
      Vector coeff(rank);
      for (std::size_t i = 0; i < rank; ++i) coeff[i] = dot(q.col(i), w);
      for (std::size_t i = 0; i < rank; ++i) axpy(-coeff[i], q.col(i), w);
    }

    const double res = norm2(w);
    if (res <= tol * norm0 || norm0 == 0.0) continue;  // dependent or zero column
    const Complex inv = 1.0 / res;
    auto qc = q.col(rank);
    for (std::size_t i = 0; i < n; ++i) qc[i] = w[i] * inv;
    ++rank;
  }

  DenseMatrix out(n, rank);
  for (std::size_t j = 0; j < rank; ++j) out.set_col(j, q.col(j));
  return {std::move(out), rank};
}

Vector least_squares_tall(const DenseMatrix& z, std::span<const Complex> r) {
  const std::size_t n = z.rows();
  const std::size_t ell = z.cols();
  if (ell < 1 || n < ell) throw DimensionMismatch("least_squares_tall: need N >= ell >= 1");
  if (r.size() != n) throw DimensionMismatch("least_squares_tall: rhs size");

  double max_colnorm = 0.0;
  for (std::size_t j = 0; j < ell; ++j) max_colnorm = std::max(max_colnorm, norm2(z.col(j)));

  // thin QR by modified Gram-Schmidt with reiteration
  DenseMatrix q(n, ell);
  DenseMatrix rr(ell, ell);
  for (std::size_t j = 0; j < ell; ++j) q.set_col(j, z.col(j));
  double min_diag = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < ell; ++k) {
    auto qk = q.col(k);
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t i = 0; i < k; ++i) {
        const Complex c = dot(q.col(i), qk);
        axpy(-c, q.col(i), qk);
        rr(i, k) += c;
      }
    }
    const double d = norm2(qk);
    rr(k, k) = d;
    min_diag = std::min(min_diag, d);
    if (d > 0.0) {
      const Complex inv = 1.0 / d;
      for (Complex& x : qk) x *= inv;
    }
  }
  if (min_diag < 1e-13 * max_colnorm)
    throw RankDeficient("least_squares_tall: stabilization block lost rank");

  // tau = R^-1 Q^H r
  Vector tau = gemv_adjoint(q, r);
  for (std::size_t k = ell; k-- > 0;) {
    for (std::size_t j = k + 1; j < ell; ++j) tau[k] -= rr(k, j) * tau[j];
    tau[k] /= rr(k, k);
  }
  return tau;
}

LuFactor::LuFactor(const DenseMatrix& a, double pivot_rel_tol) : lu_(a) {
  const std::size_t n = a.rows();
  if (a.cols() != n) throw DimensionMismatch("LuFactor: square matrix required");
  perm_.resize(n);
  std::iota(perm_.begin(), perm_.end(), std::size_t{0});
  const double scale = max_abs(a);

  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    double best = std::abs(lu_(k, k));
    for (std::size_t i = k + 1; i < n; ++i) {
      const double m = std::abs(lu_(i, k));
      if (m > best) {
        best = m;
        piv = i;
      }
    }
    if (best < pivot_rel_tol * scale || scale == 0.0) {
      singular_ = true;
      return;
    }
    if (piv != k) {
      std::swap(perm_[k], perm_[piv]);
      for (std::size_t j = 0; j < n; ++j) std::swap(lu_(k, j), lu_(piv, j));
    }
    const Complex inv = 1.0 / lu_(k, k);
    for (std::size_t i = k + 1; i < n; ++i) {
      const Complex m = lu_(i, k) * inv;
      lu_(i, k) = m;
      if (m != Complex(0.0))
        for (std::size_t j = k + 1; j < n; ++j) lu_(i, j) -= m * lu_(k, j);
    }
  }
}

Vector LuFactor::solve(std::span<const Complex> rhs) const {
  const std::size_t n = dim();
  if (rhs.size() != n) throw DimensionMismatch("LuFactor::solve: rhs size");
  Vector x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = rhs[perm_[i]];
  for (std::size_t i = 1; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j) x[i] -= lu_(i, j) * x[j];
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t j = i + 1; j < n; ++j) x[i] -= lu_(i, j) * x[j];
    x[i] /= lu_(i, i);
  }
  return x;
}

DenseMatrix LuFactor::solve_block(const DenseMatrix& rhs) const {
  DenseMatrix x(rhs.rows(), rhs.cols());
  for (std::size_t j = 0; j < rhs.cols(); ++j) x.set_col(j, solve(rhs.col(j)));
  return x;
}

Vector solve_small(const DenseMatrix& m, std::span<const Complex> rhs) {
  LuFactor lu(m);
  if (lu.singular()) throw SingularProjection("solve_small: pivot collapse");
  return lu.solve(rhs);
}

std::vector<double> hermitian_eigenvalues(const DenseMatrix& h) {
  const std::size_t n = h.rows();
  if (h.cols() != n) throw DimensionMismatch("hermitian_eigenvalues: square required");
  DenseMatrix a(h);

  double off = 0.0, total = 0.0;
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) {
      const double m = std::norm(a(i, j));
      total += m;
      if (i != j) off += m;
    }
  const double stop = 1e-28 * std::max(total, 1e-300);

  for (int sweep = 0; sweep < 60 && off > stop; ++sweep) {
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const Complex apq = a(p, q);
        const double m = std::abs(apq);
        if (m == 0.0) continue;
        // A phase similarity makes the 2x2 block real symmetric; a real
        // Jacobi rotation then annihilates it. Combined: J = diag(1, conj(phase)) * R.
        const Complex phase = apq / m;
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        const double theta = (aqq - app) / (2.0 * m);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(1.0 + theta * theta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {  // A <- A * J
          const Complex akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * std::conj(phase) * akq;
          a(k, q) = s * akp + c * std::conj(phase) * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {  // A <- J^H * A
          const Complex apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * phase * aqk;
          a(q, k) = s * apk + c * phase * aqk;
        }
      }
    }
    off = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t i = 0; i < n; ++i)
        if (i != j) off += std::norm(a(i, j));
  }

  std::vector<double> ev(n);
  for (std::size_t i = 0; i < n; ++i) ev[i] = a(i, i).real();
  std::sort(ev.begin(), ev.end());
  return ev;
}

}  // namespace mstab
