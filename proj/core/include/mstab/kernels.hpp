#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mstab/dense.hpp"
#include "mstab/types.hpp"

namespace mstab {

/// Default relative rank tolerance for basis construction. Well below the
/// convergence tolerances used by the solvers, above accumulated roundoff.
inline constexpr double kRankTol = 1e-10;

struct OrthoResult {
  DenseMatrix q;     ///< `rank` orthonormal columns spanning range(v) up to tol
  std::size_t rank;  ///< number of accepted columns
};

/// Rank-revealing orthonormalization by classical Gram-Schmidt with one
/// reiteration (two projection passes per column). A column is dropped when
/// its residual after projection onto the accepted columns has norm
/// <= tol * (original column norm). Rank 0 output is legal.
OrthoResult orthonormalize(const DenseMatrix& v, double tol = kRankTol);

/// argmin_tau || r - Z*tau ||_2 for tall Z (N x ell, N >= ell >= 1), computed
/// through an orthogonal factorization of Z so that r - Z*tau is orthogonal
/// to range(Z). Throws RankDeficient when the smallest column norm after
/// orthogonalization falls below 1e-13 * (largest column norm of Z).
Vector least_squares_tall(const DenseMatrix& z, std::span<const Complex> r);

/// Solves the small square system M * x = rhs by partially pivoted
/// elimination. Throws SingularProjection when a pivot magnitude drops
/// below 1e-14 * max|M|.
Vector solve_small(const DenseMatrix& m, std::span<const Complex> rhs);

/// Partially pivoted LU of a square dense matrix, reusable across several
/// right-hand sides. Factorization never throws; `singular()` reports a
/// pivot below threshold and solves on a singular factor are refused by
/// the callers with their own error types.
class LuFactor {
 public:
  explicit LuFactor(const DenseMatrix& a, double pivot_rel_tol = 1e-14);

  bool singular() const { return singular_; }
  std::size_t dim() const { return lu_.rows(); }

  Vector solve(std::span<const Complex> rhs) const;
  DenseMatrix solve_block(const DenseMatrix& rhs) const;

 private:
  DenseMatrix lu_;
  std::vector<std::size_t> perm_;
  bool singular_ = false;
};

/// Eigenvalues of a Hermitian matrix (ascending), by cyclic complex Jacobi
/// rotations. Intended for the small Gram matrices that arise in rank and
/// principal-angle computations.
std::vector<double> hermitian_eigenvalues(const DenseMatrix& h);

}  // namespace mstab
