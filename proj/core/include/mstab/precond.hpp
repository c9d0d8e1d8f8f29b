#pragma once

#include <cstddef>
#include <span>

#include "mstab/csr.hpp"
#include "mstab/operator.hpp"
#include "mstab/types.hpp"

namespace mstab {

enum class PrecondKind { None, Jacobi, Ilu0 };

/// Split preconditioner L, R for the system L^-1 A R^-1 xt = L^-1 b.
/// L is unit lower triangular (diagonal stored explicitly), R is upper
/// triangular carrying the pivots; for Ilu0 the joint sparsity of L and R
/// is contained in the sparsity of A (zero fill-in). Immutable after build.
struct SplitPreconditioner {
  CsrMatrix l_factor;
  CsrMatrix r_factor;
  PrecondKind kind = PrecondKind::None;
};

/// Incomplete LU with zero fill-in on A's pattern (IKJ ordering, Doolittle
/// split: unit lower L, upper R with the pivots). Throws ZeroPivot.
SplitPreconditioner build_ilu0(const CsrMatrix& a);

/// Split Jacobi: sqrt(diag) in both factors. Throws ZeroPivot on a zero
/// diagonal entry.
SplitPreconditioner build_jacobi(const CsrMatrix& a);

SplitPreconditioner build_none();

/// x = L^-1 b (forward substitution).
Vector lower_solve(const CsrMatrix& l, std::span<const Complex> b);
/// x = R^-1 b (backward substitution).
Vector upper_solve(const CsrMatrix& r, std::span<const Complex> b);
/// x = L^-H b and x = R^-H b.
Vector lower_solve_adjoint(const CsrMatrix& l, std::span<const Complex> b);
Vector upper_solve_adjoint(const CsrMatrix& r, std::span<const Complex> b);

/// L^-1 (A (R^-1 x)): two triangular solves around one spmv. Counts as one
/// matrix-vector product in solver reports.
Vector apply_preconditioned(const SplitPreconditioner& pc, const CsrMatrix& a,
                            std::span<const Complex> x);

/// Recovers the solution of the original system from the split one: R^-1 xt.
Vector unpreconditioned_solution(const SplitPreconditioner& pc, const Vector& x_tilde);

/// Right-hand side of the split system: L^-1 b.
Vector preconditioned_rhs(const SplitPreconditioner& pc, const Vector& b);

/// Operator view of L^-1 A R^-1 for the solvers. Non-owning.
class PreconditionedOperator final : public LinearOperator {
 public:
  PreconditionedOperator(const SplitPreconditioner& pc, const CsrMatrix& a);

  using LinearOperator::apply;
  using LinearOperator::apply_adjoint;

  std::size_t size() const override;
  void apply(std::span<const Complex> x, std::span<Complex> y) const override;
  void apply_adjoint(std::span<const Complex> x, std::span<Complex> y) const override;
  std::uint64_t fingerprint() const override;
  bool is_real() const override;

 private:
  const SplitPreconditioner* pc_;
  const CsrMatrix* a_;
};

}  // namespace mstab
