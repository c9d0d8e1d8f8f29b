#pragma once

#include <cstdint>
#include <utility>

#include "mstab/operator.hpp"
#include "mstab/solvers/report.hpp"
#include "mstab/types.hpp"

namespace mstab {

/// Full-memory GMRES with modified Gram-Schmidt, no restarts.
std::pair<Vector, SolveReport> gmres_solve(const LinearOperator& a, const Vector& b,
                                           const Vector& x0, double tol,
                                           std::int64_t max_it);

/// Textbook BiCG; uses the adjoint operator. The shadow residual defaults
/// to r0; on Hermitian positive definite systems that choice reproduces the
/// conjugate-gradient trajectory.
std::pair<Vector, SolveReport> bicg_solve(const LinearOperator& a, const Vector& b,
                                          const Vector& x0, double tol,
                                          std::int64_t max_mv,
                                          const Vector* shadow = nullptr);

/// Textbook BiCGStab, shadow residual defaulting to r0. With the shadow set
/// to the cut-space vector of idrstab_solve (same seed, s = 1) the two
/// methods coincide in exact arithmetic at s = 1, ell = 1.
std::pair<Vector, SolveReport> bicgstab_solve(const LinearOperator& a, const Vector& b,
                                              const Vector& x0, double tol,
                                              std::int64_t max_mv,
                                              const Vector* shadow = nullptr);

/// Seeded Gaussian cut-space generator shared by the IDR family and the
/// shadow vectors of the baselines: N x s, orthonormalized, real entries
/// when `real` is set.
DenseMatrix make_cut_space(std::size_t n, std::size_t s, std::uint64_t seed, bool real);

}  // namespace mstab
