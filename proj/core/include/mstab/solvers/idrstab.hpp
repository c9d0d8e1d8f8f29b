#pragma once

#include <cstddef>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "mstab/dense.hpp"
#include "mstab/operator.hpp"
#include "mstab/recycle.hpp"
#include "mstab/solvers/report.hpp"
#include "mstab/types.hpp"

namespace mstab {

/// U with orthonormal columns spanning the Krylov space of r0 at level s,
/// built by an Arnoldi sweep with modified Gram-Schmidt; V = A * U from the
/// same sweep. Costs exactly s operator applications. A happy breakdown
/// (Krylov dimension < s) is padded with random orthonormalized directions
/// and their images.
struct ArnoldiResult {
  DenseMatrix u;
  DenseMatrix v;
  std::int64_t mv_cost = 0;
};
ArnoldiResult arnoldi_init(const LinearOperator& a, std::span<const Complex> r0,
                           std::size_t s, std::mt19937_64& rng);

/// gamma solving (P^H * block) * gamma = P^H * target, so that
/// target - block * gamma is orthogonal to every column of P.
/// Throws SingularProjection via the small solve.
Vector bicg_projection(const DenseMatrix& p, const DenseMatrix& block,
                       std::span<const Complex> target);

/// Level vectors of one outer cycle: r_levels[i] holds r^(i) and
/// v_levels[i] holds the auxiliary block V^(i-1) (index 0 is level -1).
struct IterationState {
  Vector x0;
  std::vector<Vector> r_levels;
  std::vector<DenseMatrix> v_levels;

  static IterationState start(Vector x, Vector r, DenseMatrix u, DenseMatrix v);
  const DenseMatrix& v_level(std::ptrdiff_t level) const { return v_levels[level + 1]; }
  DenseMatrix& v_level(std::ptrdiff_t level) { return v_levels[level + 1]; }
};

/// One IDR level iteration k (costs s + 1 operator applications):
/// orthogonalize r^(k) with V^(k) onto P and recapture the solution, raise
/// the residual to level k+1, then rebuild each auxiliary column against the
/// mixed block [V^(k+1)_{1:q-1}, V^(k)_{q:s}] and raise it.
void level_iteration(IterationState& st, const LinearOperator& a,
                     const DenseMatrix& p, std::size_t k, SolveReport& rep);

/// Degree-ell residual minimization: tau from least squares against
/// Z = [r^(1)..r^(ell)], then the combined residual, solution and auxiliary
/// blocks. Costs no operator application and never increases ||r|| relative
/// to r^(0). A vanishing tau_ell (flat stabilization tail) is perturbed to
/// 1e-12 * ||tau||_inf, phase-consistently.
struct PolyOut {
  Vector x;
  Vector r;
  DenseMatrix u;
  DenseMatrix v;
  std::vector<Complex> tau;
  bool tail_perturbed = false;
};
PolyOut poly_combination(const IterationState& st, std::size_t ell);

struct SolveResult {
  Vector x;
  SolveReport report;
  /// Final (P, U, V, omega history, level) at loop exit.
  RecycleData final_data;
  /// Snapshot taken when a fetch policy triggered mid-run.
  std::optional<RecycleData> fetched;

  /// Data to hand to a subsequent solve: the fetched snapshot when one was
  /// taken, the final state otherwise.
  const RecycleData& handoff() const { return fetched ? *fetched : final_data; }
};

/// IDR(s)stab(ell). Without recycle data the cut-space P is generated fresh
/// (seeded Gaussian, orthonormalized, real for real problems) and (U, V)
/// come from arnoldi_init. With recycle data the solve continues in the
/// donor's M-spaces: P, U, V are reused verbatim and no initialization cost
/// is charged.
SolveResult idrstab_solve(const LinearOperator& a, const Vector& b, const Vector& x0,
                          const SolverConfig& cfg,
                          const RecycleData* recycle = nullptr,
                          const FetchPolicy* fetch_policy = nullptr);

/// M(s,ell)stab: idrstab_solve with mandatory recycle data.
SolveResult mstab_solve(const LinearOperator& a, const Vector& b, const Vector& x0,
                        const SolverConfig& cfg, const RecycleData& recycle,
                        const FetchPolicy* fetch_policy = nullptr);

}  // namespace mstab
