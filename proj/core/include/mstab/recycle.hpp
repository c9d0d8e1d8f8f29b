#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "mstab/dense.hpp"
#include "mstab/operator.hpp"
#include "mstab/types.hpp"

namespace mstab {

/// Recycling data captured at a fetching point: the cut-space basis P, the
/// auxiliary pre-image/image blocks U and V = A*U, the relaxation history of
/// levels 1..level_J, and the fingerprint of the operator the data belongs
/// to. Immutable after construction; shareable.
struct RecycleData {
  DenseMatrix p;  ///< N x s, orthonormal columns
  DenseMatrix u;  ///< N x s
  DenseMatrix v;  ///< N x s, V = A * U
  /// Per-level relaxations omega_1..omega_J. May be empty when the donor
  /// ran with a stabilization degree whose relaxations are not extracted
  /// (ell >= 3); then the data is still valid for Mstab but not for SRIDR.
  std::vector<Complex> omega_history;
  std::size_t level_J = 0;
  std::size_t s = 0;
  std::uint64_t matrix_fingerprint = 0;
};

struct FetchPolicy {
  enum class Kind { AtCycle, AtHalfTolerance, Manual };

  Kind kind = Kind::Manual;
  std::size_t cycle = 0;  ///< for AtCycle; must be >= 1

  static FetchPolicy at_cycle(std::size_t k);
  /// Triggers at the first history point with ||r|| <= sqrt(tol) * ||b||,
  /// the logarithmic midpoint of the convergence course.
  static FetchPolicy at_half_tolerance();
  static FetchPolicy manual();
};

/// Deep-copies a fetching-point snapshot into a RecycleData; the solver
/// state is unaffected. Intended to be called right after a cycle's
/// combination step, so that u and v are that step's outputs.
RecycleData fetch(const DenseMatrix& p, const DenseMatrix& u, const DenseMatrix& v,
                  std::vector<Complex> omega_history, std::size_t level_j,
                  std::uint64_t fingerprint);

struct ValidationReport {
  double max_deviation = 0.0;    ///< max of the V=A*U and P-orthonormality deviations
  double sigma_min_ratio = 0.0;  ///< smallest singular value of V over ||V||
  bool low_rank_warning = false; ///< sigma_min_ratio < 1e-10: recycling roundoff hazard
};

/// Checks the RecycleData invariants against the fingerprinted operator.
/// Throws FingerprintMismatch when the data belongs to another operator and
/// StaleData when the deviation exceeds 1e-6.
ValidationReport validate(const RecycleData& data, const LinearOperator& a);

/// Binary `.mrd` file round-trip, bit-exact on all scalars.
void save(const RecycleData& data, const std::filesystem::path& path);
RecycleData load(const std::filesystem::path& path);

}  // namespace mstab
