#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "mstab/types.hpp"

namespace mstab {

enum class SolveStatus { Converged, MaxMV, Breakdown };

const char* to_string(SolveStatus s);

struct HistoryPoint {
  std::size_t cycle = 0;   ///< outer cycle index (0 = initial state)
  std::int64_t mv = 0;     ///< total operator applications so far (incl. auxiliary)
  std::size_t level = 0;   ///< absolute Sonneveld / M-space level
  double resnorm = 0.0;
  std::int64_t wall_ns = 0;
};

struct SolverConfig {
  std::size_t s = 2;        ///< dim(P) and number of auxiliary vectors
  std::size_t ell = 1;      ///< stabilization degree
  double tol = 1e-8;        ///< relative residual tolerance
  std::int64_t max_mv = 100000;  ///< cap on counted matrix-vector products
  bool true_residual_each_cycle = false;
  std::uint64_t seed = 0;   ///< RNG seed for cut-space generation

  void validate() const;    ///< throws ConfigError on violated invariants
};

struct SolveReport {
  std::vector<HistoryPoint> residual_history;
  /// Stabilization coefficient vector tau of each cycle (length ell).
  std::vector<std::vector<Complex>> omega_history;

  /// Matrix-vector products of the method proper: initialization plus
  /// (s + 1) per level iteration. Exactly the canonical-case accounting.
  std::int64_t h_mv = 0;
  /// Extra operator applications outside that accounting: initial-residual
  /// computation for a nonzero guess and per-cycle true-residual refreshes.
  std::int64_t h_mv_aux = 0;
  /// Reduced test-space dimensions.
  std::int64_t h_rd = 0;

  std::size_t cycles = 0;
  SolveStatus status = SolveStatus::MaxMV;
  std::string breakdown_reason;

  double bnorm = 0.0;
  double final_resnorm = 0.0;
  std::int64_t wall_ns_total = 0;

  std::int64_t total_mv() const { return h_mv + h_mv_aux; }
};

}  // namespace mstab
