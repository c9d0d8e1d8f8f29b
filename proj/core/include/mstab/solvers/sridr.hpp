#pragma once

#include <utility>

#include "mstab/operator.hpp"
#include "mstab/recycle.hpp"
#include "mstab/solvers/report.hpp"
#include "mstab/types.hpp"

namespace mstab {

/// Short-recycling IDR(s), ell = 1 only. For the first J cycles the residual
/// is driven through the donor's Sonneveld spaces with modified IDR cycles:
/// the recycled auxiliary block V stays fixed, the donor's relaxations are
/// replayed, and each cycle costs a single matrix-vector product. From cycle
/// J on, standard IDR(s) cycles with free minimal-residual relaxations take
/// over. Requires the full omega history in the recycle data
/// (MissingOmegas otherwise) and cfg.ell == 1 (ConfigError).
std::pair<Vector, SolveReport> sridr_solve(const LinearOperator& a, const Vector& b,
                                           const Vector& x0, const SolverConfig& cfg,
                                           const RecycleData& recycle);

}  // namespace mstab
