#include "mstab/solvers/report.hpp"

#include "mstab/errors.hpp"

namespace mstab {

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Converged: return "Converged";
    case SolveStatus::MaxMV: return "MaxMV";
    case SolveStatus::Breakdown: return "Breakdown";
  }
  return "?";
}

void SolverConfig::validate() const {
  if (s < 1) throw ConfigError("config: s >= 1 required");
  if (ell < 1) throw ConfigError("config: ell >= 1 required");
  if (!(tol > 0.0)) throw ConfigError("config: tol > 0 required");
  if (max_mv < static_cast<std::int64_t>(s) + 1)
    throw ConfigError("config: max_mv >= s + 1 required");
}

}  // namespace mstab
