#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "mstab/csr.hpp"
#include "mstab/precond.hpp"
#include "mstab/recycle.hpp"
#include "mstab/solvers/report.hpp"
#include "mstab/types.hpp"

namespace mstab {

enum class Method { Gmres, Bicg, Bicgstab, Idr, Idrstab, Mstab, Sridr };

Method parse_method(const std::string& name);
const char* to_string(Method m);

struct TridiagSpec {
  Complex a, b, c;
  std::size_t n;
};

struct RhsSpec {
  enum class Kind { Ones, Sinewave, Random, File };
  Kind kind = Kind::Ones;
  std::uint64_t seed = 0;          ///< for Random
  std::filesystem::path path;     ///< for File

  static RhsSpec parse(const std::string& token);  ///< ones|sinewave|random[:S]|file:PATH
};

/// b by formula: ones is the all-one vector; sinewave has components
/// sin(2*pi*k/N), k = 1..N; random draws seeded standard-normal real
/// entries.
Vector make_rhs(const RhsSpec& spec, std::size_t n);

struct ExperimentConfig {
  std::variant<std::filesystem::path, TridiagSpec> matrix_source;
  std::vector<RhsSpec> rhs_specs;
  Method method = Method::Idrstab;
  std::size_t s = 2;
  std::size_t ell = 1;
  double tol = 1e-8;
  std::int64_t max_mv = 100000;
  PrecondKind precond = PrecondKind::None;
  FetchPolicy fetch = FetchPolicy::manual();
  std::optional<std::filesystem::path> recycle_in;
  std::optional<std::filesystem::path> recycle_out;
  std::optional<std::filesystem::path> log_path;
  std::uint64_t seed = 0;
  bool true_residual = false;

  void validate() const;  ///< throws ConfigError
};

/// Writes `cycle,mv,level,resnorm,wall_ns` rows, one per history point.
void emit_csv(const SolveReport& report, const std::filesystem::path& path);

/// Per-solve CSV path for solve index i (1-based): stem gains "_i".
std::filesystem::path indexed_log_path(const std::filesystem::path& base, std::size_t i);

struct SequenceResult {
  std::vector<SolveReport> reports;
  std::vector<Vector> solutions;
  std::string summary;  ///< one table row per solve
};

/// Solves the right-hand sides in order. For mstab/sridr the recycle data
/// flows from the fetch point of each solve into the next (or from
/// recycle_in for the first); when neither is available the first solve
/// runs fresh to produce it. Writes one CSV per solve when log_path is set
/// and the handoff recycle file when recycle_out is set. A solver breakdown
/// aborts the sequence with partial logs.
SequenceResult run_sequence(const ExperimentConfig& cfg);

}  // namespace mstab
