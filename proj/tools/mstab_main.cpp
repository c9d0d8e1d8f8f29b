// Command-line driver: builds or loads a matrix, generates the right-hand
// side sequence, dispatches the chosen solver with optional split
// preconditioning and recycling, and writes CSV convergence logs.
//
// Exit codes: 0 run completed (check the summary for per-solve status),
// 2 solver breakdown, 3 configuration or input error.

#include <cstdio>
#include <exception>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mstab/errors.hpp"
#include "mstab/harness.hpp"

namespace {

mstab::TridiagSpec parse_tridiag(const std::string& text) {
  std::istringstream in(text);
  double a = 0.0, b = 0.0, c = 0.0;
  std::size_t n = 0;
  char c1 = 0, c2 = 0, c3 = 0;
  if (!(in >> a >> c1 >> b >> c2 >> c >> c3 >> n) || c1 != ',' || c2 != ',' ||
      c3 != ',' || n == 0)
    throw mstab::ConfigError("--tridiag wants a,b,c,N (e.g. 2,3,1,40)");
  return {mstab::Complex(a), mstab::Complex(b), mstab::Complex(c), n};
}

mstab::FetchPolicy parse_fetch(const std::string& text) {
  if (text == "off") return mstab::FetchPolicy::manual();
  if (text == "half-tol") return mstab::FetchPolicy::at_half_tolerance();
  if (text.rfind("cycle:", 0) == 0)
    return mstab::FetchPolicy::at_cycle(std::stoull(text.substr(6)));
  throw mstab::ConfigError("--fetch wants cycle:K, half-tol or off");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse iterative solvers with Sonneveld-space recycling"};
  app.get_formatter()->column_width(34);

  std::string matrix_path, tridiag_text, method_name = "idrstab";
  std::vector<std::string> rhs_tokens;
  std::string precond_name = "none", fetch_text = "off";
  std::string recycle_in, recycle_out, log_path;
  mstab::ExperimentConfig cfg;

  app.add_option("--matrix", matrix_path, "Matrix Market coordinate file");
  app.add_option("--tridiag", tridiag_text,
                 "built-in tridiagonal matrix a,b,c,N (subdiagonal a, diagonal b, "
                 "superdiagonal c)");
  app.add_option("--rhs", rhs_tokens,
                 "right-hand side: ones|sinewave|random[:SEED]|file:PATH (repeatable)");
  app.add_option("--method", method_name,
                 "gmres|bicg|bicgstab|idr|idrstab|mstab|sridr");
  app.add_option("-s", cfg.s, "cut-space dimension / auxiliary vectors");
  app.add_option("--ell", cfg.ell, "stabilization degree");
  app.add_option("--tol", cfg.tol, "relative residual tolerance")
      ->default_val(1e-8);
  app.add_option("--max-mv", cfg.max_mv, "cap on matrix-vector products");
  app.add_option("--precond", precond_name, "none|jacobi|ilu0");
  app.add_option("--fetch", fetch_text, "fetching point: cycle:K|half-tol|off");
  app.add_option("--recycle-in", recycle_in, "recycle data file (.mrd) to start from");
  app.add_option("--recycle-out", recycle_out, "write the handoff recycle data here");
  app.add_option("--log", log_path, "CSV convergence log base path (one file per solve)");
  app.add_option("--seed", cfg.seed, "RNG seed for cut-space generation");
  app.add_flag("--true-residual", cfg.true_residual,
               "replace the recurrence residual by b - A*x after each cycle");

  try {
    app.parse(argc, argv);

    if (matrix_path.empty() == tridiag_text.empty())
      throw mstab::ConfigError("exactly one of --matrix and --tridiag is required");
    if (matrix_path.empty())
      cfg.matrix_source = parse_tridiag(tridiag_text);
    else
      cfg.matrix_source = std::filesystem::path(matrix_path);

    if (rhs_tokens.empty()) rhs_tokens.push_back("ones");
    for (const std::string& token : rhs_tokens)
      cfg.rhs_specs.push_back(mstab::RhsSpec::parse(token));

    cfg.method = mstab::parse_method(method_name);
    if (precond_name == "none")
      cfg.precond = mstab::PrecondKind::None;
    else if (precond_name == "jacobi")
      cfg.precond = mstab::PrecondKind::Jacobi;
    else if (precond_name == "ilu0")
      cfg.precond = mstab::PrecondKind::Ilu0;
    else
      throw mstab::ConfigError("--precond wants none, jacobi or ilu0");
    cfg.fetch = parse_fetch(fetch_text);
    if (!recycle_in.empty()) cfg.recycle_in = recycle_in;
    if (!recycle_out.empty()) cfg.recycle_out = recycle_out;
    if (!log_path.empty()) cfg.log_path = log_path;

    mstab::SequenceResult result = mstab::run_sequence(cfg);
    std::cout << result.summary;
    for (const mstab::SolveReport& rep : result.reports)
      if (rep.status == mstab::SolveStatus::Breakdown) {
        std::cerr << "breakdown: " << rep.breakdown_reason << "\n";
        return 2;
      }
    return 0;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 3;  // --help exits cleanly
  } catch (const mstab::BreakdownError& e) {
    std::cerr << "breakdown: " << e.what() << "\n";
    return 2;
  } catch (const mstab::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
