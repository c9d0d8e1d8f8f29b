#include "mstab/harness.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <numbers>
#include <random>
#include <sstream>

#include "mstab/errors.hpp"
#include "mstab/io/matrix_market.hpp"
#include "mstab/operator.hpp"
#include "mstab/precond.hpp"
#include "mstab/solvers/baselines.hpp"
#include "mstab/solvers/idrstab.hpp"
#include "mstab/solvers/sridr.hpp"

namespace mstab {

Method parse_method(const std::string& name) {
  if (name == "gmres") return Method::Gmres;
  if (name == "bicg") return Method::Bicg;
  if (name == "bicgstab") return Method::Bicgstab;
  if (name == "idr") return Method::Idr;
  if (name == "idrstab") return Method::Idrstab;
  if (name == "mstab") return Method::Mstab;
  if (name == "sridr") return Method::Sridr;
  throw ConfigError("unknown method '" + name + "'");
}

const char* to_string(Method m) {
  switch (m) {
    case Method::Gmres: return "gmres";
    case Method::Bicg: return "bicg";
    case Method::Bicgstab: return "bicgstab";
    case Method::Idr: return "idr";
    case Method::Idrstab: return "idrstab";
    case Method::Mstab: return "mstab";
    case Method::Sridr: return "sridr";
  }
  return "?";
}

RhsSpec RhsSpec::parse(const std::string& token) {
  RhsSpec spec;
  if (token == "ones") {
    spec.kind = Kind::Ones;
  } else if (token == "sinewave") {
    spec.kind = Kind::Sinewave;
  } else if (token.rfind("random", 0) == 0) {
    spec.kind = Kind::Random;
    if (token.size() > 6) {
      if (token[6] != ':') throw ConfigError("bad rhs spec '" + token + "'");
      spec.seed = std::stoull(token.substr(7));
    }
  } else if (token.rfind("file:", 0) == 0) {
    spec.kind = Kind::File;
    spec.path = token.substr(5);
    if (spec.path.empty()) throw ConfigError("bad rhs spec '" + token + "'");
  } else {
    throw ConfigError("bad rhs spec '" + token +
                      "' (want ones|sinewave|random[:SEED]|file:PATH)");
  }
  return spec;
}

Vector make_rhs(const RhsSpec& spec, std::size_t n) {
  switch (spec.kind) {
    case RhsSpec::Kind::Ones:
      return Vector(n, Complex(1.0));
    case RhsSpec::Kind::Sinewave: {
      Vector v(n);
      for (std::size_t k = 1; k <= n; ++k)
        v[k - 1] = std::sin(2.0 * std::numbers::pi * static_cast<double>(k) /
                            static_cast<double>(n));
      return v;
    }
    case RhsSpec::Kind::Random: {
      std::mt19937_64 rng(spec.seed);
      std::normal_distribution<double> normal(0.0, 1.0);
      Vector v(n);
      for (Complex& z : v) z = Complex(normal(rng));
      return v;
    }
    case RhsSpec::Kind::File: {
      Vector v = read_vector(spec.path);
      if (v.size() != n)
        throw ConfigError("rhs file " + spec.path.string() + " has length " +
                          std::to_string(v.size()) + ", want " + std::to_string(n));
      return v;
    }
  }
  throw ConfigError("bad rhs spec");
}

void ExperimentConfig::validate() const {
  if (rhs_specs.empty()) throw ConfigError("no right-hand sides given");
  if (method == Method::Sridr && ell != 1) throw ConfigError("sridr requires ell == 1");
  if (method == Method::Idr && ell != 1) throw ConfigError("idr requires ell == 1");
  const bool recycling = method == Method::Mstab || method == Method::Sridr;
  if (recycling && !recycle_in && rhs_specs.size() < 2)
    throw ConfigError(std::string(to_string(method)) +
                      " needs --recycle-in or a prior in-sequence solve");
  if (!recycling && recycle_in)
    throw ConfigError("--recycle-in requires --method mstab or sridr");
  SolverConfig sc{s, ell == 0 ? 1 : ell, tol, max_mv, true_residual, seed};
  sc.validate();
}

void emit_csv(const SolveReport& report, const std::filesystem::path& path) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw IoError("cannot open " + path.string() + " for writing");
  f << "cycle,mv,level,resnorm,wall_ns\n";
  char buf[128];
  for (const HistoryPoint& h : report.residual_history) {
    std::snprintf(buf, sizeof(buf), "%zu,%lld,%zu,%.17g,%lld\n", h.cycle,
                  static_cast<long long>(h.mv), h.level, h.resnorm,
                  static_cast<long long>(h.wall_ns));
    f << buf;
  }
  if (!f) throw IoError("write failed: " + path.string());
}

std::filesystem::path indexed_log_path(const std::filesystem::path& base, std::size_t i) {
  std::filesystem::path p = base;
  const std::string ext = p.extension().string();
  p.replace_extension();
  p += "_" + std::to_string(i) + ext;
  return p;
}

namespace {

struct Problem {
  CsrMatrix a;
  SplitPreconditioner pc;
  std::unique_ptr<LinearOperator> op;
};

Problem setup_problem(const ExperimentConfig& cfg) {
  Problem prob;
  if (std::holds_alternative<TridiagSpec>(cfg.matrix_source)) {
    const TridiagSpec& t = std::get<TridiagSpec>(cfg.matrix_source);
    prob.a = CsrMatrix::tridiag(t.a, t.b, t.c, t.n);
  } else {
    prob.a = read_matrix_market(std::get<std::filesystem::path>(cfg.matrix_source));
    if (prob.a.n_rows != prob.a.n_cols) throw ConfigError("matrix must be square");
  }
  switch (cfg.precond) {
    case PrecondKind::None: prob.pc = build_none(); break;
    case PrecondKind::Jacobi: prob.pc = build_jacobi(prob.a); break;
    case PrecondKind::Ilu0: prob.pc = build_ilu0(prob.a); break;
  }
  if (prob.pc.kind == PrecondKind::None)
    prob.op = std::make_unique<CsrOperator>(prob.a);
  else
    prob.op = std::make_unique<PreconditionedOperator>(prob.pc, prob.a);
  return prob;
}

std::string summary_row(std::size_t idx, Method effective, const ExperimentConfig& cfg,
                        const SolveReport& rep) {
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "%-3zu %-8s s=%zu ell=%zu  %-9s cycles=%-5zu hMV=%-7lld hRD=%-7lld "
                "relres=%.3e wall=%.3fms",
                idx, to_string(effective), cfg.s, cfg.ell, to_string(rep.status),
                rep.cycles, static_cast<long long>(rep.h_mv),
                static_cast<long long>(rep.h_rd),
                rep.bnorm > 0 ? rep.final_resnorm / rep.bnorm : rep.final_resnorm,
                static_cast<double>(rep.wall_ns_total) * 1e-6);
  return buf;
}

}  // namespace

SequenceResult run_sequence(const ExperimentConfig& cfg) {
  cfg.validate();
  Problem prob = setup_problem(cfg);
  const std::size_t n = prob.op->size();

  SolverConfig sc{cfg.s, cfg.ell, cfg.tol, cfg.max_mv, cfg.true_residual, cfg.seed};
  if (cfg.method == Method::Idr) sc.ell = 1;
  if (cfg.method == Method::Sridr) sc.ell = 1;

  std::optional<RecycleData> handoff;
  if (cfg.recycle_in) handoff = load(*cfg.recycle_in);

  SequenceResult out;
  std::ostringstream summary;
  for (std::size_t i = 0; i < cfg.rhs_specs.size(); ++i) {
    Vector b = make_rhs(cfg.rhs_specs[i], n);
    if (prob.pc.kind != PrecondKind::None) b = preconditioned_rhs(prob.pc, b);

    Vector x;
    SolveReport rep;
    Method effective = cfg.method;
    switch (cfg.method) {
      case Method::Gmres: {
        auto [xs, r] = gmres_solve(*prob.op, b, {}, cfg.tol, cfg.max_mv);
        x = std::move(xs);
        rep = std::move(r);
        break;
      }
      case Method::Bicg: {
        auto [xs, r] = bicg_solve(*prob.op, b, {}, cfg.tol, cfg.max_mv);
        x = std::move(xs);
        rep = std::move(r);
        break;
      }
      case Method::Bicgstab: {
        auto [xs, r] = bicgstab_solve(*prob.op, b, {}, cfg.tol, cfg.max_mv);
        x = std::move(xs);
        rep = std::move(r);
        break;
      }
      case Method::Idr:
      case Method::Idrstab: {
        SolveResult r = idrstab_solve(*prob.op, b, {}, sc, nullptr, &cfg.fetch);
        x = std::move(r.x);
        rep = std::move(r.report);
        handoff = r.handoff();  // available for --recycle-out
        break;
      }
      case Method::Mstab: {
        if (handoff) {
          SolveResult r = mstab_solve(*prob.op, b, {}, sc, *handoff, &cfg.fetch);
          x = std::move(r.x);
          rep = std::move(r.report);
          handoff = r.handoff();
        } else {
          // no recycle data yet: the first solve runs fresh and produces it
          effective = Method::Idrstab;
          SolveResult r = idrstab_solve(*prob.op, b, {}, sc, nullptr, &cfg.fetch);
          x = std::move(r.x);
          rep = std::move(r.report);
          handoff = r.handoff();
        }
        break;
      }
      case Method::Sridr: {
        if (handoff) {
          auto [xs, r] = sridr_solve(*prob.op, b, {}, sc, *handoff);
          x = std::move(xs);
          rep = std::move(r);
        } else {
          effective = Method::Idr;
          SolveResult r = idrstab_solve(*prob.op, b, {}, sc, nullptr, &cfg.fetch);
          x = std::move(r.x);
          rep = std::move(r.report);
          handoff = r.handoff();
        }
        break;
      }
    }

    if (prob.pc.kind != PrecondKind::None) x = unpreconditioned_solution(prob.pc, x);
    if (cfg.log_path) emit_csv(rep, indexed_log_path(*cfg.log_path, i + 1));
    summary << summary_row(i + 1, effective, cfg, rep) << '\n';
    const bool broke = rep.status == SolveStatus::Breakdown;
    out.reports.push_back(std::move(rep));
    out.solutions.push_back(std::move(x));
    if (broke) break;  // abort the sequence with partial logs
  }

  if (cfg.recycle_out) {
    if (!handoff) throw ConfigError("--recycle-out: no recycle data was produced");
    save(*handoff, *cfg.recycle_out);
  }
  out.summary = summary.str();
  return out;
}

}  // namespace mstab
