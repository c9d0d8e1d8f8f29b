#include "mstab/solvers/sridr.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "mstab/errors.hpp"
#include "mstab/kernels.hpp"
#include "mstab/solvers/idrstab.hpp"

namespace mstab {

namespace {

using Clock = std::chrono::steady_clock;

std::int64_t ns_since(Clock::time_point t0) {
  return std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - t0).count();
}

}  // namespace

std::pair<Vector, SolveReport> sridr_solve(const LinearOperator& a, const Vector& b,
                                           const Vector& x0, const SolverConfig& cfg,
                                           const RecycleData& recycle) {
  cfg.validate();
  if (cfg.ell != 1) throw ConfigError("sridr: ell == 1 required");
  const std::size_t n = a.size();
  if (b.size() != n) throw DimensionMismatch("sridr: rhs size");
  validate(recycle, a);
  if (recycle.s != cfg.s) throw ConfigError("sridr: recycle s != config s");
  const std::size_t J = recycle.level_J;
  if (recycle.omega_history.size() != J)
    throw MissingOmegas("sridr: recycle data lacks the relaxation history");
  const auto t0 = Clock::now();

  SolveReport rep;
  rep.bnorm = norm2(b);
  rep.h_mv_aux += static_cast<std::int64_t>(recycle.s);  // validation applies A to U

  Vector x = x0.empty() ? Vector(n, Complex(0.0)) : x0;
  Vector r = b;
  if (std::any_of(x.begin(), x.end(), [](Complex z) { return z != Complex(0.0); })) {
    Vector ax = a.apply(x);
    for (std::size_t i = 0; i < n; ++i) r[i] -= ax[i];
    rep.h_mv_aux++;
  }
  double resnorm = norm2(r);
  rep.residual_history.push_back({0, rep.total_mv(), 0, resnorm, ns_since(t0)});

  const double threshold = cfg.tol * rep.bnorm;
  std::size_t j = 0;

  try {
    // Recycled phase: the auxiliary block V stays fixed in the donor's G_J,
    // each cycle replays the donor's relaxation and costs one product.
    DenseMatrix msys = gemm(adjoint(recycle.p), recycle.v);
    LuFactor lu(msys);
    if (J > 0 && lu.singular())
      throw SingularProjection("sridr: projection block P^H V is singular");

    Vector rt(n), xt(n);
    while (j < J && resnorm > threshold && rep.h_mv < cfg.max_mv) {
      Vector gamma = lu.solve(gemv_adjoint(recycle.p, r));
      Vector vcorr = gemv(recycle.v, gamma);
      Vector ucorr = gemv(recycle.u, gamma);
      for (std::size_t i = 0; i < n; ++i) rt[i] = r[i] - vcorr[i];
      for (std::size_t i = 0; i < n; ++i) xt[i] = x[i] + ucorr[i];

      const Complex omega = recycle.omega_history[j];
      Vector art = a.apply(rt);
      rep.h_mv++;
      for (std::size_t i = 0; i < n; ++i) r[i] = rt[i] - omega * art[i];
      for (std::size_t i = 0; i < n; ++i) x[i] = xt[i] + omega * rt[i];

      ++j;
      rep.cycles = j;
      rep.h_rd = static_cast<std::int64_t>(j * cfg.s);
      resnorm = norm2(r);
      rep.residual_history.push_back({j, rep.total_mv(), j, resnorm, ns_since(t0)});
    }

    // Standard IDR(s) cycles with free minimal-residual relaxations from
    // here on; the recycled block seeds the auxiliary vectors.
    DenseMatrix u = recycle.u;
    DenseMatrix v = recycle.v;
    while (resnorm > threshold && rep.h_mv < cfg.max_mv) {
      IterationState st = IterationState::start(x, r, u, v);
      level_iteration(st, a, recycle.p, 0, rep);
      PolyOut po = poly_combination(st, 1);
      x = std::move(po.x);
      r = std::move(po.r);
      u = std::move(po.u);
      v = std::move(po.v);
      rep.omega_history.push_back(std::move(po.tau));

      ++j;
      rep.cycles = j;
      rep.h_rd = static_cast<std::int64_t>(j * cfg.s);
      if (cfg.true_residual_each_cycle) {
        r = b;
        Vector ax = a.apply(x);
        for (std::size_t i = 0; i < n; ++i) r[i] -= ax[i];
        rep.h_mv_aux++;
      }
      resnorm = norm2(r);
      rep.residual_history.push_back({j, rep.total_mv(), j, resnorm, ns_since(t0)});
    }
    rep.status = resnorm <= threshold ? SolveStatus::Converged : SolveStatus::MaxMV;
  } catch (const BreakdownError& e) {
    rep.status = SolveStatus::Breakdown;
    rep.breakdown_reason = e.what();
  }

  rep.final_resnorm = resnorm;
  rep.wall_ns_total = ns_since(t0);
  return {std::move(x), std::move(rep)};
}

}  // namespace mstab
