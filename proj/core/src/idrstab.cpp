#include "mstab/solvers/idrstab.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "mstab/errors.hpp"
#include "mstab/kernels.hpp"
#include "mstab/solvers/baselines.hpp"

namespace mstab {

namespace {

using Clock = std::chrono::steady_clock;

std::int64_t ns_since(Clock::time_point t0) {
  return std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - t0).count();
}

bool is_zero(std::span<const Complex> v) {
  return std::all_of(v.begin(), v.end(), [](Complex z) { return z == Complex(0.0); });
}

/// Relaxations of the cycle's stabilization polynomial 1 - sum tau_k t^k.
/// Extracted for ell = 1 (omega = tau_1) and ell = 2 (the two roots);
/// higher degrees are skipped.
bool extract_omegas(const std::vector<Complex>& tau, std::vector<Complex>& out) {
  if (tau.size() == 1) {
    out.push_back(tau[0]);
    return true;
  }
  if (tau.size() == 2) {
    // (1 - w1 t)(1 - w2 t) = 1 - tau1 t - tau2 t^2  =>  w^2 - tau1 w - tau2 = 0
    const Complex disc = std::sqrt(tau[0] * tau[0] + 4.0 * tau[1]);
    out.push_back((tau[0] + disc) / 2.0);
    out.push_back((tau[0] - disc) / 2.0);
    return true;
  }
  return false;
}

}  // namespace

ArnoldiResult arnoldi_init(const LinearOperator& a, std::span<const Complex> r0,
                           std::size_t s, std::mt19937_64& rng) {
  const std::size_t n = a.size();
  if (s < 1) throw ConfigError("arnoldi_init: s >= 1 required");
  const double r0norm = norm2(r0);
  if (r0norm == 0.0) throw Error("arnoldi_init: zero start vector");
  const bool real = a.is_real() && is_real(r0);

  ArnoldiResult res;
  res.u = DenseMatrix(n, s);
  res.v = DenseMatrix(n, s);

  auto u0 = res.u.col(0);
  for (std::size_t i = 0; i < n; ++i) u0[i] = r0[i] / r0norm;

  std::normal_distribution<double> normal(0.0, 1.0);
  Vector w(n);
  for (std::size_t k = 0; k < s; ++k) {
    a.apply(res.u.col(k), res.v.col(k));
    res.mv_cost++;
    if (k + 1 == s) break;

    std::copy(res.v.col(k).begin(), res.v.col(k).end(), w.begin());
    const double wnorm0 = norm2(w);
    // modified Gram-Schmidt against the accepted columns, with reiteration
    for (int pass = 0; pass < 2; ++pass)
      for (std::size_t i = 0; i <= k; ++i) axpy(-dot(res.u.col(i), w), res.u.col(i), w);

    double wnorm = norm2(w);
    while (wnorm <= 1e-12 * std::max(wnorm0, 1.0)) {
      // happy breakdown: the Krylov space ended early, pad with a random
      // orthonormalized direction
      for (std::size_t i = 0; i < n; ++i)
        w[i] = real ? Complex(normal(rng)) : Complex(normal(rng), normal(rng));
      for (int pass = 0; pass < 2; ++pass)
        for (std::size_t i = 0; i <= k; ++i) axpy(-dot(res.u.col(i), w), res.u.col(i), w);
      wnorm = norm2(w);
    }
    auto un = res.u.col(k + 1);
    for (std::size_t i = 0; i < n; ++i) un[i] = w[i] / wnorm;
  }
  return res;
}

Vector bicg_projection(const DenseMatrix& p, const DenseMatrix& block,
                       std::span<const Complex> target) {
  DenseMatrix m = gemm(adjoint(p), block);
  Vector rhs = gemv_adjoint(p, target);
  return solve_small(m, rhs);
}

IterationState IterationState::start(Vector x, Vector r, DenseMatrix u, DenseMatrix v) {
  IterationState st;
  st.x0 = std::move(x);
  st.r_levels.push_back(std::move(r));
  st.v_levels.push_back(std::move(u));  // level -1
  st.v_levels.push_back(std::move(v));  // level 0
  return st;
}

void level_iteration(IterationState& st, const LinearOperator& a,
                     const DenseMatrix& p, std::size_t k, SolveReport& rep) {
  const std::size_t n = a.size();
  const std::size_t s = p.cols();

  // (a) BiCG step: orthogonalize r^(k) with V^(k) onto P, consistently over
  // all levels, and recapture the solution through the pre-images V^(-1).
  Vector gamma = bicg_projection(p, st.v_level(k), st.r_levels[k]);
  for (std::size_t i = 0; i <= k; ++i) {
    Vector corr = gemv(st.v_level(i), gamma);
    auto ri = std::span<Complex>(st.r_levels[i]);
    for (std::size_t t = 0; t < n; ++t) ri[t] -= corr[t];
  }
  {
    Vector corr = gemv(st.v_level(-1), gamma);
    for (std::size_t t = 0; t < n; ++t) st.x0[t] += corr[t];
  }

  // (b) raise the residual one level
  st.r_levels.push_back(a.apply(st.r_levels[k]));
  rep.h_mv++;

  // (c) rebuild the auxiliary columns in order against the mixed block
  // [V^(k+1)_{1:q-1}, V^(k)_{q:s}], then raise each one level.
  st.v_levels.emplace_back(n, s);  // level k+1, filled column by column
  const Vector rhs = gemv_adjoint(p, st.r_levels[k + 1]);
  Vector newcol(n);
  for (std::size_t q = 0; q < s; ++q) {
    DenseMatrix msys(s, s);
    for (std::size_t c = 0; c < s; ++c) {
      auto mixed = c < q ? st.v_level(k + 1).col(c) : st.v_level(k).col(c);
      msys.set_col(c, gemv_adjoint(p, mixed));
    }
    Vector eta = solve_small(msys, rhs);

    for (std::ptrdiff_t i = -1; i <= static_cast<std::ptrdiff_t>(k); ++i) {
      const auto& rnext = st.r_levels[i + 1];
      std::copy(rnext.begin(), rnext.end(), newcol.begin());
      for (std::size_t c = 0; c < s; ++c) {
        auto mixed = c < q ? st.v_level(i + 1).col(c) : st.v_level(i).col(c);
        axpy(-eta[c], mixed, newcol);
      }
      st.v_levels[i + 1].set_col(q, newcol);
    }
    a.apply(st.v_level(k).col(q), st.v_level(k + 1).col(q));
    rep.h_mv++;
  }
}

PolyOut poly_combination(const IterationState& st, std::size_t ell) {
  const std::size_t n = st.x0.size();
  const std::size_t s = st.v_levels[0].cols();
  if (st.r_levels.size() < ell + 1) throw Error("poly_combination: missing levels");

  DenseMatrix z(n, ell);
  for (std::size_t i = 0; i < ell; ++i) z.set_col(i, st.r_levels[i + 1]);

  PolyOut out;
  out.tau = least_squares_tall(z, st.r_levels[0]);

  double tmax = 0.0;
  for (const Complex& t : out.tau) tmax = std::max(tmax, std::abs(t));
  Complex& tail = out.tau[ell - 1];
  if (std::abs(tail) < 1e-12 * tmax || tmax == 0.0) {
    // a vanishing leading coefficient would mean omega = 0; nudge it while
    // keeping its phase
    const double target = tmax > 0.0 ? 1e-12 * tmax : 1e-12;
    tail = std::abs(tail) > 0.0 ? tail * (target / std::abs(tail)) : Complex(target);
    out.tail_perturbed = true;
  }

  out.r = st.r_levels[0];
  out.x = st.x0;
  for (std::size_t i = 1; i <= ell; ++i) {
    axpy(-out.tau[i - 1], st.r_levels[i], out.r);
    axpy(out.tau[i - 1], st.r_levels[i - 1], out.x);
  }
  out.u = st.v_level(-1);
  out.v = st.v_level(0);
  for (std::size_t q = 0; q < s; ++q) {
    for (std::size_t i = 1; i <= ell; ++i) {
      axpy(-out.tau[i - 1], st.v_level(i - 1).col(q), out.u.col(q));
      axpy(-out.tau[i - 1], st.v_level(i).col(q), out.v.col(q));
    }
  }
  return out;
}

SolveResult idrstab_solve(const LinearOperator& a, const Vector& b, const Vector& x0,
                          const SolverConfig& cfg, const RecycleData* recycle,
                          const FetchPolicy* fetch_policy) {
  cfg.validate();
  const std::size_t n = a.size();
  if (b.size() != n) throw DimensionMismatch("idrstab: rhs size");
  if (!x0.empty() && x0.size() != n) throw DimensionMismatch("idrstab: guess size");
  ensure_finite(b, "idrstab rhs");
  const auto t0 = Clock::now();

  SolveResult res;
  SolveReport& rep = res.report;
  rep.bnorm = norm2(b);

  Vector x = x0.empty() ? Vector(n, Complex(0.0)) : x0;
  Vector r;
  if (is_zero(x)) {
    r = b;
  } else {
    ensure_finite(x, "idrstab guess");
    r = b;
    Vector ax = a.apply(x);
    for (std::size_t i = 0; i < n; ++i) r[i] -= ax[i];
    rep.h_mv_aux++;
  }

  DenseMatrix p, u, v;
  std::size_t base_level = 0;
  std::vector<Complex> omega_levels;
  bool omegas_complete = true;
  if (recycle) {
    validate(*recycle, a);
    rep.h_mv_aux += static_cast<std::int64_t>(recycle->s);  // validation applies A to U
    if (recycle->s != cfg.s) throw ConfigError("idrstab: recycle s != config s");
    p = recycle->p;
    u = recycle->u;
    v = recycle->v;
    base_level = recycle->level_J;
    omega_levels = recycle->omega_history;
    omegas_complete = omega_levels.size() == base_level;
    if (!omegas_complete) omega_levels.clear();
  } else {
    const bool real = a.is_real() && is_real(b) && is_real(x);
    p = make_cut_space(n, cfg.s, cfg.seed, real);
    std::mt19937_64 rng(cfg.seed ^ 0x9e3779b97f4a7c15ull);
    ArnoldiResult ai = arnoldi_init(a, r, cfg.s, rng);
    u = std::move(ai.u);
    v = std::move(ai.v);
    rep.h_mv += ai.mv_cost;
  }

  double resnorm = norm2(r);
  std::size_t level = 0;
  rep.residual_history.push_back({0, rep.total_mv(), base_level, resnorm, ns_since(t0)});

  const double threshold = cfg.tol * rep.bnorm;
  try {
    while (resnorm > threshold && rep.h_mv < cfg.max_mv) {
      // the state works on copies so that a mid-cycle breakdown leaves the
      // last completed cycle's x, r, U, V intact for the partial report
      IterationState st = IterationState::start(x, r, u, v);
      for (std::size_t k = 0; k < cfg.ell; ++k) level_iteration(st, a, p, k, rep);
      PolyOut po = poly_combination(st, cfg.ell);
      x = std::move(po.x);
      r = std::move(po.r);
      u = std::move(po.u);
      v = std::move(po.v);

      rep.cycles++;
      level += cfg.ell;
      rep.h_rd = static_cast<std::int64_t>(level * cfg.s) +
                 (recycle ? static_cast<std::int64_t>(base_level * (cfg.s - 1)) : 0);
      if (omegas_complete) omegas_complete = extract_omegas(po.tau, omega_levels);
      rep.omega_history.push_back(std::move(po.tau));

      if (cfg.true_residual_each_cycle) {
        r = b;
        Vector ax = a.apply(x);
        for (std::size_t i = 0; i < n; ++i) r[i] -= ax[i];
        rep.h_mv_aux++;
      }
      resnorm = norm2(r);
      rep.residual_history.push_back(
          {rep.cycles, rep.total_mv(), base_level + level, resnorm, ns_since(t0)});

      if (fetch_policy && !res.fetched) {
        const bool hit =
            (fetch_policy->kind == FetchPolicy::Kind::AtCycle &&
             rep.cycles == fetch_policy->cycle) ||
            (fetch_policy->kind == FetchPolicy::Kind::AtHalfTolerance &&
             resnorm <= std::sqrt(cfg.tol) * rep.bnorm);
        if (hit)
          res.fetched = fetch(p, u, v, omegas_complete ? omega_levels : std::vector<Complex>{},
                              base_level + level, a.fingerprint());
      }
    }
    rep.status = resnorm <= threshold ? SolveStatus::Converged : SolveStatus::MaxMV;
  } catch (const BreakdownError& e) {
    rep.status = SolveStatus::Breakdown;
    rep.breakdown_reason = e.what();
  }

  rep.final_resnorm = resnorm;
  rep.wall_ns_total = ns_since(t0);
  res.x = std::move(x);
  res.final_data = fetch(p, u, v, omegas_complete ? omega_levels : std::vector<Complex>{},
                         base_level + level, a.fingerprint());
  return res;
}

SolveResult mstab_solve(const LinearOperator& a, const Vector& b, const Vector& x0,
                        const SolverConfig& cfg, const RecycleData& recycle,
                        const FetchPolicy* fetch_policy) {
  return idrstab_solve(a, b, x0, cfg, &recycle, fetch_policy);
}

}  // namespace mstab
