#include "mstab/solvers/baselines.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>

#include "mstab/dense.hpp"
#include "mstab/errors.hpp"
#include "mstab/kernels.hpp"

namespace mstab {

namespace {

using Clock = std::chrono::steady_clock;

std::int64_t ns_since(Clock::time_point t0) {
  return std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - t0).count();
}

Vector initial_residual(const LinearOperator& a, const Vector& b, const Vector& x,
                        SolveReport& rep) {
  const std::size_t n = a.size();
  Vector r = b;
  if (std::any_of(x.begin(), x.end(), [](Complex z) { return z != Complex(0.0); })) {
    Vector ax = a.apply(x);
    for (std::size_t i = 0; i < n; ++i) r[i] -= ax[i];
    rep.h_mv_aux++;
  }
  return r;
}

}  // namespace

DenseMatrix make_cut_space(std::size_t n, std::size_t s, std::uint64_t seed, bool real) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int attempt = 0; attempt < 4; ++attempt) {
    DenseMatrix g(n, s);
    for (Complex& z : g.data())
      z = real ? Complex(normal(rng)) : Complex(normal(rng), normal(rng));
    OrthoResult q = orthonormalize(g);
    if (q.rank == s) return std::move(q.q);
  }
  throw Error("make_cut_space: could not draw a full-rank cut-space");
}

std::pair<Vector, SolveReport> gmres_solve(const LinearOperator& a, const Vector& b,
                                           const Vector& x0, double tol,
                                           std::int64_t max_it) {
  const std::size_t n = a.size();
  if (b.size() != n) throw DimensionMismatch("gmres: rhs size");
  const auto t0 = Clock::now();

  SolveReport rep;
  rep.bnorm = norm2(b);
  Vector x = x0.empty() ? Vector(n, Complex(0.0)) : x0;
  Vector r = initial_residual(a, b, x, rep);
  const double r0norm = norm2(r);
  rep.residual_history.push_back({0, rep.total_mv(), 0, r0norm, ns_since(t0)});

  const double threshold = tol * rep.bnorm;
  if (r0norm <= threshold || max_it == 0) {
    rep.status = r0norm <= threshold ? SolveStatus::Converged : SolveStatus::MaxMV;
    rep.final_resnorm = r0norm;
    rep.wall_ns_total = ns_since(t0);
    return {std::move(x), std::move(rep)};
  }

  const std::size_t m_cap = static_cast<std::size_t>(std::min<std::int64_t>(max_it, n));
  DenseMatrix q(n, m_cap + 1);
  DenseMatrix hess(m_cap + 1, m_cap);
  std::vector<double> cs(m_cap);
  std::vector<Complex> sn(m_cap);
  Vector g(m_cap + 1, Complex(0.0));
  g[0] = r0norm;
  {
    auto q0 = q.col(0);
    for (std::size_t i = 0; i < n; ++i) q0[i] = r[i] / r0norm;
  }

  double resnorm = r0norm;
  std::size_t it = 0;
  Vector w(n);
  while (it < m_cap && resnorm > threshold) {
    a.apply(q.col(it), w);
    rep.h_mv++;
    // modified Gram-Schmidt
    for (std::size_t i = 0; i <= it; ++i) {
      hess(i, it) = dot(q.col(i), w);
      axpy(-hess(i, it), q.col(i), w);
    }
    const double hnext = norm2(w);
    hess(it + 1, it) = hnext;
    if (hnext > 0.0) {
      auto qn = q.col(it + 1);
      for (std::size_t i = 0; i < n; ++i) qn[i] = w[i] / hnext;
    }

    // apply previous Givens rotations, then the new one
    for (std::size_t i = 0; i < it; ++i) {
      const Complex t1 = hess(i, it), t2 = hess(i + 1, it);
      hess(i, it) = cs[i] * t1 + std::conj(sn[i]) * t2;
      hess(i + 1, it) = -sn[i] * t1 + cs[i] * t2;
    }
    const Complex h1 = hess(it, it), h2 = hess(it + 1, it);
    const double denom = std::sqrt(std::norm(h1) + std::norm(h2));
    if (denom == 0.0) {
      cs[it] = 1.0;
      sn[it] = 0.0;
    } else {
      cs[it] = std::abs(h1) / denom;
      const Complex phase = h1 == Complex(0.0) ? Complex(1.0) : h1 / std::abs(h1);
      sn[it] = h2 * std::conj(phase) / denom;
      hess(it, it) = phase * denom;
      hess(it + 1, it) = 0.0;
    }
    const Complex g1 = g[it];
    g[it] = cs[it] * g1;
    g[it + 1] = -sn[it] * g1;
    resnorm = std::abs(g[it + 1]);
    ++it;
    rep.residual_history.push_back({it, rep.total_mv(), it, resnorm, ns_since(t0)});
    if (hnext == 0.0) break;  // lucky breakdown, exact solution reached
  }

  // back-substitute y and assemble x
  Vector y(it);
  for (std::size_t k = it; k-- > 0;) {
    Complex acc = g[k];
    for (std::size_t j = k + 1; j < it; ++j) acc -= hess(k, j) * y[j];
    y[k] = acc / hess(k, k);
  }
  for (std::size_t k = 0; k < it; ++k) axpy(y[k], q.col(k), x);

  rep.cycles = it;
  rep.h_rd = static_cast<std::int64_t>(it);
  rep.status = resnorm <= threshold ? SolveStatus::Converged : SolveStatus::MaxMV;
  rep.final_resnorm = resnorm;
  rep.wall_ns_total = ns_since(t0);
  return {std::move(x), std::move(rep)};
}

std::pair<Vector, SolveReport> bicg_solve(const LinearOperator& a, const Vector& b,
                                          const Vector& x0, double tol,
                                          std::int64_t max_mv, const Vector* shadow) {
  const std::size_t n = a.size();
  if (b.size() != n) throw DimensionMismatch("bicg: rhs size");
  const auto t0 = Clock::now();

  SolveReport rep;
  rep.bnorm = norm2(b);
  Vector x = x0.empty() ? Vector(n, Complex(0.0)) : x0;
  Vector r = initial_residual(a, b, x, rep);
  double resnorm = norm2(r);
  rep.residual_history.push_back({0, rep.total_mv(), 0, resnorm, ns_since(t0)});

  const double threshold = tol * rep.bnorm;
  Vector rs = shadow ? *shadow : r;
  Vector p = r, ps = rs;
  Complex rho = dot(rs, r);

  std::size_t it = 0;
  try {
    while (resnorm > threshold && rep.h_mv < max_mv) {
      if (std::abs(rho) == 0.0) throw BreakdownError("bicg: rho collapsed");
      Vector ap = a.apply(p);
      Vector aps = a.apply_adjoint(ps);
      rep.h_mv += 2;
      const Complex sigma = dot(ps, ap);
      if (std::abs(sigma) == 0.0) throw BreakdownError("bicg: sigma collapsed");
      const Complex alpha = rho / sigma;
      axpy(alpha, p, x);
      axpy(-alpha, ap, r);
      axpy(-std::conj(alpha), aps, rs);
      const Complex rho_next = dot(rs, r);
      const Complex beta = rho_next / rho;
      rho = rho_next;
      for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
      for (std::size_t i = 0; i < n; ++i) ps[i] = rs[i] + std::conj(beta) * ps[i];
      ++it;
      resnorm = norm2(r);
      rep.residual_history.push_back({it, rep.total_mv(), it, resnorm, ns_since(t0)});
    }
    rep.status = resnorm <= threshold ? SolveStatus::Converged : SolveStatus::MaxMV;
  } catch (const BreakdownError& e) {
    rep.status = SolveStatus::Breakdown;
    rep.breakdown_reason = e.what();
  }
  rep.cycles = it;
  rep.h_rd = static_cast<std::int64_t>(it);
  rep.final_resnorm = resnorm;
  rep.wall_ns_total = ns_since(t0);
  return {std::move(x), std::move(rep)};
}

std::pair<Vector, SolveReport> bicgstab_solve(const LinearOperator& a, const Vector& b,
                                              const Vector& x0, double tol,
                                              std::int64_t max_mv, const Vector* shadow) {
  const std::size_t n = a.size();
  if (b.size() != n) throw DimensionMismatch("bicgstab: rhs size");
  const auto t0 = Clock::now();

  SolveReport rep;
  rep.bnorm = norm2(b);
  Vector x = x0.empty() ? Vector(n, Complex(0.0)) : x0;
  Vector r = initial_residual(a, b, x, rep);
  double resnorm = norm2(r);
  rep.residual_history.push_back({0, rep.total_mv(), 0, resnorm, ns_since(t0)});

  const double threshold = tol * rep.bnorm;
  Vector rs = shadow ? *shadow : r;
  Vector p = r;
  Complex rho = dot(rs, r);

  std::size_t it = 0;
  Vector s(n), ap(n), as(n);
  try {
    while (resnorm > threshold && rep.h_mv < max_mv) {
      if (std::abs(rho) == 0.0) throw BreakdownError("bicgstab: rho collapsed");
      a.apply(p, ap);
      rep.h_mv++;
      const Complex denom = dot(rs, ap);
      if (std::abs(denom) == 0.0) throw BreakdownError("bicgstab: shadow projection collapsed");
      const Complex alpha = rho / denom;
      for (std::size_t i = 0; i < n; ++i) s[i] = r[i] - alpha * ap[i];
      if (norm2(s) <= threshold) {  // already converged after the BiCG half-step
        axpy(alpha, p, x);
        r = s;
        ++it;
        resnorm = norm2(r);
        rep.residual_history.push_back({it, rep.total_mv(), it, resnorm, ns_since(t0)});
        break;
      }
      a.apply(s, as);
      rep.h_mv++;
      const double as2 = std::pow(norm2(as), 2);
      if (as2 == 0.0) throw BreakdownError("bicgstab: stagnated update");
      const Complex omega = dot(as, s) / as2;
      axpy(alpha, p, x);
      axpy(omega, s, x);
      for (std::size_t i = 0; i < n; ++i) r[i] = s[i] - omega * as[i];
      const Complex rho_next = dot(rs, r);
      const Complex beta = (rho_next / rho) * (alpha / omega);
      rho = rho_next;
      for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * (p[i] - omega * ap[i]);
      ++it;
      resnorm = norm2(r);
      rep.residual_history.push_back({it, rep.total_mv(), it, resnorm, ns_since(t0)});
    }
    rep.status = resnorm <= threshold ? SolveStatus::Converged : SolveStatus::MaxMV;
  } catch (const BreakdownError& e) {
    rep.status = SolveStatus::Breakdown;
    rep.breakdown_reason = e.what();
  }
  rep.cycles = it;
  rep.h_rd = static_cast<std::int64_t>(it);
  rep.final_resnorm = resnorm;
  rep.wall_ns_total = ns_since(t0);
  return {std::move(x), std::move(rep)};
}

}  // namespace mstab
