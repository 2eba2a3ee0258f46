#pragma once

#include <optional>
#include <utility>

#include "cirs/linalg/dense.hpp"
#include "cirs/linalg/errors.hpp"
#include "cirs/linalg/kernels.hpp"
#include "cirs/linalg/operator.hpp"
#include "cirs/linalg/random.hpp"
#include "cirs/smoothing/cirs.hpp"
#include "cirs/solvers/common.hpp"

namespace cirs {

namespace detail {

inline void require_global_smoothing(const GlobalSolverConfig& cfg) {
  if (cfg.smoothing == Smoothing::cirs_switched)
    throw ConfigError("the switching strategy is only available for block solvers");
}

}  // namespace detail

/// Global CGS2 for A(X) = B with X0 = O, optionally with cross-interactive
/// smoothing (S-Gl-CGS2).
///
/// The shadow residuals are R~0 = B and a random R(0 (seeded by cfg.seed);
/// their adjoint images are formed once. Each iteration applies the operator
/// exactly twice in either variant: to P, and to the smoother direction (or,
/// unsmoothed, to the update direction).
inline SolveResult gl_cgs2(const ProblemOperator& op, const Block& b,
                           const GlobalSolverConfig& cfg) {
  detail::require_global_smoothing(cfg);
  const bool smooth = cfg.smoothing == Smoothing::cirs;
  detail::SolveContext ctx(op, b, cfg, smooth ? "s-gl-cgs2" : "gl-cgs2");
  auto& nm = ctx.norms();

  Block x(b.rows(), b.cols());
  Block r = b;
  std::optional<CirsSmoother> sm;
  if (smooth) sm.emplace(x, r);
  auto smoother_state = [&]() { return sm ? &sm->state() : nullptr; };

  std::size_t k = 0;
  try {
    const Block& rt0 = b;
    const Block rb0 = random_block(b.rows(), b.cols(), cfg.seed ^ detail::shadow_seed_offset);
    const Block zt0 = ctx.apply_adjoint(rt0);
    const Block zb0 = ctx.apply_adjoint(rb0);
    const double rt0_norm = frobenius_norm(rt0);
    const double rb0_norm = frobenius_norm(rb0);

    Block p = r, u = r, t = r;
    ctx.record(0, x, r, {.smoother = smoother_state()});
    double metric = sm ? sm->smoothed_residual_norm() : frobenius_norm(r);

    for (k = 1;; ++k) {
      if (ctx.converged(metric)) {
        ctx.set_status(TerminationStatus::converged);
        break;
      }
      if (k > ctx.max_iterations()) {
        ctx.set_status(TerminationStatus::max_iterations);
        break;
      }
      const Block v = ctx.apply(p);
      const double v_norm = frobenius_norm(v);
      const double sigma = frobenius_inner(rt0, v);
      const double sigma_b = frobenius_inner(rb0, v);
      detail::require_nonvanishing(sigma, rt0_norm * v_norm, "sigma");
      detail::require_nonvanishing(sigma_b, rb0_norm * v_norm, "sigma_breve");
      const double alpha = frobenius_inner(rt0, r) / sigma;
      const double alpha_b = frobenius_inner(rb0, r) / sigma_b;

      Block w = t - alpha * v;
      Block q = u - alpha_b * v;
      const Block p_hat = alpha * u + alpha_b * w;

      if (sm) {
        auto next = sm->step(p_hat, ctx.applier());
        x = std::move(next.x);
        r = std::move(next.r);
        ++nm.smoothing_steps;
      } else {
        x += p_hat;
        r -= ctx.apply(p_hat);
        ++nm.primary_updates;
      }

      const double beta = frobenius_inner(zt0, w) / sigma;
      const double beta_b = frobenius_inner(zb0, q) / sigma_b;
      u = r - beta * q;
      t = r - beta_b * w;
      q -= beta_b * p;
      p = t - beta * q;

      ctx.record(k, x, r, {.smoother = smoother_state()});
      metric = sm ? sm->smoothed_residual_norm() : frobenius_norm(r);
    }
  } catch (const BreakdownError& e) {
    ctx.fail(k, e.what());
  }
  return ctx.finish(std::move(x), r, smoother_state());
}

inline SolveResult s_gl_cgs2(const ProblemOperator& op, const Block& b, GlobalSolverConfig cfg) {
  cfg.smoothing = Smoothing::cirs;
  return gl_cgs2(op, b, cfg);
}

/// Global BiCGSTAB with R~0 = B and X0 = O, optionally smoothed (S-Gl-BiCGSTAB).
///
/// The smoothed variant runs CIRS on the BiCG-part sequence X'_k with the
/// combined direction omega_{k-1} R'_{k-1} + alpha_k P_k and recovers A P_k
/// backwards as (R_k - R'_k) / alpha_k. The unsmoothed variant forms A P_k
/// explicitly. Both apply the operator twice per full iteration; an
/// iteration whose BiCG part already meets the tolerance stops there.
inline SolveResult gl_bicgstab(const ProblemOperator& op, const Block& b,
                               const GlobalSolverConfig& cfg) {
  detail::require_global_smoothing(cfg);
  const bool smooth = cfg.smoothing == Smoothing::cirs;
  detail::SolveContext ctx(op, b, cfg, smooth ? "s-gl-bicgstab" : "gl-bicgstab");
  auto& nm = ctx.norms();

  Block x(b.rows(), b.cols());
  Block r = b;
  std::optional<CirsSmoother> sm;
  if (smooth) sm.emplace(x, r);
  auto smoother_state = [&]() { return sm ? &sm->state() : nullptr; };

  std::size_t k = 0;
  try {
    const Block& rt0 = b;
    const double rt0_norm = frobenius_norm(rt0);
    Block zt0;
    if (smooth) zt0 = ctx.apply_adjoint(rt0);

    Block p = r;
    Block r_prime(b.rows(), b.cols());
    Block x_prime(b.rows(), b.cols());
    double omega = 0.0;

    ctx.record(0, x, r, {.smoother = smoother_state()});
    double metric = sm ? sm->smoothed_residual_norm() : frobenius_norm(r);

    for (k = 1;; ++k) {
      if (ctx.converged(metric)) {
        ctx.set_status(TerminationStatus::converged);
        break;
      }
      if (k > ctx.max_iterations()) {
        ctx.set_status(TerminationStatus::max_iterations);
        break;
      }
      const double rho = frobenius_inner(rt0, r);
      detail::require_nonvanishing(rho, rt0_norm * frobenius_norm(r), "<R~0, R>");

      Block v;
      double sigma = 0.0;
      double alpha = 0.0;
      if (sm) {
        sigma = frobenius_inner(zt0, p);
        detail::require_nonvanishing(sigma, frobenius_norm(zt0) * frobenius_norm(p), "sigma");
        alpha = rho / sigma;
        const Block p_hat = omega * r_prime + alpha * p;
        auto next = sm->step(p_hat, ctx.applier());
        x_prime = std::move(next.x);
        r_prime = std::move(next.r);
        ++nm.smoothing_steps;
        metric = sm->smoothed_residual_norm();
      } else {
        v = ctx.apply(p);
        sigma = frobenius_inner(rt0, v);
        detail::require_nonvanishing(sigma, rt0_norm * frobenius_norm(v), "sigma");
        alpha = rho / sigma;
        x_prime = x + alpha * p;
        r_prime = r - alpha * v;
        ++nm.primary_updates;
        metric = frobenius_norm(r_prime);
      }

      if (ctx.converged(metric)) {
        x = x_prime;
        r = r_prime;
        ctx.record(k, x, r, {.x_prime = &x_prime, .r_prime = &r_prime,
                             .smoother = smoother_state()});
        continue;
      }

      if (sm) v = (r - r_prime) / alpha;
      const Block t = ctx.apply(r_prime);
      const double tt = frobenius_inner(t, t);
      if (!(tt > 0.0) || !std::isfinite(tt)) throw BreakdownError("<T, T> vanished", tt);
      omega = frobenius_inner(r_prime, t) / tt;
      x = x_prime + omega * r_prime;
      r = r_prime - omega * t;
      ++nm.primary_updates;

      const double beta = frobenius_inner(rt0, t) / sigma;
      p -= omega * v;
      p = r - beta * p;

      ctx.record(k, x, r, {.x_prime = &x_prime, .r_prime = &r_prime,
                           .smoother = smoother_state()});
      metric = sm ? sm->smoothed_residual_norm() : frobenius_norm(r);
    }
  } catch (const BreakdownError& e) {
    ctx.fail(k, e.what());
  }
  return ctx.finish(std::move(x), r, smoother_state());
}

inline SolveResult s_gl_bicgstab(const ProblemOperator& op, const Block& b,
                                 GlobalSolverConfig cfg) {
  cfg.smoothing = Smoothing::cirs;
  return gl_bicgstab(op, b, cfg);
}

}  // namespace cirs
