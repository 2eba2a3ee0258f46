#pragma once

#include <optional>
#include <string>
#include <utility>

#include "cirs/linalg/dense.hpp"
#include "cirs/linalg/errors.hpp"
#include "cirs/linalg/kernels.hpp"
#include "cirs/linalg/operator.hpp"
#include "cirs/linalg/qr.hpp"
#include "cirs/linalg/small_solve.hpp"
#include "cirs/smoothing/cirs.hpp"
#include "cirs/solvers/common.hpp"

namespace cirs {

namespace detail {

inline void require_block_problem(const ProblemOperator& op, const Block& b) {
  if (op.is_sylvester())
    throw ConfigError("block solvers are defined for A X = B only, not Sylvester operators");
  if (b.rows() < b.cols())
    throw DimensionError("block solvers need at least as many rows as right-hand sides");
}

inline std::string block_solver_name(const char* base, Smoothing s) {
  return s == Smoothing::none ? std::string(base) : "s-" + std::string(base);
}

/// Decides whether this iteration smooths and resynchronizes the smoother on
/// re-entry. `metric` is the current stopping quantity.
class PhaseSwitch {
 public:
  PhaseSwitch(Smoothing mode, double theta) : mode_(mode), theta_(theta) {}

  bool smoothing_enabled() const noexcept { return mode_ != Smoothing::none; }

  /// Returns true when the iteration should apply CIRS; `resumed` reports a
  /// direct-to-smooth transition.
  bool decide(double metric, double b_norm, bool& resumed) {
    resumed = false;
    if (mode_ == Smoothing::none) return false;
    if (mode_ == Smoothing::cirs) return true;
    const bool smooth =
        switching_controller(metric, b_norm, theta_) == SwitchDecision::smooth;
    resumed = smooth && !active_;
    if (active_ && !smooth) ++switches_;
    active_ = smooth;
    return smooth;
  }

  std::size_t switches() const noexcept { return switches_; }

 private:
  Smoothing mode_;
  double theta_;
  bool active_ = true;
  std::size_t switches_ = 0;
};

}  // namespace detail

/// Block BiCGSTAB with orthonormalized direction matrix (Bl-BiCGSTABpQ) and
/// its smoothed variant.
///
/// With smoothing, CIRS runs on the BiCG-part sequence X'_k using the
/// direction omega_{k-1} R'_{k-1} + P_k alpha_k, and A P_k is recovered from
/// V alpha = R - R'. Under cirs_switched the iteration falls back to the
/// direct BiCG update (explicit A P_k) while ||S||/||B|| <= theta; on
/// re-entry the smoother restarts from the current (X, R).
inline SolveResult bl_bicgstab_pq(const ProblemOperator& op, const Block& b,
                                  const BlockSolverConfig& cfg) {
  detail::require_block_problem(op, b);
  detail::SolveContext ctx(op, b, cfg, detail::block_solver_name("bl-bicgstab-pq", cfg.smoothing));
  auto& nm = ctx.norms();
  detail::PhaseSwitch phase(cfg.smoothing, cfg.theta);

  Block x(b.rows(), b.cols());
  Block r = b;
  std::optional<CirsSmoother> sm;
  if (phase.smoothing_enabled()) sm.emplace(x, r);
  bool smoothing_now = phase.smoothing_enabled();
  auto smoother_state = [&]() { return sm && smoothing_now ? &sm->state() : nullptr; };

  std::size_t k = 0;
  try {
    const Block& rt0 = b;
    Block zt0;
    if (sm) zt0 = ctx.apply_adjoint(rt0);

    Block p = r;
    Block r_prime(b.rows(), b.cols());
    Block x_prime(b.rows(), b.cols());
    double omega = 0.0;

    ctx.record(0, x, r, {.smoother = smoother_state()});
    double metric = frobenius_norm(r);

    for (k = 1;; ++k) {
      if (ctx.converged(metric)) {
        ctx.set_status(TerminationStatus::converged);
        break;
      }
      if (k > ctx.max_iterations()) {
        ctx.set_status(TerminationStatus::max_iterations);
        break;
      }
      bool resumed = false;
      smoothing_now = phase.decide(metric, ctx.b_norm(), resumed);
      if (resumed) {
        sm->resynchronize(x, r);
        omega = 0.0;
      }

      p = qf(p);
      const SmallDense rhs = transpose_multiply(rt0, r);
      Block v;
      SmallDense sigma;
      SmallDense alpha;
      if (smoothing_now) {
        sigma = transpose_multiply(zt0, p);
        alpha = ctx.solve_small(sigma, rhs);
        Block p_hat = multiply(p, alpha);
        if (omega != 0.0) p_hat += omega * r_prime;
        auto next = sm->step(p_hat, ctx.applier());
        x_prime = std::move(next.x);
        r_prime = std::move(next.r);
        ++nm.smoothing_steps;
        metric = sm->smoothed_residual_norm();
      } else {
        v = ctx.apply(p);
        sigma = transpose_multiply(rt0, v);
        alpha = ctx.solve_small(sigma, rhs);
        x_prime = x + multiply(p, alpha);
        r_prime = r - multiply(v, alpha);
        ++nm.intermediate_updates;
        metric = frobenius_norm(r_prime);
      }

      if (ctx.converged(metric)) {
        x = x_prime;
        r = r_prime;
        ctx.record(k, x, r, {.x_prime = &x_prime, .r_prime = &r_prime,
                             .smoother = smoother_state()});
        continue;
      }

      if (smoothing_now) v = ctx.solve_right_block(r - r_prime, alpha);
      const Block t = ctx.apply(r_prime);
      const double tt = frobenius_inner(t, t);
      if (!(tt > 0.0) || !std::isfinite(tt)) throw BreakdownError("<T, T> vanished", tt);
      omega = frobenius_inner(r_prime, t) / tt;
      x = x_prime + omega * r_prime;
      r = r_prime - omega * t;
      ++nm.primary_updates;

      const SmallDense beta = ctx.solve_small(sigma, transpose_multiply(rt0, t));
      p -= omega * v;
      p = r - multiply(p, beta);

      ctx.record(k, x, r, {.x_prime = &x_prime, .r_prime = &r_prime,
                           .smoother = smoother_state()});
      metric = smoothing_now ? sm->smoothed_residual_norm() : frobenius_norm(r);
    }
  } catch (const BreakdownError& e) {
    ctx.fail(k, e.what());
  }
  return ctx.finish(std::move(x), r, smoother_state());
}

inline SolveResult s_bl_bicgstab_pq(const ProblemOperator& op, const Block& b,
                                    BlockSolverConfig cfg) {
  if (cfg.smoothing == Smoothing::none) cfg.smoothing = Smoothing::cirs;
  return bl_bicgstab_pq(op, b, cfg);
}

/// Block BiCGGR with residual orthonormalization (Bl-BiCGGRrQ) and its
/// smoothed variant.
///
/// The unsmoothed method never forms R: it carries R_k = Q_k xi_k through
/// [Q_{k+1}, tau] = qr(Q_k - omega W_k - A U_k), xi_{k+1} = tau xi_k, and
/// reports ||xi_k|| as the recursive residual norm. With smoothing, the
/// primary pair comes from CIRS with direction (omega Q + U) xi, A U is
/// recovered from T xi = R, and Q, xi are refreshed by a QR of R. Inverting
/// xi is what the switching strategy avoids once ||S||/||B|| <= theta.
inline SolveResult bl_bicggr_rq(const ProblemOperator& op, const Block& b,
                                const BlockSolverConfig& cfg) {
  detail::require_block_problem(op, b);
  detail::SolveContext ctx(op, b, cfg, detail::block_solver_name("bl-bicggr-rq", cfg.smoothing));
  auto& nm = ctx.norms();
  detail::PhaseSwitch phase(cfg.smoothing, cfg.theta);

  Block x(b.rows(), b.cols());
  Block r = b;  // explicit residual; stale during unsmoothed steps
  bool r_current = true;
  std::optional<CirsSmoother> sm;
  if (phase.smoothing_enabled()) sm.emplace(x, r);
  bool smoothing_now = phase.smoothing_enabled();
  auto smoother_state = [&]() { return sm && smoothing_now ? &sm->state() : nullptr; };

  auto factors = qr_thin(r);
  Block q = std::move(factors.q);
  SmallDense xi = std::move(factors.r);
  auto explicit_residual = [&]() -> const Block& {
    if (!r_current) {
      r = multiply(q, xi);
      r_current = true;
    }
    return r;
  };
  auto record = [&](std::size_t it, bool xi_norm_reported) {
    detail::RecordExtras extra{.smoother = smoother_state(), .q = &q, .xi = &xi};
    extra.xi_condition = triangular_condition_1norm(xi);
    if (xi_norm_reported) extra.recursive_norm = frobenius_norm(xi);
    ctx.record(it, x, explicit_residual(), extra);
  };

  std::size_t k = 0;
  try {
    const Block& rt0 = b;
    Block w = ctx.apply(q);
    SmallDense rho_minus = transpose_multiply(rt0, q);
    Block p = q;
    Block v = w;

    record(0, false);
    double metric = frobenius_norm(r);

    for (k = 1;; ++k) {
      if (ctx.converged(metric)) {
        ctx.set_status(TerminationStatus::converged);
        break;
      }
      if (k > ctx.max_iterations()) {
        ctx.set_status(TerminationStatus::max_iterations);
        break;
      }
      bool resumed = false;
      smoothing_now = phase.decide(metric, ctx.b_norm(), resumed);
      if (resumed) sm->resynchronize(x, explicit_residual());

      const SmallDense alpha = ctx.solve_small(transpose_multiply(rt0, v), rho_minus);
      const double ww = frobenius_inner(w, w);
      if (!(ww > 0.0) || !std::isfinite(ww)) throw BreakdownError("<W, W> vanished", ww);
      const double omega = frobenius_inner(w, q) / ww;
      detail::require_nonvanishing(omega, 0.0, "omega");
      Block u = p - omega * v;
      u = multiply(u, alpha);
      Block z;

      if (smoothing_now) {
        const Block p_hat = multiply(omega * q + u, xi);
        auto next = sm->step(p_hat, ctx.applier());
        x = std::move(next.x);
        r = std::move(next.r);
        r_current = true;
        ++nm.smoothing_steps;
        metric = sm->smoothed_residual_norm();
        if (ctx.converged(metric)) {
          record(k, false);
          continue;
        }
        Block t;
        try {
          t = ctx.solve_right_block(r, xi);
        } catch (const BreakdownError& e) {
          throw BreakdownError(std::string("xi singular to working precision (") + e.what() +
                                   "); the switching strategy (cirs_switched) avoids this solve",
                               e.magnitude());
        }
        z = q - omega * w;
        z -= t;
        auto qr = qr_thin(r);
        q = std::move(qr.q);
        xi = std::move(qr.r);
      } else {
        x += multiply(omega * q + u, xi);
        ++nm.primary_updates;
        z = ctx.apply(u);
        Block next_dir = q - omega * w;
        next_dir -= z;
        auto qr = qr_thin(next_dir);
        q = std::move(qr.q);
        xi = multiply(qr.r, xi);
        r_current = false;
        metric = frobenius_norm(xi);
        if (ctx.converged(metric)) {
          record(k, true);
          continue;
        }
      }

      w = ctx.apply(q);
      const SmallDense rho_plus = transpose_multiply(rt0, q);
      const SmallDense gamma = ctx.solve_small(rho_minus, rho_plus / omega);
      rho_minus = rho_plus;
      p = q + multiply(u, gamma);
      v = w + multiply(z, gamma);

      record(k, !smoothing_now);
      if (!smoothing_now) metric = frobenius_norm(xi);
    }
  } catch (const BreakdownError& e) {
    ctx.fail(k, e.what());
  }
  const Block& r_final = explicit_residual();
  return ctx.finish(std::move(x), r_final, smoother_state());
}

inline SolveResult s_bl_bicggr_rq(const ProblemOperator& op, const Block& b,
                                  BlockSolverConfig cfg) {
  if (cfg.smoothing == Smoothing::none) cfg.smoothing = Smoothing::cirs;
  return bl_bicggr_rq(op, b, cfg);
}

}  // namespace cirs
