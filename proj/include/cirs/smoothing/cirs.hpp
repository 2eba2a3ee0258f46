#pragma once

#include <cmath>
#include <concepts>
#include <string>
#include <utility>

#include "cirs/linalg/dense.hpp"
#include "cirs/linalg/errors.hpp"
#include "cirs/linalg/kernels.hpp"
#include "cirs/linalg/operator.hpp"

namespace cirs {

/// Any callable mapping a block to its image under the problem operator.
template <class F>
concept BlockMap = requires(F f, const Block& v) {
  { f(v) } -> std::convertible_to<Block>;
};

/// The quadruple (Y, S, V, eta) of cross-interactive smoothing plus the
/// cached image U = A(V).
struct SmootherState {
  Block y_hat;
  Block s_hat;
  Block v_hat;
  Block u_hat;
  double eta_hat = 0.0;
  double zeta_hat = 1.0;
};

/// The primary approximation and residual handed back to the solver.
struct PrimaryIterates {
  Block x;
  Block r;
};

/// Minimizer of ||S - eta U|| over real eta.
inline double smoothing_parameter(const Block& s_hat, const Block& u_hat) {
  const double uu = frobenius_inner(u_hat, u_hat);
  if (!(uu > 0.0) || !std::isfinite(uu))
    throw BreakdownError("smoothing direction annihilated by the operator (<U,U> = " +
                             std::to_string(uu) + ")",
                         uu);
  return frobenius_inner(s_hat, u_hat) / uu;
}

/// Cross-interactive residual smoothing for global and block iterations.
///
/// Each step consumes the primary direction X_{k+1} - X_k, advances the
/// smoothed pair with one operator application, and reconstructs the primary
/// pair from the smoothed one. The caller adopts the returned iterates as its
/// own X and R; it must not update its own copies independently.
class CirsSmoother {
 public:
  CirsSmoother(const Block& x0, const Block& r0) { resynchronize(x0, r0); }

  const SmootherState& state() const noexcept { return state_; }
  double smoothed_residual_norm() const { return frobenius_norm(state_.s_hat); }

  /// Restarts smoothing from the primary pair (x, r): Y = x, S = r, V = O, eta = 0.
  void resynchronize(const Block& x, const Block& r) {
    if (!x.same_shape(r)) throw DimensionError("CirsSmoother: x and r shapes differ");
    state_.y_hat = x;
    state_.s_hat = r;
    state_.v_hat = Block(x.rows(), x.cols());
    state_.u_hat = Block(x.rows(), x.cols());
    state_.eta_hat = 0.0;
    state_.zeta_hat = 1.0;
  }

  template <BlockMap Apply>
  PrimaryIterates step(const Block& p_hat, Apply&& apply) {
    auto& st = state_;
    st.v_hat *= st.zeta_hat;
    st.v_hat += p_hat;
    st.u_hat = apply(st.v_hat);
    const double eta = smoothing_parameter(st.s_hat, st.u_hat);
    st.eta_hat = eta;
    st.zeta_hat = 1.0 - eta;
    st.y_hat += eta * st.v_hat;
    st.s_hat -= eta * st.u_hat;
    return {st.y_hat + st.zeta_hat * st.v_hat, st.s_hat - st.zeta_hat * st.u_hat};
  }

  PrimaryIterates step(const Block& p_hat, const ProblemOperator& op) {
    return step(p_hat, [&op](const Block& v) { return op.apply(v); });
  }

 private:
  SmootherState state_;
};

}  // namespace cirs
