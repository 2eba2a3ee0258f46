#pragma once

#include "cirs/linalg/dense.hpp"
#include "cirs/linalg/errors.hpp"
#include "cirs/linalg/kernels.hpp"

namespace cirs {

struct SrsState {
  Block y;
  Block s;
};

/// Simple (one-way) residual smoothing of a given primary sequence.
class SimpleSmoother {
 public:
  SimpleSmoother(const Block& x0, const Block& r0) : state_{x0, r0} {
    if (!x0.same_shape(r0)) throw DimensionError("SimpleSmoother: x and r shapes differ");
  }

  const SrsState& state() const noexcept { return state_; }

  /// Absorbs the primary pair (x_k, r_k); returns the eta that was used.
  /// Coinciding residuals give eta = 1.
  double step(const Block& x_k, const Block& r_k) {
    const Block diff = r_k - state_.s;
    const double dd = frobenius_inner(diff, diff);
    const double eta = dd == 0.0 ? 1.0 : -frobenius_inner(state_.s, diff) / dd;
    state_.y = (1.0 - eta) * state_.y + eta * x_k;
    state_.s = (1.0 - eta) * state_.s + eta * r_k;
    return eta;
  }

 private:
  SrsState state_;
};

}  // namespace cirs
