#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "cirs/linalg/dense.hpp"
#include "cirs/linalg/errors.hpp"
#include "cirs/linalg/kernels.hpp"

namespace cirs {

/// Pivots below this multiple of u * ||M||_F count as zero.
inline constexpr double singular_pivot_factor = 1e2;

namespace detail {

inline double singular_threshold(const SmallDense& m) {
  return singular_pivot_factor * unit_roundoff * frobenius_norm(m);
}

inline void require_square(const SmallDense& m, const char* who) {
  if (m.rows() != m.cols())
    throw DimensionError(std::string(who) + ": matrix must be square, got " +
                         shape_str(m.rows(), m.cols()));
}

}  // namespace detail

/// PM = LU with partial pivoting; L unit lower and U upper share storage.
class LuFactorization {
 public:
  explicit LuFactorization(const SmallDense& m) : lu_(m), perm_(m.rows()) {
    detail::require_square(m, "LuFactorization");
    const std::size_t s = m.rows();
    const double tiny = detail::singular_threshold(m);
    for (std::size_t i = 0; i < s; ++i) perm_[i] = i;
    for (std::size_t k = 0; k < s; ++k) {
      std::size_t p = k;
      for (std::size_t i = k + 1; i < s; ++i)
        if (std::abs(lu_(i, k)) > std::abs(lu_(p, k))) p = i;
      const double pivot = lu_(p, k);
      if (!(std::abs(pivot) >= tiny) || pivot == 0.0)
        throw BreakdownError("singular matrix: pivot " + std::to_string(std::abs(pivot)) +
                                 " at column " + std::to_string(k),
                             std::abs(pivot));
      if (p != k) {
        std::swap(perm_[p], perm_[k]);
        for (std::size_t j = 0; j < s; ++j) std::swap(lu_(p, j), lu_(k, j));
      }
      for (std::size_t i = k + 1; i < s; ++i) {
        const double l = lu_(i, k) / lu_(k, k);
        lu_(i, k) = l;
        for (std::size_t j = k + 1; j < s; ++j) lu_(i, j) -= l * lu_(k, j);
      }
    }
  }

  std::size_t order() const noexcept { return lu_.rows(); }

  /// Solves M alpha = rhs.
  SmallDense solve(const SmallDense& rhs) const {
    const std::size_t s = order();
    if (rhs.rows() != s) throw DimensionError("LuFactorization::solve: rhs row count");
    SmallDense x(s, rhs.cols());
    for (std::size_t c = 0; c < rhs.cols(); ++c) {
      for (std::size_t i = 0; i < s; ++i) {
        double v = rhs(perm_[i], c);
        for (std::size_t k = 0; k < i; ++k) v -= lu_(i, k) * x(k, c);
        x(i, c) = v;
      }
      for (std::size_t i = s; i-- > 0;) {
        double v = x(i, c);
        for (std::size_t k = i + 1; k < s; ++k) v -= lu_(i, k) * x(k, c);
        x(i, c) = v / lu_(i, i);
      }
    }
    return x;
  }

  /// Solves T M = rhs for T (n x s).
  Block solve_right(const Block& rhs) const {
    const std::size_t s = order();
    if (rhs.cols() != s) throw DimensionError("LuFactorization::solve_right: rhs column count");
    const std::size_t n = rhs.rows();
    // M = P^T L U. With T1 = T P^T L: T1 U = rhs, then T2 L = T1, T = T2 P.
    Block t1(n, s);
    for (std::size_t j = 0; j < s; ++j) {
      auto out = t1.column(j);
      const auto in = rhs.column(j);
      for (std::size_t r = 0; r < n; ++r) out[r] = in[r];
      for (std::size_t i = 0; i < j; ++i) {
        const double u = lu_(i, j);
        if (u == 0.0) continue;
        const auto ti = t1.column(i);
        for (std::size_t r = 0; r < n; ++r) out[r] -= u * ti[r];
      }
      const double d = lu_(j, j);
      for (std::size_t r = 0; r < n; ++r) out[r] /= d;
    }
    for (std::size_t j = s; j-- > 0;) {
      auto out = t1.column(j);
      for (std::size_t i = j + 1; i < s; ++i) {
        const double l = lu_(i, j);
        if (l == 0.0) continue;
        const auto ti = t1.column(i);
        for (std::size_t r = 0; r < n; ++r) out[r] -= l * ti[r];
      }
    }
    Block t(n, s);
    for (std::size_t i = 0; i < s; ++i) {
      auto dst = t.column(perm_[i]);
      const auto src = t1.column(i);
      for (std::size_t r = 0; r < n; ++r) dst[r] = src[r];
    }
    return t;
  }

 private:
  SmallDense lu_;
  std::vector<std::size_t> perm_;
};

/// Exact structural test: every entry below the diagonal is zero.
inline bool is_upper_triangular(const SmallDense& m) {
  for (std::size_t j = 0; j < m.cols(); ++j)
    for (std::size_t i = j + 1; i < m.rows(); ++i)
      if (m(i, j) != 0.0) return false;
  return true;
}

/// alpha with m alpha = rhs.
inline SmallDense solve_small(const SmallDense& m, const SmallDense& rhs) {
  return LuFactorization(m).solve(rhs);
}

/// T with T m = rhs. Upper-triangular m takes column back-substitution.
inline Block solve_right_block(const Block& rhs, const SmallDense& m) {
  detail::require_square(m, "solve_right_block");
  const std::size_t s = m.rows();
  if (rhs.cols() != s)
    throw DimensionError("solve_right_block: rhs is " +
                         detail::shape_str(rhs.rows(), rhs.cols()) + ", m is " +
                         detail::shape_str(s, s));
  if (!is_upper_triangular(m)) return LuFactorization(m).solve_right(rhs);

  const double tiny = detail::singular_threshold(m);
  const std::size_t n = rhs.rows();
  Block t(n, s);
  for (std::size_t j = 0; j < s; ++j) {
    const double d = m(j, j);
    if (!(std::abs(d) >= tiny) || d == 0.0)
      throw BreakdownError("singular triangular factor: diagonal " + std::to_string(std::abs(d)) +
                               " at column " + std::to_string(j),
                           std::abs(d));
    auto out = t.column(j);
    const auto in = rhs.column(j);
    for (std::size_t r = 0; r < n; ++r) out[r] = in[r];
    for (std::size_t i = 0; i < j; ++i) {
      const double u = m(i, j);
      if (u == 0.0) continue;
      const auto ti = t.column(i);
      for (std::size_t r = 0; r < n; ++r) out[r] -= u * ti[r];
    }
    for (std::size_t r = 0; r < n; ++r) out[r] /= d;
  }
  return t;
}

/// kappa_1 of an upper-triangular matrix from its explicit inverse;
/// +inf when a diagonal entry is zero.
inline double triangular_condition_1norm(const SmallDense& r) {
  detail::require_square(r, "triangular_condition_1norm");
  const std::size_t s = r.rows();
  SmallDense inv(s, s);
  for (std::size_t j = 0; j < s; ++j) {
    if (r(j, j) == 0.0) return std::numeric_limits<double>::infinity();
    inv(j, j) = 1.0 / r(j, j);
    for (std::size_t i = j; i-- > 0;) {
      double v = 0.0;
      for (std::size_t k = i + 1; k <= j; ++k) v += r(i, k) * inv(k, j);
      inv(i, j) = -v / r(i, i);
    }
  }
  auto norm1 = [s](const SmallDense& m) {
    double best = 0.0;
    for (std::size_t j = 0; j < s; ++j) {
      double col = 0.0;
      for (std::size_t i = 0; i < s; ++i) col += std::abs(m(i, j));
      best = std::max(best, col);
    }
    return best;
  };
  return norm1(r) * norm1(inv);
}

}  // namespace cirs
