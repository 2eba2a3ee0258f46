#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "cirs/linalg/dense.hpp"
#include "cirs/linalg/errors.hpp"

namespace cirs {

struct QrFactors {
  Block q;       ///< n x s, orthonormal columns
  SmallDense r;  ///< s x s, upper triangular, non-negative diagonal
};

/// Thin Householder QR of a tall block.
///
/// Rank-deficient input is accepted: a zero pivot column yields a zero
/// diagonal entry in r while q stays orthonormal.
inline QrFactors qr_thin(const Block& x) {
  const std::size_t n = x.rows();
  const std::size_t s = x.cols();
  if (n < s) throw DimensionError("qr_thin needs rows >= cols");

  Block work = x;
  Block reflectors(n, s);
  std::vector<double> beta(s, 0.0);

  for (std::size_t j = 0; j < s; ++j) {
    auto aj = work.column(j);
    double norm2 = 0.0;
    for (std::size_t i = j; i < n; ++i) norm2 += aj[i] * aj[i];
    if (norm2 == 0.0) continue;
    const double norm = std::sqrt(norm2);
    const double diag = aj[j] >= 0.0 ? -norm : norm;

    auto v = reflectors.column(j);
    for (std::size_t i = j; i < n; ++i) v[i] = aj[i];
    v[j] -= diag;
    double vnorm2 = 0.0;
    for (std::size_t i = j; i < n; ++i) vnorm2 += v[i] * v[i];
    beta[j] = 2.0 / vnorm2;

    for (std::size_t c = j + 1; c < s; ++c) {
      auto ac = work.column(c);
      double dot = 0.0;
      for (std::size_t i = j; i < n; ++i) dot += v[i] * ac[i];
      const double f = beta[j] * dot;
      for (std::size_t i = j; i < n; ++i) ac[i] -= f * v[i];
    }
    aj[j] = diag;
    for (std::size_t i = j + 1; i < n; ++i) aj[i] = 0.0;
  }

  QrFactors out{Block(n, s), SmallDense(s, s)};
  for (std::size_t j = 0; j < s; ++j)
    for (std::size_t i = 0; i <= j; ++i) out.r(i, j) = work(i, j);

  // Q = H_0 H_1 ... H_{s-1} [I; 0]
  for (std::size_t j = 0; j < s; ++j) out.q(j, j) = 1.0;
  for (std::size_t jj = s; jj-- > 0;) {
    if (beta[jj] == 0.0) continue;
    const auto v = reflectors.column(jj);
    for (std::size_t c = jj; c < s; ++c) {
      auto qc = out.q.column(c);
      double dot = 0.0;
      for (std::size_t i = jj; i < n; ++i) dot += v[i] * qc[i];
      const double f = beta[jj] * dot;
      for (std::size_t i = jj; i < n; ++i) qc[i] -= f * v[i];
    }
  }

  for (std::size_t j = 0; j < s; ++j) {
    if (out.r(j, j) >= 0.0) continue;
    for (std::size_t c = j; c < s; ++c) out.r(j, c) = -out.r(j, c);
    for (double& v : out.q.column(j)) v = -v;
  }
  return out;
}

/// Q-factor only.
inline Block qf(const Block& x) { return qr_thin(x).q; }

}  // namespace cirs
