#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <iostream>
#include <random>
#include <vector>

#include "cirs/linalg/dense.hpp"
#include "cirs/linalg/errors.hpp"
#include "cirs/linalg/kernels.hpp"
#include "cirs/linalg/random.hpp"
#include "cirs/linalg/sparse.hpp"

namespace cirs {

/// Non-symmetric Toeplitz matrix with a_ii = 2, a_{i,i+1} = 1, a_{i+4,i} = -1.
/// For n < 5 the -1 diagonal is empty; a warning goes to `warn`.
inline SparseMatrix gen_toeplitz(std::size_t n, std::ostream& warn = std::clog) {
  if (n == 0) throw DimensionError("gen_toeplitz: n must be positive");
  if (n < 5) warn << "warning: gen_toeplitz(" << n << "): the -1 diagonal is empty\n";
  std::vector<Triplet> entries;
  entries.reserve(3 * n);
  for (std::size_t i = 0; i < n; ++i) {
    entries.push_back({i, i, 2.0});
    if (i + 1 < n) entries.push_back({i, i + 1, 1.0});
    if (i + 4 < n) entries.push_back({i + 4, i, -1.0});
  }
  return SparseMatrix::from_triplets(n, n, std::move(entries));
}

/// Uniform(-1, 1) block; with `normalize` scaled to unit Frobenius norm.
inline Block gen_random_block(std::size_t n, std::size_t s, std::uint64_t seed,
                              bool normalize = false) {
  if (n == 0 || s == 0) throw DimensionError("gen_random_block: n and s must be positive");
  Block b = random_block(n, s, seed);
  if (normalize) b /= frobenius_norm(b);
  return b;
}

/// Non-symmetric, strictly diagonally dominant sparse matrix with about
/// `per_row` off-diagonal entries per row. `dominance` > 1 controls the
/// condition number: larger is better conditioned.
inline SparseMatrix gen_random_sparse(std::size_t n, std::size_t per_row, std::uint64_t seed,
                                      double dominance = 2.0) {
  if (n == 0) throw DimensionError("gen_random_sparse: n must be positive");
  std::mt19937_64 gen(seed);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::uniform_real_distribution<double> val(-1.0, 1.0);
  std::vector<Triplet> entries;
  std::vector<double> row_sum(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < per_row && n > 1; ++k) {
      const std::size_t j = pick(gen);
      if (j == i) continue;
      const double v = val(gen);
      entries.push_back({i, j, v});
      row_sum[i] += std::abs(v);
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double sign = (i % 3 == 0) ? -1.0 : 1.0;
    entries.push_back({i, i, sign * (dominance * row_sum[i] + 1.0)});
  }
  return SparseMatrix::from_triplets(n, n, std::move(entries));
}

}  // namespace cirs
