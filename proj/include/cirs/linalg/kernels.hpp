#pragma once

#include <cmath>
#include <cstddef>
#include <string>

#include "cirs/linalg/dense.hpp"
#include "cirs/linalg/errors.hpp"
#include "cirs/linalg/sparse.hpp"

namespace cirs {

namespace detail {
inline std::string shape_str(std::size_t r, std::size_t c) {
  return std::to_string(r) + "x" + std::to_string(c);
}
}  // namespace detail

/// <X, Y>_F = tr(X^T Y), accumulated sequentially in column-major order.
template <class Tag>
double frobenius_inner(const DenseMatrix<Tag>& x, const DenseMatrix<Tag>& y) {
  if (!x.same_shape(y))
    throw DimensionError("frobenius_inner: " + detail::shape_str(x.rows(), x.cols()) + " vs " +
                         detail::shape_str(y.rows(), y.cols()));
  const double* a = x.data();
  const double* b = y.data();
  double sum = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) sum += a[k] * b[k];
  return sum;
}

template <class Tag>
double frobenius_norm(const DenseMatrix<Tag>& x) {
  return std::sqrt(frobenius_inner(x, x));
}

/// Y = A X.
inline Block spmm(const SparseMatrix& a, const Block& x) {
  if (a.cols() != x.rows())
    throw DimensionError("spmm: A is " + detail::shape_str(a.rows(), a.cols()) + ", X is " +
                         detail::shape_str(x.rows(), x.cols()));
  Block y(a.rows(), x.cols());
  const auto& off = a.row_offsets();
  const auto& col = a.col_indices();
  const auto& val = a.values();
  for (std::size_t j = 0; j < x.cols(); ++j) {
    const auto xj = x.column(j);
    auto yj = y.column(j);
    for (std::size_t i = 0; i < a.rows(); ++i) {
      double sum = 0.0;
      for (std::size_t k = off[i]; k < off[i + 1]; ++k) sum += val[k] * xj[col[k]];
      yj[i] = sum;
    }
  }
  return y;
}

/// Y = A^T X.
inline Block spmm_transposed(const SparseMatrix& a, const Block& x) {
  if (a.rows() != x.rows())
    throw DimensionError("spmm_transposed: A is " + detail::shape_str(a.rows(), a.cols()) +
                         ", X is " + detail::shape_str(x.rows(), x.cols()));
  Block y(a.cols(), x.cols());
  const auto& off = a.row_offsets();
  const auto& col = a.col_indices();
  const auto& val = a.values();
  for (std::size_t j = 0; j < x.cols(); ++j) {
    const auto xj = x.column(j);
    auto yj = y.column(j);
    for (std::size_t i = 0; i < a.rows(); ++i)
      for (std::size_t k = off[i]; k < off[i + 1]; ++k) yj[col[k]] += val[k] * xj[i];
  }
  return y;
}

/// V C for a sparse s x s matrix C acting on the column space of V.
inline Block multiply_right(const Block& v, const SparseMatrix& c) {
  if (v.cols() != c.rows())
    throw DimensionError("multiply_right: V is " + detail::shape_str(v.rows(), v.cols()) +
                         ", C is " + detail::shape_str(c.rows(), c.cols()));
  Block out(v.rows(), c.cols());
  const auto& off = c.row_offsets();
  for (std::size_t i = 0; i < c.rows(); ++i) {
    const auto vi = v.column(i);
    for (std::size_t k = off[i]; k < off[i + 1]; ++k) {
      auto oj = out.column(c.col_indices()[k]);
      const double cij = c.values()[k];
      for (std::size_t r = 0; r < v.rows(); ++r) oj[r] += cij * vi[r];
    }
  }
  return out;
}

/// V C^T for a sparse s x s matrix C.
inline Block multiply_right_transposed(const Block& v, const SparseMatrix& c) {
  if (v.cols() != c.cols())
    throw DimensionError("multiply_right_transposed: V is " +
                         detail::shape_str(v.rows(), v.cols()) + ", C is " +
                         detail::shape_str(c.rows(), c.cols()));
  Block out(v.rows(), c.rows());
  const auto& off = c.row_offsets();
  for (std::size_t i = 0; i < c.rows(); ++i) {
    auto oi = out.column(i);
    for (std::size_t k = off[i]; k < off[i + 1]; ++k) {
      const auto vj = v.column(c.col_indices()[k]);
      const double cij = c.values()[k];
      for (std::size_t r = 0; r < v.rows(); ++r) oi[r] += cij * vj[r];
    }
  }
  return out;
}

/// P alpha for an s x s coefficient matrix.
inline Block multiply(const Block& p, const SmallDense& alpha) {
  if (p.cols() != alpha.rows())
    throw DimensionError("multiply: P is " + detail::shape_str(p.rows(), p.cols()) +
                         ", alpha is " + detail::shape_str(alpha.rows(), alpha.cols()));
  Block out(p.rows(), alpha.cols());
  for (std::size_t j = 0; j < alpha.cols(); ++j) {
    auto oj = out.column(j);
    for (std::size_t i = 0; i < p.cols(); ++i) {
      const double a = alpha(i, j);
      if (a == 0.0) continue;
      const auto pi = p.column(i);
      for (std::size_t r = 0; r < p.rows(); ++r) oj[r] += a * pi[r];
    }
  }
  return out;
}

/// X^T Y, the s x s matrix of column inner products.
inline SmallDense transpose_multiply(const Block& x, const Block& y) {
  if (x.rows() != y.rows())
    throw DimensionError("transpose_multiply: " + detail::shape_str(x.rows(), x.cols()) +
                         " vs " + detail::shape_str(y.rows(), y.cols()));
  SmallDense out(x.cols(), y.cols());
  for (std::size_t j = 0; j < y.cols(); ++j) {
    const auto yj = y.column(j);
    for (std::size_t i = 0; i < x.cols(); ++i) {
      const auto xi = x.column(i);
      double sum = 0.0;
      for (std::size_t r = 0; r < x.rows(); ++r) sum += xi[r] * yj[r];
      out(i, j) = sum;
    }
  }
  return out;
}

/// Product of two small dense matrices.
inline SmallDense multiply(const SmallDense& a, const SmallDense& b) {
  if (a.cols() != b.rows())
    throw DimensionError("multiply: " + detail::shape_str(a.rows(), a.cols()) + " times " +
                         detail::shape_str(b.rows(), b.cols()));
  SmallDense out(a.rows(), b.cols());
  for (std::size_t j = 0; j < b.cols(); ++j)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double bkj = b(k, j);
      for (std::size_t i = 0; i < a.rows(); ++i) out(i, j) += a(i, k) * bkj;
    }
  return out;
}

}  // namespace cirs
