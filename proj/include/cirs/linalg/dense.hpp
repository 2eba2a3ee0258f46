#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "cirs/linalg/errors.hpp"

namespace cirs {

/// Unit roundoff of binary64.
inline constexpr double unit_roundoff = std::numeric_limits<double>::epsilon() / 2;

namespace detail {
struct BlockTag {};
struct SmallTag {};
}  // namespace detail

/// Dense column-major real matrix.
///
/// The tag separates tall n x s iteration blocks from the s x s coefficient
/// matrices of the block methods so the two cannot be mixed by accident;
/// conversions go through the explicit kernels in kernels.hpp.
template <class Tag>
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

  /// Row-wise literal, convenient in tests: {{1, 2}, {3, 4}}.
  DenseMatrix(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = rows.size();
    cols_ = rows_ ? rows.begin()->size() : 0;
    data_.assign(rows_ * cols_, 0.0);
    std::size_t i = 0;
    for (const auto& row : rows) {
      if (row.size() != cols_) throw DimensionError("ragged matrix literal");
      std::size_t j = 0;
      for (double v : row) (*this)(i, j++) = v;
      ++i;
    }
  }

  static DenseMatrix identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t i, std::size_t j) { return data_[j * rows_ + i]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[j * rows_ + i]; }

  std::span<double> column(std::size_t j) { return {data_.data() + j * rows_, rows_}; }
  std::span<const double> column(std::size_t j) const {
    return {data_.data() + j * rows_, rows_};
  }

  std::span<double> values() noexcept { return data_; }
  std::span<const double> values() const noexcept { return data_; }
  double* data() noexcept { return data_.data(); }
  const double* data() const noexcept { return data_.data(); }

  void fill(double v) { std::fill(data_.begin(), data_.end(), v); }

  bool all_finite() const {
    return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
  }

  bool same_shape(const DenseMatrix& o) const noexcept {
    return rows_ == o.rows_ && cols_ == o.cols_;
  }

  DenseMatrix& operator+=(const DenseMatrix& o) {
    check_shape(o, "+=");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
  }
  DenseMatrix& operator-=(const DenseMatrix& o) {
    check_shape(o, "-=");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
  }
  DenseMatrix& operator*=(double a) {
    for (double& v : data_) v *= a;
    return *this;
  }
  DenseMatrix& operator/=(double a) {
    for (double& v : data_) v /= a;
    return *this;
  }

  friend DenseMatrix operator+(DenseMatrix a, const DenseMatrix& b) { return a += b; }
  friend DenseMatrix operator-(DenseMatrix a, const DenseMatrix& b) { return a -= b; }
  friend DenseMatrix operator-(DenseMatrix a) {
    for (double& v : a.data_) v = -v;
    return a;
  }
  friend DenseMatrix operator*(double s, DenseMatrix a) { return a *= s; }
  friend DenseMatrix operator*(DenseMatrix a, double s) { return a *= s; }
  friend DenseMatrix operator/(DenseMatrix a, double s) { return a /= s; }

  friend bool operator==(const DenseMatrix& a, const DenseMatrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

 private:
  void check_shape(const DenseMatrix& o, const char* op) const {
    if (!same_shape(o))
      throw DimensionError(std::string("shape mismatch in ") + op + ": " +
                           std::to_string(rows_) + "x" + std::to_string(cols_) + " vs " +
                           std::to_string(o.rows_) + "x" + std::to_string(o.cols_));
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// n x s iteration matrix (X, R, P, and the smoother's blocks).
using Block = DenseMatrix<detail::BlockTag>;
/// s x s coefficient matrix of the block methods.
using SmallDense = DenseMatrix<detail::SmallTag>;

}  // namespace cirs
