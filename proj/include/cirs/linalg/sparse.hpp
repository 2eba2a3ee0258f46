#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "cirs/linalg/errors.hpp"

namespace cirs {

struct Triplet {
  std::size_t row;
  std::size_t col;
  double value;
};

/// Compressed sparse row matrix with sorted, unique column indices per row.
class SparseMatrix {
 public:
  SparseMatrix() = default;

  /// Adopts CSR arrays after validating them.
  SparseMatrix(std::size_t n_rows, std::size_t n_cols, std::vector<std::size_t> row_offsets,
               std::vector<std::size_t> col_indices, std::vector<double> values)
      : n_rows_(n_rows),
        n_cols_(n_cols),
        row_offsets_(std::move(row_offsets)),
        col_indices_(std::move(col_indices)),
        values_(std::move(values)) {
    validate();
  }

  /// Builds from coordinate triples in any order; duplicates are summed.
  static SparseMatrix from_triplets(std::size_t n_rows, std::size_t n_cols,
                                    std::vector<Triplet> entries) {
    for (const auto& t : entries)
      if (t.row >= n_rows || t.col >= n_cols)
        throw DimensionError("triplet (" + std::to_string(t.row) + ", " +
                             std::to_string(t.col) + ") outside " + std::to_string(n_rows) +
                             "x" + std::to_string(n_cols));
    std::stable_sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
      return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    std::vector<std::size_t> offsets(n_rows + 1, 0);
    std::vector<std::size_t> cols;
    std::vector<double> vals;
    cols.reserve(entries.size());
    vals.reserve(entries.size());
    for (std::size_t k = 0; k < entries.size(); ++k) {
      const auto& t = entries[k];
      if (k > 0 && entries[k - 1].row == t.row && entries[k - 1].col == t.col) {
        vals.back() += t.value;
        continue;
      }
      cols.push_back(t.col);
      vals.push_back(t.value);
      ++offsets[t.row + 1];
    }
    for (std::size_t i = 0; i < n_rows; ++i) offsets[i + 1] += offsets[i];
    return SparseMatrix(n_rows, n_cols, std::move(offsets), std::move(cols), std::move(vals));
  }

  static SparseMatrix identity(std::size_t n) {
    std::vector<std::size_t> offsets(n + 1), cols(n);
    for (std::size_t i = 0; i <= n; ++i) offsets[i] = i;
    for (std::size_t i = 0; i < n; ++i) cols[i] = i;
    return SparseMatrix(n, n, std::move(offsets), std::move(cols), std::vector<double>(n, 1.0));
  }

  std::size_t rows() const noexcept { return n_rows_; }
  std::size_t cols() const noexcept { return n_cols_; }
  std::size_t nnz() const noexcept { return values_.size(); }
  bool is_square() const noexcept { return n_rows_ == n_cols_; }

  const std::vector<std::size_t>& row_offsets() const noexcept { return row_offsets_; }
  const std::vector<std::size_t>& col_indices() const noexcept { return col_indices_; }
  const std::vector<double>& values() const noexcept { return values_; }

  /// Maximum number of stored entries in any row.
  std::size_t max_row_nnz() const noexcept {
    std::size_t m = 0;
    for (std::size_t i = 0; i < n_rows_; ++i)
      m = std::max(m, row_offsets_[i + 1] - row_offsets_[i]);
    return m;
  }

  double frobenius_norm() const noexcept {
    double sum = 0.0;
    for (double v : values_) sum += v * v;
    return std::sqrt(sum);
  }

  /// Entry lookup by binary search; zero when not stored.
  double at(std::size_t i, std::size_t j) const {
    if (i >= n_rows_ || j >= n_cols_) throw DimensionError("SparseMatrix::at out of range");
    auto first = col_indices_.begin() + static_cast<std::ptrdiff_t>(row_offsets_[i]);
    auto last = col_indices_.begin() + static_cast<std::ptrdiff_t>(row_offsets_[i + 1]);
    auto it = std::lower_bound(first, last, j);
    return (it != last && *it == j) ? values_[static_cast<std::size_t>(it - col_indices_.begin())]
                                    : 0.0;
  }

 private:
  void validate() const {
    if (row_offsets_.size() != n_rows_ + 1)
      throw DimensionError("row_offsets must have n_rows + 1 entries");
    if (row_offsets_.front() != 0) throw DimensionError("row_offsets must start at 0");
    if (row_offsets_.back() != values_.size() || col_indices_.size() != values_.size())
      throw DimensionError("row_offsets, col_indices and values disagree on nnz");
    for (std::size_t i = 0; i < n_rows_; ++i) {
      if (row_offsets_[i] > row_offsets_[i + 1])
        throw DimensionError("row_offsets must be non-decreasing");
      for (std::size_t k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k) {
        if (col_indices_[k] >= n_cols_) throw DimensionError("column index out of range");
        if (k > row_offsets_[i] && col_indices_[k - 1] >= col_indices_[k])
          throw DimensionError("column indices must be strictly increasing within a row");
      }
    }
  }

  std::size_t n_rows_ = 0;
  std::size_t n_cols_ = 0;
  std::vector<std::size_t> row_offsets_{0};
  std::vector<std::size_t> col_indices_;
  std::vector<double> values_;
};

}  // namespace cirs
