#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>

#include "cirs/linalg/dense.hpp"
#include "cirs/linalg/errors.hpp"
#include "cirs/linalg/kernels.hpp"
#include "cirs/linalg/sparse.hpp"

namespace cirs {

enum class OperatorKind { standard, sylvester };

/// The linear map a solver works with: V -> A V, or V -> A V - V C.
///
/// Matrices are held through shared const pointers so one operator can be
/// shared read-only across concurrent runs.
class ProblemOperator {
 public:
  static ProblemOperator standard(SparseMatrix a) {
    return standard(std::make_shared<const SparseMatrix>(std::move(a)));
  }
  static ProblemOperator standard(std::shared_ptr<const SparseMatrix> a) {
    if (!a || !a->is_square()) throw DimensionError("operator matrix A must be square");
    return ProblemOperator(OperatorKind::standard, std::move(a), nullptr);
  }

  static ProblemOperator sylvester(SparseMatrix a, SparseMatrix c) {
    return sylvester(std::make_shared<const SparseMatrix>(std::move(a)),
                     std::make_shared<const SparseMatrix>(std::move(c)));
  }
  static ProblemOperator sylvester(std::shared_ptr<const SparseMatrix> a,
                                   std::shared_ptr<const SparseMatrix> c) {
    if (!a || !a->is_square()) throw DimensionError("operator matrix A must be square");
    if (!c || !c->is_square()) throw DimensionError("Sylvester matrix C must be square");
    return ProblemOperator(OperatorKind::sylvester, std::move(a), std::move(c));
  }

  OperatorKind kind() const noexcept { return kind_; }
  bool is_sylvester() const noexcept { return kind_ == OperatorKind::sylvester; }
  std::size_t dimension() const noexcept { return a_->rows(); }
  /// Required column count, fixed only for Sylvester operators.
  std::optional<std::size_t> required_columns() const {
    if (c_) return c_->rows();
    return std::nullopt;
  }
  const SparseMatrix& a() const noexcept { return *a_; }
  const SparseMatrix* c() const noexcept { return c_.get(); }

  Block apply(const Block& v) const {
    check(v, "apply");
    Block out = spmm(*a_, v);
    if (c_) out -= multiply_right(v, *c_);
    return out;
  }

  /// Adjoint with respect to the Frobenius inner product.
  Block apply_adjoint(const Block& v) const {
    check(v, "apply_adjoint");
    Block out = spmm_transposed(*a_, v);
    if (c_) out -= multiply_right_transposed(v, *c_);
    return out;
  }

 private:
  ProblemOperator(OperatorKind kind, std::shared_ptr<const SparseMatrix> a,
                  std::shared_ptr<const SparseMatrix> c)
      : kind_(kind), a_(std::move(a)), c_(std::move(c)) {}

  void check(const Block& v, const char* who) const {
    if (v.rows() != a_->rows())
      throw DimensionError(std::string(who) + ": block has " + std::to_string(v.rows()) +
                           " rows, operator dimension is " + std::to_string(a_->rows()));
    if (c_ && v.cols() != c_->rows())
      throw DimensionError(std::string(who) + ": block has " + std::to_string(v.cols()) +
                           " columns, C is " + std::to_string(c_->rows()) + "x" +
                           std::to_string(c_->cols()));
  }

  OperatorKind kind_;
  std::shared_ptr<const SparseMatrix> a_;
  std::shared_ptr<const SparseMatrix> c_;
};

}  // namespace cirs
