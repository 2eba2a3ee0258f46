#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "cirs/history.hpp"
#include "cirs/linalg/dense.hpp"
#include "cirs/linalg/errors.hpp"
#include "cirs/linalg/operator.hpp"

namespace cirs {

/// Residual-gap bounds evaluated from recorded norm maxima.
///
///  T1   k(5+2m)u|A| max|X_j| + 5(k+1)u max|R_j|
///  T2   k(3+4s^1.5+2m s^0.5)u|A| max|X_j| + 3(k+1)u max|R_j|
///  C1   k(4+2s^1.5+m+m s^0.5)u|A|(max|X'_j| + max|X_j|) + 4(k+1)u(max|R'_j| + max|R_j|)
///  T4   T1 with Y, S in place of X, R; bounds the smoothed gap
///  T5   T4 + (2+m)u|A||X_k| + 2u|R_k|; bounds the primary gap of a smoothed run
///  T6   ku[(7+2m)|A| + (7+2s)|C|] max|X_j| + 5(k+1)u max|R_j|  (Sylvester)
///  T6S  T6 with Y, S maxima + [(2+m)|A| + (2+s)|C|]u|X_k| + 2u|R_k|  (smoothed Sylvester)
///
/// |.| is the Frobenius norm throughout; m is the largest row count of A.
enum class Theorem { T1, T2, C1, T4, T5, T6, T6S };

inline const char* to_string(Theorem t) {
  switch (t) {
    case Theorem::T1: return "T1";
    case Theorem::T2: return "T2";
    case Theorem::C1: return "C1";
    case Theorem::T4: return "T4";
    case Theorem::T5: return "T5";
    case Theorem::T6: return "T6";
    case Theorem::T6S: return "T6S";
  }
  return "unknown";
}

struct MatrixStats {
  double a_norm = 0.0;
  double c_norm = 0.0;  ///< Sylvester only
  std::size_t m = 0;    ///< max nonzeros per row of A
  std::size_t s = 0;    ///< columns of the block

  static MatrixStats of(const ProblemOperator& op, std::size_t s) {
    MatrixStats st;
    st.a_norm = op.a().frobenius_norm();
    st.m = op.a().max_row_nnz();
    st.s = s;
    if (op.is_sylvester()) st.c_norm = op.c()->frobenius_norm();
    return st;
  }
};

struct BoundInputs {
  double max_x_norm = 0.0;
  double max_r_norm = 0.0;
  double max_x_prime_norm = 0.0;  ///< C1
  double max_r_prime_norm = 0.0;  ///< C1
  double final_x_norm = 0.0;      ///< T5, T6S
  double final_r_norm = 0.0;      ///< T5, T6S
  double a_norm = 0.0;
  double c_norm = 0.0;
  std::size_t m = 0;
  std::size_t s = 0;
  std::size_t k = 0;
  double u = unit_roundoff;
};

struct BoundReport {
  Theorem theorem = Theorem::T1;
  double bound_value = 0.0;
  double measured_gap = 0.0;  ///< absolute, not relative to |B|
  BoundInputs inputs;
  bool violation = false;
};

inline double bound_value(Theorem t, const BoundInputs& in) {
  const double k = static_cast<double>(in.k);
  const double m = static_cast<double>(in.m);
  const double s = static_cast<double>(in.s);
  const double rs = std::sqrt(s);
  const double u = in.u;
  switch (t) {
    case Theorem::T1:
    case Theorem::T4:
      return k * (5 + 2 * m) * u * in.a_norm * in.max_x_norm + 5 * (k + 1) * u * in.max_r_norm;
    case Theorem::T2:
      return k * (3 + 4 * s * rs + 2 * m * rs) * u * in.a_norm * in.max_x_norm +
             3 * (k + 1) * u * in.max_r_norm;
    case Theorem::C1:
      return k * (4 + 2 * s * rs + m + m * rs) * u * in.a_norm *
                 (in.max_x_prime_norm + in.max_x_norm) +
             4 * (k + 1) * u * (in.max_r_prime_norm + in.max_r_norm);
    case Theorem::T5:
      return bound_value(Theorem::T4, in) + (2 + m) * u * in.a_norm * in.final_x_norm +
             2 * u * in.final_r_norm;
    case Theorem::T6:
      return k * u * ((7 + 2 * m) * in.a_norm + (7 + 2 * s) * in.c_norm) * in.max_x_norm +
             5 * (k + 1) * u * in.max_r_norm;
    case Theorem::T6S:
      return bound_value(Theorem::T6, in) +
             ((2 + m) * in.a_norm + (2 + s) * in.c_norm) * u * in.final_x_norm +
             2 * u * in.final_r_norm;
  }
  return 0.0;
}

/// Theorems whose hypotheses match a run; empty for switched runs, which
/// mix smoothed and direct phases and are covered by none of them.
inline std::vector<Theorem> applicable_theorems(const std::string& solver, bool sylvester,
                                                bool switched = false) {
  if (switched) return {};
  const bool smoothed = solver.rfind("s-", 0) == 0;
  const bool block = solver.find("bl-") != std::string::npos;
  if (sylvester) {
    if (block) return {};
    return {smoothed ? Theorem::T6S : Theorem::T6};
  }
  if (smoothed) return {Theorem::T4, Theorem::T5};
  if (solver == "bl-bicgstab-pq") return {Theorem::C1};
  return {Theorem::T1};
}

/// Evaluates one bound against the final recorded gap of `history`.
/// Throws Error when the history lacks a quantity the bound needs.
inline BoundReport evaluate_bound(Theorem t, const ConvergenceHistory& history,
                                  const MatrixStats& stats) {
  const auto& nm = history.norms;
  if (history.records.empty()) throw Error("evaluate_bound: empty history");
  const auto& last = history.records.back();
  const bool smoothed_form = t == Theorem::T4 || t == Theorem::T5 || t == Theorem::T6S;
  if (smoothed_form && !nm.has_smoothed)
    throw Error(std::string("evaluate_bound: ") + to_string(t) +
                " needs smoothed maxima, history has none");
  if (t == Theorem::C1 && !nm.has_intermediate)
    throw Error("evaluate_bound: C1 needs intermediate maxima, history has none");
  if ((t == Theorem::T6 || t == Theorem::T6S) && !(stats.c_norm > 0.0))
    throw Error(std::string("evaluate_bound: ") + to_string(t) + " needs |C|");

  const std::optional<double>& gap = t == Theorem::T4 ? last.smoothed_gap_norm : last.gap_norm;
  if (!gap)
    throw Error(std::string("evaluate_bound: final ") +
                (t == Theorem::T4 ? "smoothed gap" : "gap") + " was not sampled");

  BoundInputs in;
  in.a_norm = stats.a_norm;
  in.c_norm = stats.c_norm;
  in.m = stats.m;
  in.s = stats.s;
  in.final_x_norm = nm.final_x;
  in.final_r_norm = nm.final_r;
  if (smoothed_form) {
    in.k = nm.smoothing_steps;
    in.max_x_norm = nm.max_y_hat;
    in.max_r_norm = nm.max_s_hat;
  } else if (t == Theorem::C1) {
    in.k = std::max(nm.primary_updates, nm.intermediate_updates);
    in.max_x_norm = nm.max_x;
    in.max_r_norm = nm.max_r;
    in.max_x_prime_norm = nm.max_x_prime;
    in.max_r_prime_norm = nm.max_r_prime;
  } else {
    // Every X += ..., R -= ... update counts, including BiCG halves.
    in.k = nm.primary_updates + nm.intermediate_updates;
    in.max_x_norm = std::max(nm.max_x, nm.max_x_prime);
    in.max_r_norm = std::max(nm.max_r, nm.max_r_prime);
  }

  BoundReport rep;
  rep.theorem = t;
  rep.inputs = in;
  rep.bound_value = bound_value(t, in);
  rep.measured_gap = *gap * history.b_norm;
  rep.violation = rep.measured_gap > rep.bound_value;
  return rep;
}

}  // namespace cirs
