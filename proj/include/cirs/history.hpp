#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace cirs {

enum class TerminationStatus { converged, max_iterations, breakdown };

inline const char* to_string(TerminationStatus s) {
  switch (s) {
    case TerminationStatus::converged: return "converged";
    case TerminationStatus::max_iterations: return "max_iterations";
    case TerminationStatus::breakdown: return "breakdown";
  }
  return "unknown";
}

/// One row of a convergence history. Residual-type norms are relative to ||B||.
struct IterationRecord {
  std::size_t iteration = 0;
  double recursive_residual_norm = 0.0;
  std::optional<double> smoothed_residual_norm;
  std::optional<double> true_residual_norm;
  std::optional<double> gap_norm;  ///< ||(B - A(X_k)) - R_k|| / ||B||
  std::optional<double> eta;
  std::optional<double> xi_condition;
  std::size_t operator_applications = 0;

  // Extra diagnostics, carried in JSON output only.
  std::optional<double> intermediate_residual_norm;  ///< ||R'_k|| of two-part methods
  std::optional<double> smoothed_true_residual_norm;  ///< ||B - A(Y_k)|| / ||B||
  std::optional<double> smoothed_gap_norm;            ///< ||(B - A(Y_k)) - S_k|| / ||B||
  bool smoothing_active = false;
};

/// Running maxima of absolute norms, as needed by the residual-gap bounds.
struct NormMaxima {
  double max_x = 0.0;        ///< over j > 0
  double max_r = 0.0;        ///< over j >= 0
  double max_x_prime = 0.0;  ///< intermediate iterates of two-part methods
  double max_r_prime = 0.0;
  double max_y_hat = 0.0;  ///< over j > 0
  double max_s_hat = 0.0;  ///< over j >= 0
  double final_x = 0.0;
  double final_r = 0.0;
  std::size_t primary_updates = 0;  ///< updates of the form X += direction
  std::size_t intermediate_updates = 0;
  std::size_t smoothing_steps = 0;
  bool has_intermediate = false;
  bool has_smoothed = false;
};

struct ConvergenceHistory {
  std::string solver;
  std::vector<IterationRecord> records;
  TerminationStatus status = TerminationStatus::max_iterations;
  std::string detail;
  double b_norm = 1.0;
  NormMaxima norms;
  std::size_t small_solve_violations = 0;

  /// Completed loop bodies.
  std::size_t iterations() const { return records.empty() ? 0 : records.back().iteration; }

  std::optional<double> final_true_residual() const {
    return records.empty() ? std::nullopt : records.back().true_residual_norm;
  }
  /// True residual of the returned solution: Y when the last row was
  /// smoothed, X otherwise.
  std::optional<double> final_solution_residual() const {
    if (records.empty()) return std::nullopt;
    const auto& last = records.back();
    return last.smoothing_active ? last.smoothed_true_residual_norm : last.true_residual_norm;
  }
  std::optional<double> final_gap() const {
    return records.empty() ? std::nullopt : records.back().gap_norm;
  }
  std::optional<double> final_smoothed_gap() const {
    return records.empty() ? std::nullopt : records.back().smoothed_gap_norm;
  }
  bool converged() const { return status == TerminationStatus::converged; }
};

}  // namespace cirs
