#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>

#include "cirs/history.hpp"
#include "cirs/linalg/dense.hpp"
#include "cirs/linalg/errors.hpp"
#include "cirs/linalg/kernels.hpp"
#include "cirs/linalg/operator.hpp"
#include "cirs/linalg/random.hpp"
#include "cirs/linalg/small_solve.hpp"
#include "cirs/smoothing/cirs.hpp"

namespace cirs {

enum class Smoothing { none, cirs, cirs_switched };

inline const char* to_string(Smoothing s) {
  switch (s) {
    case Smoothing::none: return "none";
    case Smoothing::cirs: return "cirs";
    case Smoothing::cirs_switched: return "cirs_switched";
  }
  return "unknown";
}

/// Read-only snapshot handed to an observer after every iteration.
struct IterationView {
  std::size_t iteration;
  const Block& x;
  const Block& r;
  const Block* x_prime = nullptr;  ///< intermediate pair of two-part methods
  const Block* r_prime = nullptr;
  const SmootherState* smoother = nullptr;  ///< null while smoothing is inactive
  const Block* q = nullptr;                 ///< residual Q-factor (rQ methods)
  const SmallDense* xi = nullptr;           ///< residual R-factor (rQ methods)
};

using IterationObserver = std::function<void(const IterationView&)>;

struct SolverOptions {
  double tolerance = 1e-14;          ///< on ||R||/||B||, or ||S||/||B|| when smoothing
  std::size_t max_iterations = 0;    ///< 0 selects 2n
  std::uint64_t seed = 0;            ///< shadow-residual stream
  std::size_t gap_every = 0;         ///< true-residual sampling period; 0 selects the default
  bool check_small_solves = false;   ///< residual-check every s x s solve
  IterationObserver observer;
};

struct GlobalSolverConfig : SolverOptions {
  Smoothing smoothing = Smoothing::none;
};

struct BlockSolverConfig : SolverOptions {
  Smoothing smoothing = Smoothing::none;
  double theta = 1e-2;  ///< switching threshold, cirs_switched only
};

/// x is the method's answer: Y for a run that ends with smoothing active,
/// otherwise the primary X (then also kept in primary_x for smoothed runs).
struct SolveResult {
  Block x;
  ConvergenceHistory history;
  std::optional<Block> primary_x;
};

/// Default true-residual sampling period for an n-dimensional problem.
inline std::size_t default_gap_every(std::size_t n) { return n <= 1000 ? 1 : 6; }

/// Whether the switching strategy smooths this iteration.
enum class SwitchDecision { smooth, direct };

inline SwitchDecision switching_controller(double s_hat_norm, double b_norm, double theta) {
  if (!(b_norm > 0.0)) throw ConfigError("switching_controller: ||B|| must be positive");
  return s_hat_norm / b_norm > theta ? SwitchDecision::smooth : SwitchDecision::direct;
}

namespace detail {

/// Seed offset separating the shadow residual from a right-hand side drawn with the same seed.
inline constexpr std::uint64_t shadow_seed_offset = 0x9E3779B97F4A7C15ull;

inline void track(double& running_max, double value) {
  running_max = std::max(running_max, value);
}

/// Throws BreakdownError when |value| is below u times the scale of its operands.
inline void require_nonvanishing(double value, double scale, const char* name) {
  if (!std::isfinite(value) || !(std::abs(value) > unit_roundoff * scale))
    throw BreakdownError(std::string(name) + " vanished (" + std::to_string(value) + ")",
                         std::abs(value));
}

struct RecordExtras {
  const Block* x_prime = nullptr;
  const Block* r_prime = nullptr;
  const SmootherState* smoother = nullptr;
  std::optional<double> recursive_norm = std::nullopt;  ///< overrides ||r|| (rQ baselines report ||xi||)
  std::optional<double> xi_condition = std::nullopt;
  const Block* q = nullptr;
  const SmallDense* xi = nullptr;
};

/// Bookkeeping shared by all solvers: counted operator applications,
/// stopping test, history rows, sampled true residuals, and norm maxima.
///
/// True residuals are evaluated with the raw operator so observation never
/// shows up in the application counter.
class SolveContext {
 public:
  SolveContext(const ProblemOperator& op, const Block& b, const SolverOptions& opts,
               std::string solver)
      : op_(op), b_(b), opts_(opts) {
    if (b.rows() != op.dimension())
      throw DimensionError("right-hand side has " + std::to_string(b.rows()) +
                           " rows, operator dimension is " + std::to_string(op.dimension()));
    if (auto cols = op.required_columns(); cols && *cols != b.cols())
      throw DimensionError("Sylvester right-hand side must have " + std::to_string(*cols) +
                           " columns");
    if (!(opts.tolerance > 0.0)) throw ConfigError("tolerance must be positive");
    history_.solver = std::move(solver);
    history_.b_norm = frobenius_norm(b);
    if (!(history_.b_norm > 0.0)) throw ConfigError("right-hand side must be nonzero");
    max_iterations_ = opts.max_iterations ? opts.max_iterations : 2 * op.dimension();
    gap_every_ = opts.gap_every ? opts.gap_every : default_gap_every(op.dimension());
  }

  Block apply(const Block& v) {
    ++applications_;
    return op_.apply(v);
  }
  Block apply_adjoint(const Block& v) {
    ++applications_;
    return op_.apply_adjoint(v);
  }
  auto applier() {
    return [this](const Block& v) { return apply(v); };
  }

  std::size_t applications() const noexcept { return applications_; }
  std::size_t max_iterations() const noexcept { return max_iterations_; }
  double b_norm() const noexcept { return history_.b_norm; }
  bool converged(double residual_norm) const {
    return residual_norm <= opts_.tolerance * history_.b_norm;
  }
  const Block& rhs() const noexcept { return b_; }

  SmallDense solve_small(const SmallDense& m, const SmallDense& rhs) {
    SmallDense out = cirs::solve_small(m, rhs);
    if (opts_.check_small_solves) {
      SmallDense res = multiply(m, out) - rhs;
      if (frobenius_norm(res) > 1e-10 * frobenius_norm(rhs)) ++history_.small_solve_violations;
    }
    return out;
  }
  Block solve_right_block(const Block& rhs, const SmallDense& m) {
    Block out = cirs::solve_right_block(rhs, m);
    if (opts_.check_small_solves) {
      Block res = multiply(out, m) - rhs;
      if (frobenius_norm(res) > 1e-10 * frobenius_norm(rhs)) ++history_.small_solve_violations;
    }
    return out;
  }

  NormMaxima& norms() noexcept { return history_.norms; }

  /// Appends the row for iteration k and notifies the observer.
  void record(std::size_t k, const Block& x, const Block& r, const RecordExtras& extra = {}) {
    IterationRecord rec;
    rec.iteration = k;
    const double r_norm = extra.recursive_norm ? *extra.recursive_norm : frobenius_norm(r);
    if (!std::isfinite(r_norm))
      throw BreakdownError("non-finite recursive residual", r_norm);
    rec.recursive_residual_norm = r_norm / b_norm();
    rec.operator_applications = applications_;
    rec.xi_condition = extra.xi_condition;
    rec.smoothing_active = extra.smoother != nullptr;

    auto& nm = history_.norms;
    const double x_norm = frobenius_norm(x);
    if (k > 0) track(nm.max_x, x_norm);
    track(nm.max_r, r_norm);
    nm.final_x = x_norm;
    nm.final_r = r_norm;
    if (extra.r_prime) {
      nm.has_intermediate = true;
      track(nm.max_x_prime, frobenius_norm(*extra.x_prime));
      const double rp = frobenius_norm(*extra.r_prime);
      track(nm.max_r_prime, rp);
      rec.intermediate_residual_norm = rp / b_norm();
    }
    if (extra.smoother) {
      nm.has_smoothed = true;
      const double s_norm = frobenius_norm(extra.smoother->s_hat);
      if (k > 0) track(nm.max_y_hat, frobenius_norm(extra.smoother->y_hat));
      track(nm.max_s_hat, s_norm);
      rec.smoothed_residual_norm = s_norm / b_norm();
      if (k > 0) rec.eta = extra.smoother->eta_hat;
    }
    history_.records.push_back(std::move(rec));
    last_sampled_ = false;
    if (k % gap_every_ == 0) sample(x, r, extra.smoother);

    if (opts_.observer)
      opts_.observer(IterationView{k, x, r, extra.x_prime, extra.r_prime, extra.smoother,
                                   extra.q, extra.xi});
  }

  void fail(std::size_t k, const std::string& what) {
    history_.status = TerminationStatus::breakdown;
    history_.detail = "iteration " + std::to_string(k) + ": " + what;
  }
  void set_status(TerminationStatus s) { history_.status = s; }

  /// Closes the history; the last row always carries a true-residual sample.
  SolveResult finish(Block x, const Block& r, const SmootherState* smoother) {
    if (!history_.records.empty() && !last_sampled_) sample(x, r, smoother);
    if (!smoother) return SolveResult{std::move(x), std::move(history_), std::nullopt};
    return SolveResult{smoother->y_hat, std::move(history_), std::move(x)};
  }

 private:
  void sample(const Block& x, const Block& r, const SmootherState* smoother) {
    auto& rec = history_.records.back();
    Block true_res = b_ - op_.apply(x);
    rec.true_residual_norm = frobenius_norm(true_res) / b_norm();
    true_res -= r;
    rec.gap_norm = frobenius_norm(true_res) / b_norm();
    if (smoother) {
      Block sg = b_ - op_.apply(smoother->y_hat);
      rec.smoothed_true_residual_norm = frobenius_norm(sg) / b_norm();
      sg -= smoother->s_hat;
      rec.smoothed_gap_norm = frobenius_norm(sg) / b_norm();
    }
    last_sampled_ = true;
  }

  const ProblemOperator& op_;
  const Block& b_;
  const SolverOptions& opts_;
  ConvergenceHistory history_;
  std::size_t applications_ = 0;
  std::size_t max_iterations_ = 0;
  std::size_t gap_every_ = 1;
  bool last_sampled_ = false;
};

}  // namespace detail
}  // namespace cirs
