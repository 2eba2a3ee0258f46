#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cirs/harness/bounds.hpp"
#include "cirs/harness/generators.hpp"
#include "cirs/harness/matrix_market.hpp"
#include "cirs/linalg/errors.hpp"
#include "cirs/linalg/operator.hpp"
#include "cirs/solvers/block.hpp"
#include "cirs/solvers/global.hpp"

namespace cirs {

inline constexpr std::array<std::string_view, 8> solver_names = {
    "gl-cgs2",        "s-gl-cgs2",        "gl-bicgstab",  "s-gl-bicgstab",
    "bl-bicgstab-pq", "s-bl-bicgstab-pq", "bl-bicggr-rq", "s-bl-bicggr-rq"};

inline bool is_solver_name(std::string_view name) {
  for (auto s : solver_names)
    if (s == name) return true;
  return false;
}

/// "toeplitz:N" or a Matrix Market path.
inline SparseMatrix load_matrix(const std::string& source) {
  constexpr std::string_view prefix = "toeplitz:";
  if (source.rfind(prefix, 0) == 0) {
    const std::string digits = source.substr(prefix.size());
    std::size_t pos = 0;
    unsigned long long n = 0;
    try {
      n = std::stoull(digits, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos == 0 || pos != digits.size() || n == 0)
      throw ConfigError("bad matrix source '" + source + "', expected toeplitz:N");
    return gen_toeplitz(static_cast<std::size_t>(n));
  }
  return read_matrix_market(source);
}

struct Problem {
  ProblemOperator op;
  Block b;
  MatrixStats stats;
};

/// Builds A(X) = B (or AX - XC = B) with a seeded uniform(-1, 1) B of unit
/// Frobenius norm. For Sylvester problems B has as many columns as C.
inline Problem make_problem(const SparseMatrix& a, std::size_t nrhs, std::uint64_t seed,
                            const std::optional<SparseMatrix>& c = std::nullopt) {
  ProblemOperator op = c ? ProblemOperator::sylvester(a, *c) : ProblemOperator::standard(a);
  const std::size_t s = c ? c->rows() : nrhs;
  Block b = gen_random_block(a.rows(), s, seed, true);
  MatrixStats stats = MatrixStats::of(op, s);
  return Problem{std::move(op), std::move(b), stats};
}

struct RunConfig {
  double tolerance = 1e-14;
  std::size_t max_iterations = 0;   ///< 0 selects 2n
  std::uint64_t seed = 0;
  std::optional<double> theta;      ///< set: block smoothed solvers use cirs_switched
  std::size_t gap_every = 0;        ///< 0 selects the default
  bool bounds = true;
  bool check_small_solves = false;
  IterationObserver observer;
};

struct ExperimentResult {
  Block x;
  ConvergenceHistory history;
  std::vector<BoundReport> bounds;
};

/// Runs one named solver on a prepared problem and evaluates the applicable
/// bounds at termination.
inline ExperimentResult run_experiment(const Problem& problem, const std::string& solver,
                                       const RunConfig& cfg) {
  if (!is_solver_name(solver)) throw ConfigError("unknown solver '" + solver + "'");
  const bool smoothed = solver.rfind("s-", 0) == 0;
  const bool block = solver.find("bl-") != std::string::npos;
  if (block && problem.op.is_sylvester())
    throw ConfigError("solver '" + solver + "' is a block method; Sylvester problems need a "
                      "global solver");
  if (cfg.theta && !(block && smoothed))
    throw ConfigError("theta applies to smoothed block solvers only");

  auto fill = [&](SolverOptions& o) {
    o.tolerance = cfg.tolerance;
    o.max_iterations = cfg.max_iterations;
    o.seed = cfg.seed;
    o.gap_every = cfg.gap_every;
    o.check_small_solves = cfg.check_small_solves;
    o.observer = cfg.observer;
  };

  SolveResult res;
  bool switched = false;
  if (block) {
    BlockSolverConfig bc;
    fill(bc);
    bc.smoothing = smoothed ? Smoothing::cirs : Smoothing::none;
    if (cfg.theta) {
      bc.smoothing = Smoothing::cirs_switched;
      bc.theta = *cfg.theta;
      switched = true;
    }
    res = solver.find("pq") != std::string::npos ? bl_bicgstab_pq(problem.op, problem.b, bc)
                                                 : bl_bicggr_rq(problem.op, problem.b, bc);
  } else {
    GlobalSolverConfig gc;
    fill(gc);
    gc.smoothing = smoothed ? Smoothing::cirs : Smoothing::none;
    res = solver.find("cgs2") != std::string::npos ? gl_cgs2(problem.op, problem.b, gc)
                                                   : gl_bicgstab(problem.op, problem.b, gc);
  }

  ExperimentResult out{std::move(res.x), std::move(res.history), {}};
  if (cfg.bounds && !out.history.records.empty())
    for (Theorem t : applicable_theorems(solver, problem.op.is_sylvester(), switched))
      out.bounds.push_back(evaluate_bound(t, out.history, problem.stats));
  return out;
}

}  // namespace cirs
