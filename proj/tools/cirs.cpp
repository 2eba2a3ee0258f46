// Command-line driver: solve one problem with one or more solvers and write
// the convergence histories.
//
//   cirs solve --matrix toeplitz:2000 --solver gl-cgs2,s-gl-cgs2 --nrhs 16 --out r.csv
//
// Exit codes: 0 converged, 2 max-iterations, 3 breakdown, 4 configuration or
// parse error. With several solvers the worst outcome wins.

#include <cstdint>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cirs/harness/experiment.hpp"
#include "cirs/harness/results.hpp"

namespace {

constexpr int exit_converged = 0;
constexpr int exit_max_iterations = 2;
constexpr int exit_breakdown = 3;
constexpr int exit_config = 4;

int exit_code(cirs::TerminationStatus s) {
  switch (s) {
    case cirs::TerminationStatus::converged: return exit_converged;
    case cirs::TerminationStatus::max_iterations: return exit_max_iterations;
    case cirs::TerminationStatus::breakdown: return exit_breakdown;
  }
  return exit_breakdown;
}

struct SolveArgs {
  std::string matrix;
  std::string sylvester_c;
  std::vector<std::string> solvers;
  std::size_t nrhs = 16;
  double tol = 1e-14;
  std::string maxit = "2n";
  std::uint64_t seed = 0;
  std::optional<double> theta;
  std::size_t gap_every = 0;
  bool bounds = false;
  std::string out;
  std::string format = "csv";
};

std::size_t parse_maxit(const std::string& text) {
  if (text == "2n") return 0;
  std::size_t pos = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(text, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos == 0 || pos != text.size() || v == 0)
    throw cirs::ConfigError("--maxit expects a positive count or '2n', got '" + text + "'");
  return static_cast<std::size_t>(v);
}

int run_solve(const SolveArgs& args) {
  const auto a = cirs::load_matrix(args.matrix);
  std::optional<cirs::SparseMatrix> c;
  if (!args.sylvester_c.empty()) c = cirs::load_matrix(args.sylvester_c);
  const auto problem = cirs::make_problem(a, args.nrhs, args.seed, c);

  cirs::RunConfig cfg;
  cfg.tolerance = args.tol;
  cfg.max_iterations = parse_maxit(args.maxit);
  cfg.seed = args.seed;
  cfg.gap_every = args.gap_every;
  cfg.bounds = args.bounds;

  for (const auto& name : args.solvers)
    if (!cirs::is_solver_name(name)) throw cirs::ConfigError("unknown solver '" + name + "'");

  std::vector<cirs::ConvergenceHistory> histories;
  int worst = exit_converged;
  for (const auto& name : args.solvers) {
    cirs::RunConfig run_cfg = cfg;
    const bool smoothed_block = name.rfind("s-bl-", 0) == 0;
    if (args.theta && smoothed_block) run_cfg.theta = args.theta;
    auto res = cirs::run_experiment(problem, name, run_cfg);
    const auto& h = res.history;

    const auto final_res = h.final_solution_residual();
    std::printf("%-18s %-15s iterations %6zu  true residual %.3e  op applications %zu\n",
                h.solver.c_str(), cirs::to_string(h.status), h.iterations(),
                final_res ? *final_res : -1.0,
                h.records.empty() ? std::size_t{0} : h.records.back().operator_applications);
    if (!h.detail.empty()) std::printf("  %s\n", h.detail.c_str());
    for (const auto& b : res.bounds)
      std::printf("  bound %-3s gap %.3e <= %.3e  %s\n", cirs::to_string(b.theorem),
                  b.measured_gap, b.bound_value, b.violation ? "VIOLATED" : "ok");

    worst = std::max(worst, exit_code(h.status));
    histories.push_back(std::move(res.history));
  }

  if (!args.out.empty()) {
    cirs::emit_results(histories,
                       args.format == "json" ? cirs::ResultFormat::json : cirs::ResultFormat::csv,
                       args.out);
  }
  return worst;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Block and global Krylov solvers with cross-interactive residual smoothing"};
  app.require_subcommand(1);

  SolveArgs args;
  auto* solve = app.add_subcommand("solve", "Solve A X = B (or A X - X C = B)");
  solve->add_option("--matrix", args.matrix, "Matrix Market path or toeplitz:N")->required();
  solve->add_option("--sylvester-c", args.sylvester_c, "Matrix Market path for C");
  solve->add_option("--solver", args.solvers, "Solver name(s), comma separated")
      ->required()
      ->delimiter(',');
  solve->add_option("--nrhs", args.nrhs, "Right-hand sides (ignored for Sylvester)")
      ->check(CLI::PositiveNumber);
  solve->add_option("--tol", args.tol, "Relative stopping tolerance")->check(CLI::PositiveNumber);
  solve->add_option("--maxit", args.maxit, "Iteration cap or 2n");
  solve->add_option("--seed", args.seed, "Seed for B and the shadow residuals");
  solve->add_option("--theta", args.theta,
                    "Switching threshold; enables switching for smoothed block solvers");
  solve->add_option("--gap-every", args.gap_every, "True-residual sampling period");
  solve->add_flag("--bounds", args.bounds, "Evaluate residual-gap bounds");
  solve->add_option("--out", args.out, "Output file");
  solve->add_option("--format", args.format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : exit_config;
  }

  try {
    return run_solve(args);
  } catch (const cirs::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
  } catch (const cirs::ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
  } catch (const cirs::DimensionError& e) {
    std::cerr << "dimension error: " << e.what() << '\n';
  } catch (const cirs::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
  }
  return exit_config;
}
