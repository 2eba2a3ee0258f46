// Acceptance checks. Prints one line per criterion:
//
//   criterion <N> PASS|FAIL|SKIP: <detail>
//
// `acceptance --criterion N` runs a single criterion and exits 0 on pass, 1 on
// failure and 77 when required matrix files are missing. Without arguments
// every criterion runs and the exit code is 1 if any failed.
//
// Matrix files are looked up as <dir>/<name>.mtx with <dir> taken from
// CIRS_MATRIX_DIR, defaulting to data/matrices in the source tree.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "cirs/cirs.hpp"
#include "drivers.hpp"
#include "kernel_checks.hpp"

using namespace cirs;
namespace fs = std::filesystem;

namespace {

enum class Verdict { pass, fail, skip };

struct Outcome {
  Verdict verdict;
  std::string detail;
};

class Clock {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

fs::path matrix_dir() {
  if (const char* env = std::getenv("CIRS_MATRIX_DIR")) return env;
  return fs::path(CIRS_SOURCE_DIR) / "data" / "matrices";
}

std::optional<SparseMatrix> load_named(const std::string& name) {
  const auto path = matrix_dir() / (name + ".mtx");
  if (!fs::exists(path)) return std::nullopt;
  return read_matrix_market(path.string());
}

Outcome missing(const std::vector<std::string>& names) {
  std::string list;
  for (const auto& n : names) list += (list.empty() ? "" : ", ") + n + ".mtx";
  return {Verdict::skip, "missing " + list + " under " + matrix_dir().string() +
                             " (run tools/fetch_matrices.sh)"};
}

double final_residual(const ConvergenceHistory& h) {
  const auto v = h.final_solution_residual();
  return v ? *v : std::numeric_limits<double>::infinity();
}

/// A converged run kept for the bound and parity suites.
struct SuiteRun {
  std::string label;
  const Problem* problem;
  ExperimentResult result;
};

// Problems must outlive the runs that point at them.
std::map<std::string, Problem>& problems() {
  static std::map<std::string, Problem> p;
  return p;
}

const Problem& keep(const std::string& key, Problem p) {
  return problems().insert_or_assign(key, std::move(p)).first->second;
}

// ---------------------------------------------------------------------------

Outcome criterion1() {
  Clock clock;
  const std::size_t ns[] = {50, 200};
  const std::size_t ss[] = {2, 4, 8};
  const char* solvers[] = {"s-gl-cgs2", "s-gl-bicgstab", "s-bl-bicgstab-pq", "s-bl-bicggr-rq"};
  std::size_t rows = 0, bad = 0;
  std::string first_bad;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const std::size_t n = ns[seed % 2], s = ss[seed % 3];
    const auto problem = make_problem(gen_random_sparse(n, 5, 100 + seed, 1.2), s, seed);
    for (const char* name : solvers) {
      RunConfig cfg;
      cfg.seed = seed;
      cfg.bounds = false;
      const auto res = run_experiment(problem, name, cfg);
      double prev = 1.0;
      for (const auto& r : res.history.records) {
        if (!r.smoothed_residual_norm) continue;
        const double sk = *r.smoothed_residual_norm;
        const double primary =
            r.intermediate_residual_norm ? *r.intermediate_residual_norm : r.recursive_residual_norm;
        ++rows;
        if (sk > prev * (1 + 1e-12) || sk > primary * (1 + 1e-12)) {
          if (bad++ == 0)
            first_bad = std::string(name) + " seed " + std::to_string(seed) + " k " +
                        std::to_string(r.iteration);
        }
        prev = sk;
      }
    }
  }
  const double t = clock.seconds();
  std::string detail = std::to_string(rows) + " smoothed rows over 80 runs, " +
                       std::to_string(bad) + " violations, " + sci(t) + " s";
  if (bad) detail += " (first: " + first_bad + ")";
  return {bad == 0 && t < 30 ? Verdict::pass : Verdict::fail, detail};
}

Outcome criterion2() {
  Clock clock;
  const auto op = ProblemOperator::standard(drivers::graded_tridiagonal(100));
  const auto trace = drivers::cirs_vs_srs(op, gen_random_block(100, 4, 2024, true), 50);
  double worst = 0.0;
  for (std::size_t k = 0; k < trace.y_cirs.size(); ++k) {
    worst = std::max(worst, frobenius_norm(trace.y_cirs[k] - trace.y_srs[k]) /
                                frobenius_norm(trace.y_cirs[k]));
    worst = std::max(worst, frobenius_norm(trace.s_cirs[k] - trace.s_srs[k]) /
                                frobenius_norm(trace.s_cirs[k]));
    worst = std::max(worst, std::abs(trace.eta_cirs[k] - trace.eta_srs[k]) /
                                std::abs(trace.eta_cirs[k]));
  }
  const double t = clock.seconds();
  return {worst <= 1e-10 && t < 5 ? Verdict::pass : Verdict::fail,
          "max relative difference over 50 steps " + sci(worst) + ", " + sci(t) + " s"};
}

std::vector<SuiteRun>& toeplitz_runs() {
  static std::vector<SuiteRun> runs;
  static double elapsed = 0.0;
  if (!runs.empty()) return runs;
  Clock clock;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const auto& p = keep("toeplitz-" + std::to_string(seed), make_problem(gen_toeplitz(2000), 16, seed));
    for (const char* name : {"gl-cgs2", "s-gl-cgs2"}) {
      RunConfig cfg;
      cfg.seed = seed;
      runs.push_back({std::string(name) + " toeplitz seed " + std::to_string(seed), &p,
                      run_experiment(p, name, cfg)});
    }
  }
  elapsed = clock.seconds();
  std::printf("  (toeplitz runs took %.1f s)\n", elapsed);
  return runs;
}

Outcome criterion3() {
  Clock clock;
  const auto& runs = toeplitz_runs();
  const double t = clock.seconds();
  bool ok = t < 60;
  std::ostringstream detail;
  for (std::size_t i = 0; i + 1 < runs.size(); i += 2) {
    const auto& base = runs[i].result.history;
    const auto& smooth = runs[i + 1].result.history;
    const double rb = final_residual(base), rs = final_residual(smooth);
    const bool seed_ok = base.converged() && smooth.converged() && rb >= 1e-13 && rs <= 1e-13 &&
                         rb / rs >= 10;
    ok = ok && seed_ok;
    detail << "seed " << (i / 2 + 1) << ": " << sci(rb) << " vs " << sci(rs) << " (x"
           << sci(rb / rs) << ", " << base.iterations() << "/" << smooth.iterations() << " it); ";
  }
  detail << sci(t) << " s";
  return {ok ? Verdict::pass : Verdict::fail, detail.str()};
}

std::optional<std::vector<SuiteRun>>& cdde2_runs() {
  static std::optional<std::vector<SuiteRun>> runs;
  static bool tried = false;
  if (tried) return runs;
  tried = true;
  const auto a = load_named("cdde2");
  if (!a) return runs;
  runs.emplace();
  const auto& p = keep("cdde2", make_problem(*a, 32, 1));
  for (const char* name : {"bl-bicgstab-pq", "s-bl-bicgstab-pq", "bl-bicggr-rq", "s-bl-bicggr-rq"}) {
    RunConfig cfg;
    cfg.seed = 1;
    runs->push_back({std::string(name) + " cdde2", &p, run_experiment(p, name, cfg)});
  }
  return runs;
}

Outcome criterion4() {
  Clock clock;
  auto& runs = cdde2_runs();
  if (!runs) return missing({"cdde2"});
  const double t = clock.seconds();
  bool ok = t < 30;
  std::ostringstream detail;
  for (const auto& r : *runs) {
    const auto& h = r.result.history;
    const double res = final_residual(h);
    const bool smoothed = h.solver.rfind("s-", 0) == 0;
    const bool run_ok = smoothed ? (h.converged() && res <= 5e-13 && h.iterations() <= 120)
                                 : (res <= 1e-8 && res >= 1e-13);
    ok = ok && run_ok;
    detail << h.solver << " " << h.iterations() << " it " << sci(res) << (run_ok ? "" : " (!)")
           << "; ";
  }
  detail << sci(t) << " s";
  return {ok ? Verdict::pass : Verdict::fail, detail.str()};
}

std::optional<std::vector<SuiteRun>>& sylvester_runs() {
  static std::optional<std::vector<SuiteRun>> runs;
  static bool tried = false;
  if (tried) return runs;
  tried = true;
  const auto a = load_named("fs_680_1");
  const auto c = load_named("can_24");
  if (!a || !c) return runs;
  runs.emplace();
  const auto& p = keep("sylvester", make_problem(*a, 0, 1, *c));
  for (const char* name : {"gl-cgs2", "s-gl-cgs2"}) {
    RunConfig cfg;
    cfg.seed = 1;
    runs->push_back({std::string(name) + " fs_680_1/can_24", &p, run_experiment(p, name, cfg)});
  }
  return runs;
}

Outcome criterion5() {
  Clock clock;
  auto& runs = sylvester_runs();
  if (!runs) return missing({"fs_680_1", "can_24"});
  const double t = clock.seconds();
  const auto& base = (*runs)[0].result.history;
  const auto& smooth = (*runs)[1].result.history;
  const double rb = final_residual(base), rs = final_residual(smooth);
  const bool ok = t < 60 && base.converged() && smooth.converged() && rs <= 5e-13 && rb >= 1e-12;
  return {ok ? Verdict::pass : Verdict::fail,
          "gl-cgs2 " + std::to_string(base.iterations()) + " it " + sci(rb) + " (" +
              to_string(base.status) + "), s-gl-cgs2 " + std::to_string(smooth.iterations()) +
              " it " + sci(rs) + " (" + to_string(smooth.status) + "), " + sci(t) + " s"};
}

Outcome criterion6() {
  Clock clock;
  const auto a = load_named("bfwa782");
  if (!a) return missing({"bfwa782"});
  const auto problem = make_problem(*a, 16, 1);
  RunConfig cfg;
  cfg.seed = 1;
  cfg.bounds = false;
  cfg.theta = 1e-2;
  const auto sw = run_experiment(problem, "s-bl-bicggr-rq", cfg);
  cfg.theta.reset();
  const auto plain = run_experiment(problem, "s-bl-bicggr-rq", cfg);
  const double t = clock.seconds();
  const double r = final_residual(sw.history);
  const bool ok = t < 30 && sw.history.converged() && r <= 5e-12;
  return {ok ? Verdict::pass : Verdict::fail,
          "theta=1e-2: " + std::to_string(sw.history.iterations()) + " it " + sci(r) + " (" +
              to_string(sw.history.status) + "); without switching: " +
              to_string(plain.history.status) + " " + sci(final_residual(plain.history)) + ", " +
              sci(t) + " s"};
}

std::vector<const SuiteRun*> suite_runs() {
  std::vector<const SuiteRun*> out;
  for (const auto& r : toeplitz_runs()) out.push_back(&r);
  if (auto& c = cdde2_runs())
    for (const auto& r : *c) out.push_back(&r);
  if (auto& s = sylvester_runs())
    for (const auto& r : *s) out.push_back(&r);
  return out;
}

Outcome criterion7() {
  std::size_t checked = 0, violations = 0;
  std::ostringstream detail;
  for (const auto* run : suite_runs()) {
    if (!run->result.history.converged()) continue;
    for (const auto& b : run->result.bounds) {
      ++checked;
      const bool ok = b.measured_gap <= 10 * b.bound_value;
      if (!ok) {
        ++violations;
        detail << run->label << " " << to_string(b.theorem) << " gap " << sci(b.measured_gap)
               << " > 10 x " << sci(b.bound_value) << "; ";
      }
    }
  }
  std::string d = std::to_string(checked) + " bounds checked, " + std::to_string(violations) +
                  " exceeded with slack 10";
  if (!cdde2_runs() || !sylvester_runs()) d += " (criteria 4-5 runs unavailable, not included)";
  if (violations) d += ": " + detail.str();
  return {checked > 0 && violations == 0 ? Verdict::pass : Verdict::fail, d};
}

/// Applications added by each iteration, keyed by iteration; the final row
/// is dropped because a run may stop halfway through its last iteration.
std::vector<std::size_t> per_iteration_cost(const ConvergenceHistory& h) {
  std::vector<std::size_t> d;
  for (std::size_t k = 1; k + 1 < h.records.size(); ++k)
    d.push_back(h.records[k].operator_applications - h.records[k - 1].operator_applications);
  return d;
}

Outcome criterion8() {
  // Pairs from the reproduction suite plus every solver family on Toeplitz
  // and random problems.
  std::vector<std::pair<ConvergenceHistory, ConvergenceHistory>> pairs;
  const auto runs = suite_runs();
  for (const auto* a : runs)
    for (const auto* b : runs)
      if (a->problem == b->problem && "s-" + a->result.history.solver == b->result.history.solver)
        pairs.emplace_back(a->result.history, b->result.history);

  std::vector<Problem> extra;
  extra.push_back(make_problem(gen_toeplitz(500), 8, 3));
  extra.push_back(make_problem(gen_random_sparse(200, 5, 9, 1.2), 4, 4));
  for (const auto& p : extra)
    for (const char* base : {"gl-cgs2", "gl-bicgstab", "bl-bicgstab-pq", "bl-bicggr-rq"}) {
      RunConfig cfg;
      cfg.bounds = false;
      pairs.emplace_back(run_experiment(p, base, cfg).history,
                         run_experiment(p, "s-" + std::string(base), cfg).history);
    }

  std::size_t mismatches = 0, compared = 0;
  std::string first;
  for (const auto& [base, smooth] : pairs) {
    const auto cb = per_iteration_cost(base), cs = per_iteration_cost(smooth);
    for (std::size_t k = 0; k < std::min(cb.size(), cs.size()); ++k) {
      ++compared;
      if (cb[k] != cs[k] && mismatches++ == 0)
        first = base.solver + " iteration " + std::to_string(k + 1) + ": " +
                std::to_string(cb[k]) + " vs " + std::to_string(cs[k]);
    }
  }
  std::string d = std::to_string(pairs.size()) + " pairs, " + std::to_string(compared) +
                  " iterations compared, " + std::to_string(mismatches) + " mismatches";
  if (mismatches) d += " (first: " + first + ")";
  return {mismatches == 0 && compared > 0 ? Verdict::pass : Verdict::fail, d};
}

Outcome criterion9() {
  Clock clock;
  struct Kernel {
    const char* name;
    checks::Outcome (*run)(std::uint64_t);
  };
  const Kernel kernels[] = {{"spmm", checks::spmm},
                            {"apply", checks::sylvester_apply},
                            {"qr_thin", checks::qr_thin},
                            {"solve_small", checks::solve_small},
                            {"solve_right_block", checks::solve_right_block}};
  std::ostringstream detail;
  bool ok = true;
  for (const auto& k : kernels) {
    std::size_t failed = 0;
    double worst = 0.0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      const auto o = k.run(7000 + seed);
      worst = std::max(worst, o.error / o.tolerance);
      if (!o.ok()) ++failed;
    }
    ok = ok && failed == 0;
    detail << k.name << " " << (100 - failed) << "/100 (worst " << sci(worst)
           << " of tolerance); ";
  }
  const double t = clock.seconds();
  detail << sci(t) << " s";
  return {ok && t < 10 ? Verdict::pass : Verdict::fail, detail.str()};
}

Outcome run_criterion(int n) {
  try {
    switch (n) {
      case 1: return criterion1();
      case 2: return criterion2();
      case 3: return criterion3();
      case 4: return criterion4();
      case 5: return criterion5();
      case 6: return criterion6();
      case 7: return criterion7();
      case 8: return criterion8();
      case 9: return criterion9();
    }
  } catch (const std::exception& e) {
    return {Verdict::fail, std::string("exception: ") + e.what()};
  }
  return {Verdict::fail, "no such criterion"};
}

const char* label(Verdict v) {
  switch (v) {
    case Verdict::pass: return "PASS";
    case Verdict::fail: return "FAIL";
    case Verdict::skip: return "SKIP";
  }
  return "?";
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> which;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--criterion" && i + 1 < argc) {
      which.push_back(std::atoi(argv[++i]));
    } else {
      std::fprintf(stderr, "usage: %s [--criterion N]...\n", argv[0]);
      return 2;
    }
  }
  if (which.empty())
    for (int n = 1; n <= 9; ++n) which.push_back(n);

  bool any_fail = false, all_skip = true;
  for (int n : which) {
    const auto o = run_criterion(n);
    std::printf("criterion %d %s: %s\n", n, label(o.verdict), o.detail.c_str());
    std::fflush(stdout);
    any_fail = any_fail || o.verdict == Verdict::fail;
    all_skip = all_skip && o.verdict == Verdict::skip;
  }
  if (any_fail) return 1;
  return all_skip ? 77 : 0;
}
