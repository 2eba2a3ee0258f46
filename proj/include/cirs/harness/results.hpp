#pragma once

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cirs/history.hpp"
#include "cirs/linalg/errors.hpp"

namespace cirs {

enum class ResultFormat { csv, json };

inline constexpr const char* history_csv_header =
    "solver,iteration,recursive_res,smoothed_res,true_res,gap,eta,xi_cond,op_applies";
inline constexpr const char* summary_csv_header = "solver,iterations,final_true_res,status";

/// "results.csv" -> "results_summary.csv".
inline std::string summary_path(const std::string& path) {
  const auto slash = path.find_last_of('/');
  const auto dot = path.find_last_of('.');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
    return path + "_summary";
  return path.substr(0, dot) + "_summary" + path.substr(dot);
}

namespace detail {

inline std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string format_opt(const std::optional<double>& v) {
  return v ? format_real(*v) : std::string();
}

inline std::vector<const ConvergenceHistory*> sorted_by_solver(
    const std::vector<ConvergenceHistory>& histories) {
  std::vector<const ConvergenceHistory*> out;
  for (const auto& h : histories) out.push_back(&h);
  std::stable_sort(out.begin(), out.end(),
                   [](const auto* a, const auto* b) { return a->solver < b->solver; });
  return out;
}

inline std::ofstream open_for_write(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw Error("cannot write '" + path + "'");
  return f;
}

inline nlohmann::json opt_json(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

inline std::mutex& emission_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace detail

/// Writes per-iteration histories and a summary table.
///
/// CSV: history rows go to `path`, the summary (solver, iterations, true
/// residual of the returned solution, status) to summary_path(path). JSON:
/// one document holding both. Runs are ordered by solver name.
inline void emit_results(const std::vector<ConvergenceHistory>& histories, ResultFormat format,
                         const std::string& path) {
  std::lock_guard lock(detail::emission_mutex());
  const auto runs = detail::sorted_by_solver(histories);

  if (format == ResultFormat::csv) {
    auto f = detail::open_for_write(path);
    f << history_csv_header << '\n';
    for (const auto* h : runs)
      for (const auto& r : h->records)
        f << h->solver << ',' << r.iteration << ',' << detail::format_real(r.recursive_residual_norm)
          << ',' << detail::format_opt(r.smoothed_residual_norm) << ','
          << detail::format_opt(r.true_residual_norm) << ',' << detail::format_opt(r.gap_norm)
          << ',' << detail::format_opt(r.eta) << ',' << detail::format_opt(r.xi_condition) << ','
          << r.operator_applications << '\n';
    if (!f) throw Error("write failed for '" + path + "'");

    const std::string spath = summary_path(path);
    auto sf = detail::open_for_write(spath);
    sf << summary_csv_header << '\n';
    for (const auto* h : runs)
      sf << h->solver << ',' << h->iterations() << ','
         << detail::format_opt(h->final_solution_residual()) << ',' << to_string(h->status)
         << '\n';
    if (!sf) throw Error("write failed for '" + spath + "'");
    return;
  }

  nlohmann::json doc;
  doc["runs"] = nlohmann::json::array();
  doc["summary"] = nlohmann::json::array();
  for (const auto* h : runs) {
    nlohmann::json run;
    run["solver"] = h->solver;
    run["status"] = to_string(h->status);
    run["detail"] = h->detail;
    run["b_norm"] = h->b_norm;
    auto& recs = run["records"] = nlohmann::json::array();
    for (const auto& r : h->records) {
      recs.push_back({{"iteration", r.iteration},
                      {"recursive_res", r.recursive_residual_norm},
                      {"smoothed_res", detail::opt_json(r.smoothed_residual_norm)},
                      {"true_res", detail::opt_json(r.true_residual_norm)},
                      {"gap", detail::opt_json(r.gap_norm)},
                      {"eta", detail::opt_json(r.eta)},
                      {"xi_cond", detail::opt_json(r.xi_condition)},
                      {"op_applies", r.operator_applications},
                      {"intermediate_res", detail::opt_json(r.intermediate_residual_norm)},
                      {"smoothed_true_res", detail::opt_json(r.smoothed_true_residual_norm)},
                      {"smoothed_gap", detail::opt_json(r.smoothed_gap_norm)},
                      {"smoothing_active", r.smoothing_active}});
    }
    doc["runs"].push_back(std::move(run));
    doc["summary"].push_back({{"solver", h->solver},
                              {"iterations", h->iterations()},
                              {"final_true_res", detail::opt_json(h->final_solution_residual())},
                              {"status", to_string(h->status)}});
  }
  auto f = detail::open_for_write(path);
  f << doc.dump(2) << '\n';
  if (!f) throw Error("write failed for '" + path + "'");
}

/// Parses a history CSV written by emit_results back into per-solver
/// histories (records only), in file order.
inline std::vector<ConvergenceHistory> parse_history_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line) || line != history_csv_header)
    throw ParseError("missing or unexpected history header", 1);

  auto real = [&](const std::string& field) {
    char* end = nullptr;
    const double v = std::strtod(field.c_str(), &end);
    if (field.empty() || end != field.c_str() + field.size())
      throw ParseError("bad number '" + field + "'", line_no);
    return v;
  };
  auto opt = [&](const std::string& field) -> std::optional<double> {
    if (field.empty()) return std::nullopt;
    return real(field);
  };
  auto count = [&](const std::string& field) {
    std::size_t pos = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(field, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (field.empty() || pos != field.size())
      throw ParseError("bad count '" + field + "'", line_no);
    return static_cast<std::size_t>(v);
  };

  std::vector<ConvergenceHistory> out;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (!line.empty() && line.back() == ',') f.emplace_back();
    if (f.size() != 9) throw ParseError("expected 9 fields", line_no);

    if (out.empty() || out.back().solver != f[0]) {
      out.emplace_back();
      out.back().solver = f[0];
    }
    IterationRecord r;
    r.iteration = count(f[1]);
    r.recursive_residual_norm = real(f[2]);
    r.smoothed_residual_norm = opt(f[3]);
    r.true_residual_norm = opt(f[4]);
    r.gap_norm = opt(f[5]);
    r.eta = opt(f[6]);
    r.xi_condition = opt(f[7]);
    r.operator_applications = count(f[8]);
    out.back().records.push_back(r);
  }
  return out;
}

inline std::vector<ConvergenceHistory> parse_history_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'", 0);
  return parse_history_csv(in);
}

}  // namespace cirs
