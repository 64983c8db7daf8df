/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 The multirelax Authors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

// Hands a model to an outside MILP solver through files. The command template names the LP
// file with {lp_in} and the solution file with {sol_out}; {time_limit} is optional. The
// solver must write one `name value` pair per line and may add `=obj= value`. Columns it
// leaves out are read as zero, which matches how most solvers print sparse solutions.

#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <system_error>
#include <vector>

#include <unistd.h>

#include "multirelax/lp_format.hpp"
#include "multirelax/milp_model.hpp"
#include "multirelax/recovery.hpp"
#include "multirelax/simplex.hpp"

namespace multirelax {

/// Any failure of the external path. `diagnostics` holds the solver's captured output.
class AdapterError : public std::runtime_error {
 public:
  AdapterError(const std::string& what, std::string diagnostics = {})
      : std::runtime_error(what), diagnostics_(std::move(diagnostics)) {}
  [[nodiscard]] const std::string& diagnostics() const { return diagnostics_; }

 private:
  std::string diagnostics_;
};

inline constexpr const char* kSolverCommandEnv = "MULTIRELAX_SOLVER_CMD";

/// The explicit template if given, otherwise the environment variable.
inline std::string resolve_solver_command(const std::optional<std::string>& explicit_template = std::nullopt) {
  if (explicit_template && !explicit_template->empty()) return *explicit_template;
  if (const char* env = std::getenv(kSolverCommandEnv); env && *env) return env;
  throw AdapterError(std::string("no solver command: pass one or set ") + kSolverCommandEnv);
}

namespace detail {

inline std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') out += "'\\''";
    else out += c;
  }
  return out + "'";
}

inline std::string substitute(std::string text, const std::string& key, const std::string& value) {
  for (std::size_t pos = text.find(key); pos != std::string::npos; pos = text.find(key, pos + value.size())) {
    text.replace(pos, key.size(), value);
  }
  return text;
}

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// Removes the scratch directory on every exit path.
class ScratchDir {
 public:
  ScratchDir() {
    static std::atomic<unsigned> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("multirelax-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~ScratchDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  ScratchDir(const ScratchDir&) = delete;
  ScratchDir& operator=(const ScratchDir&) = delete;
  [[nodiscard]] const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline double parse_value(const std::string& token, const std::string& where) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc() || ptr != token.data() + token.size() || !std::isfinite(v)) {
    throw AdapterError(where + ": bad number '" + token + "'");
  }
  return v;
}

}  // namespace detail

struct ParsedSolution {
  std::vector<double> values;
  std::optional<double> objective;
};

/// Reads `name value` lines against the model's columns. Blank lines and `#` comments are skipped.
inline ParsedSolution parse_solution_text(const MilpModel& model, const std::string& text) {
  ParsedSolution out{std::vector<double>(model.num_variables(), 0.0), std::nullopt};
  std::vector<bool> seen(model.num_variables(), false);
  std::istringstream in(text);
  std::string line;
  for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
    const std::string where = "solution line " + std::to_string(lineno);
    std::istringstream ls(line);
    std::string name, value, extra;
    if (!(ls >> name) || name.front() == '#') continue;
    if (!(ls >> value) || (ls >> extra)) throw AdapterError(where + ": expected `name value`");
    if (name == "=obj=") {
      out.objective = detail::parse_value(value, where);
      continue;
    }
    if (!model.has_variable(name)) throw AdapterError(where + ": unknown column '" + name + "'");
    const auto j = model.find(name).id;
    if (seen[j]) throw AdapterError(where + ": column '" + name + "' listed twice");
    seen[j] = true;
    out.values[j] = detail::parse_value(value, where);
  }
  return out;
}

/// Runs the external solver and returns its point after checking it against every row,
/// bound, and integrality requirement at cfg.feasibility_tol.
inline SolutionVector solve_external(const MilpModel& model, const std::string& command_template,
                                     const SolveConfig& cfg = {}) {
  for (const char* key : {"{lp_in}", "{sol_out}"}) {
    if (command_template.find(key) == std::string::npos) {
      throw AdapterError(std::string("solver command lacks the ") + key + " placeholder");
    }
  }
  detail::ScratchDir dir;
  const auto lp = dir.path() / "model.lp", sol = dir.path() / "model.sol", log = dir.path() / "solver.log";
  {
    std::ofstream out(lp, std::ios::binary);
    out << write_lp_file(model);
    if (!out) throw AdapterError("cannot write " + lp.string());
  }

  std::string cmd = detail::substitute(command_template, "{lp_in}", detail::shell_quote(lp.string()));
  cmd = detail::substitute(cmd, "{sol_out}", detail::shell_quote(sol.string()));
  cmd = detail::substitute(cmd, "{time_limit}", format_number(cfg.time_limit_seconds));
  const int rc = std::system(("( " + cmd + "\n) > " + detail::shell_quote(log.string()) + " 2>&1").c_str());
  const std::string diagnostics = detail::slurp(log);
  if (rc != 0) throw AdapterError("solver command exited with status " + std::to_string(rc), diagnostics);
  if (!std::filesystem::exists(sol)) throw AdapterError("solver wrote no solution file", diagnostics);

  ParsedSolution parsed;
  try {
    parsed = parse_solution_text(model, detail::slurp(sol));
  } catch (const AdapterError& e) {
    throw AdapterError(e.what(), diagnostics);
  }
  SolutionVector out{std::move(parsed.values), 0.0, SolveStatus::optimal, {}};
  out.objective = parsed.objective.value_or(objective_value(model, out.values));
  const auto violations = check_feasible(model, out, cfg.feasibility_tol);
  if (!violations.empty()) {
    std::string what = "solver returned an infeasible point (" + std::to_string(violations.size()) + " violations, first " +
                       violations.front().tag + " by " + format_number(violations.front().magnitude) + ")";
    throw AdapterError(what, diagnostics);
  }
  return out;
}

/// MilpSolver backed by solve_external; the returned stats carry only the objective.
inline MilpSolver external_solver(std::string command_template) {
  return [tpl = std::move(command_template)](const MilpModel& m, const SolveConfig& cfg) {
    auto sol = solve_external(m, tpl, cfg);
    BnbStats stats;
    stats.incumbent = stats.best_bound = sol.objective;
    stats.gap = 0.0;
    return MilpReport{std::move(sol), std::move(stats)};
  };
}

}  // namespace multirelax
