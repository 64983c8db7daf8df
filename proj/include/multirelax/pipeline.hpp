/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 The multirelax Authors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "multirelax/grouping.hpp"
#include "multirelax/lp_format.hpp"
#include "multirelax/problem.hpp"
#include "multirelax/recovery.hpp"
#include "multirelax/relaxations.hpp"

namespace multirelax {

enum class Method { ppr, rppr };

/// A relaxation of every term of a spec inside one model with shared indicators.
struct Relaxation {
  BaseModel base;
  PartitionIndicators indicators;
  std::vector<PprArtifacts> ppr;    // Method::ppr, per term
  std::vector<RpprArtifacts> rppr;  // Method::rppr, per term
};

/// Uniform `partitions` intervals on every factor; the tree applies positionally to each term.
inline Relaxation build_relaxation(const ProblemSpec& spec, Method method, int partitions,
                                   const std::optional<GroupingTree>& tree = std::nullopt) {
  if (method == Method::rppr && !tree) throw DomainError("recursive relaxation needs a grouping tree");
  Relaxation r{build_base(spec), {}, {}, {}};
  for (const auto& term : r.base.terms) {
    const auto d = detail::term_discretization(r.base, term, partitions);
    if (method == Method::ppr) r.ppr.push_back(build_ppr(term, d, r.base.model, r.indicators));
    else r.rppr.push_back(build_rppr(term, *tree, d, r.base.model, r.indicators));
  }
  return r;
}

/// Per-term active boxes read off the shared indicators of the original variables.
inline std::vector<Box> active_boxes(const Relaxation& r, const SolutionVector& sol) {
  if (!sol.has_point()) throw DomainError("relaxation solution carries no point");
  std::vector<Box> out;
  for (const auto& term : r.base.terms) {
    Box box;
    for (auto v : term.variables) {
      const auto& y = r.indicators.binaries(v);
      std::size_t pick = y.size();
      for (std::size_t k = 0; k < y.size(); ++k) {
        if (sol[y[k]] < 0.5) continue;
        if (pick != y.size()) throw DomainError("two active intervals for " + r.base.model.variable(v).name);
        pick = k;
      }
      if (pick == y.size()) throw DomainError("no active interval for " + r.base.model.variable(v).name);
      box.dims.push_back(r.indicators.breakpoints(v).interval(pick));
    }
    out.push_back(std::move(box));
  }
  return out;
}

struct PipelineConfig {
  Method method = Method::ppr;
  std::optional<GroupingTree> tree;
  std::string grouping_text;  // for row labels
  int partitions = 2;
  RecoveryVariant recovery = RecoveryVariant::fa;
  int aux_partitions = 0;  // ff2 only; 0 = products of the children's breakpoints
  SolveConfig solve;
  MilpSolver solver = internal_solver();
  std::string solver_name = "internal";  // for row labels
};

struct ExperimentRow {
  std::string method;    // "PPR" or "R-PPR:<grouping>"
  std::string recovery;  // "fa", "ff1", "ff2", or "fa>ff1" after a fallback
  int partitions = 0;
  std::string solver = "internal";
  double ub = std::numeric_limits<double>::quiet_NaN();
  double lb = std::numeric_limits<double>::quiet_NaN();
  double ub_gap = std::numeric_limits<double>::quiet_NaN();
  double lb_gap = std::numeric_limits<double>::quiet_NaN();
  // (UB - OPT) / |OPT|, the convention of published benchmark tables
  double ub_gap_opt = std::numeric_limits<double>::quiet_NaN();
  SolveStatus relax_status = SolveStatus::infeasible;
  SolveStatus recover_status = SolveStatus::infeasible;
  double wall_seconds = 0.0;
};

struct PipelineResult {
  ExperimentRow row;
  SolutionVector relaxation;
  BnbStats relaxation_stats;
  std::optional<RecoveryResult> recovery;
};

/// Gaps in the maximization convention; a minimization problem is mirrored by negation.
inline std::pair<double, double> gaps(ObjSense sense, double bound, double feasible, double opt) {
  const double s = sense == ObjSense::maximize ? 1.0 : -1.0;
  double ug = std::numeric_limits<double>::quiet_NaN(), lg = ug;
  if (std::isfinite(bound) && bound != 0.0) ug = ub_gap(s * bound, s * opt);
  if (std::isfinite(feasible) && feasible != 0.0) lg = lb_gap(s * opt, s * feasible);
  return {ug, lg};
}

/// Bound excess measured against |OPT| instead of |UB|.
inline double opt_relative_gap(ObjSense sense, double bound, double opt) {
  if (!std::isfinite(bound) || opt == 0.0) return std::numeric_limits<double>::quiet_NaN();
  const double s = sense == ObjSense::maximize ? 1.0 : -1.0;
  return s * (bound - opt) / std::abs(opt) * 100.0;
}

inline PipelineResult run_pipeline(const ProblemSpec& spec, const PipelineConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  PipelineResult out;
  auto& row = out.row;
  row.partitions = cfg.partitions;
  row.solver = cfg.solver_name;
  row.method = cfg.method == Method::ppr ? "PPR" : "R-PPR:" + cfg.grouping_text;
  row.recovery = to_string(cfg.recovery);

  auto relax = build_relaxation(spec, cfg.method, cfg.partitions, cfg.tree);
  auto report = cfg.solver(relax.base.model, cfg.solve);
  out.relaxation = std::move(report.solution);
  out.relaxation_stats = std::move(report.stats);
  row.relax_status = out.relaxation.status;
  if (row.relax_status == SolveStatus::optimal) {
    row.ub = out.relaxation.objective;
  } else if (row.relax_status == SolveStatus::limit) {
    row.ub = out.relaxation_stats.best_bound;
  }

  std::optional<RecoveryResult> rec;
  switch (cfg.recovery) {
    case RecoveryVariant::fa:
      if (out.relaxation.has_point()) {
        rec = recover_Fa(spec, active_boxes(relax, out.relaxation), cfg.partitions, cfg.tree, cfg.solver, cfg.solve);
      }
      break;
    case RecoveryVariant::ff1:
      rec = recover_Ff1(spec, cfg.partitions, cfg.method == Method::rppr ? cfg.tree : std::nullopt, cfg.solver,
                        cfg.solve);
      break;
    case RecoveryVariant::ff2:
      if (!cfg.tree) throw RecoveryError("ff2 recovery needs a grouping tree");
      rec = recover_Ff2(spec, cfg.partitions, *cfg.tree, cfg.aux_partitions, cfg.solver, cfg.solve);
      break;
  }
  if (rec) {
    row.recover_status = rec->status;
    if (rec->has_point()) row.lb = rec->objective;
    if (rec->fell_back) row.recovery = "fa>ff1";
  }
  if (spec.opt) {
    std::tie(row.ub_gap, row.lb_gap) = gaps(spec.objective.sense, row.ub, row.lb, *spec.opt);
    row.ub_gap_opt = opt_relative_gap(spec.objective.sense, row.ub, *spec.opt);
  }
  out.recovery = std::move(rec);
  row.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

namespace detail {

inline std::string csv_number(double v) { return std::isfinite(v) ? format_number(v) : std::string(); }

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  out << text;
  if (!out) throw std::runtime_error(path + ": write failed");
}

}  // namespace detail

/// Deterministic CSV; wall time only when asked, since it varies between runs.
inline std::string format_csv(const std::vector<ExperimentRow>& rows, bool with_timing = false) {
  if (rows.empty()) throw std::invalid_argument("no rows to emit");
  std::ostringstream os;
  os << "method,recovery,partitions,solver,ub,lb,ub_gap,lb_gap,ub_gap_opt,relax_status,recover_status";
  if (with_timing) os << ",wall_seconds";
  os << '\n';
  for (const auto& r : rows) {
    os << '"' << r.method << "\"," << r.recovery << ',' << r.partitions << ',' << r.solver << ',' << detail::csv_number(r.ub) << ','
       << detail::csv_number(r.lb) << ',' << detail::csv_number(r.ub_gap) << ',' << detail::csv_number(r.lb_gap)
       << ',' << detail::csv_number(r.ub_gap_opt) << ',' << to_string(r.relax_status) << ',' << to_string(r.recover_status);
    if (with_timing) os << ',' << detail::csv_number(r.wall_seconds);
    os << '\n';
  }
  return os.str();
}

inline void emit_csv(const std::vector<ExperimentRow>& rows, const std::string& path, bool with_timing = false) {
  detail::write_text(path, format_csv(rows, with_timing));
}

/// Fills the gap columns of one instance's rows against the best recovered point among them,
/// for instances whose optimum is unknown. Rows without a point keep NaN lower gaps.
inline void apply_reference_gaps(std::vector<ExperimentRow>& rows, ObjSense sense) {
  const double s = sense == ObjSense::maximize ? 1.0 : -1.0;
  double best = std::numeric_limits<double>::quiet_NaN();
  for (const auto& r : rows) {
    if (std::isfinite(r.lb) && !(s * r.lb <= s * best)) best = r.lb;
  }
  if (!std::isfinite(best)) return;
  for (auto& r : rows) {
    std::tie(r.ub_gap, r.lb_gap) = gaps(sense, r.ub, r.lb, best);
    r.ub_gap_opt = opt_relative_gap(sense, r.ub, best);
  }
}

/// Linear-interpolation quantile of sorted data, q in [0, 1].
inline double quantile(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) throw std::invalid_argument("quantile of empty data");
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

struct BoxplotSummary {
  std::string method;
  std::string recovery;
  int partitions = 0;
  std::string metric;  // "ub_gap" or "lb_gap"
  std::size_t count = 0;
  double min = 0, q1 = 0, median = 0, q3 = 0, max = 0;
};

inline std::vector<BoxplotSummary> boxplot_summaries(const std::vector<ExperimentRow>& rows) {
  if (rows.empty()) throw std::invalid_argument("no rows to summarize");
  std::map<std::tuple<std::string, std::string, int>, std::pair<std::vector<double>, std::vector<double>>> groups;
  for (const auto& r : rows) {
    auto& g = groups[{r.method, r.recovery == "fa>ff1" ? "fa" : r.recovery, r.partitions}];
    if (std::isfinite(r.ub_gap)) g.first.push_back(r.ub_gap);
    if (std::isfinite(r.lb_gap)) g.second.push_back(r.lb_gap);
  }
  std::vector<BoxplotSummary> out;
  for (auto& [key, data] : groups) {
    for (auto* series : {&data.first, &data.second}) {
      if (series->empty()) continue;
      std::sort(series->begin(), series->end());
      BoxplotSummary s{std::get<0>(key), std::get<1>(key), std::get<2>(key),
                       series == &data.first ? "ub_gap" : "lb_gap", series->size()};
      s.min = series->front();
      s.q1 = quantile(*series, 0.25);
      s.median = quantile(*series, 0.5);
      s.q3 = quantile(*series, 0.75);
      s.max = series->back();
      out.push_back(std::move(s));
    }
  }
  return out;
}

inline void emit_boxplot_data(const std::vector<ExperimentRow>& rows, const std::string& path) {
  std::ostringstream os;
  os << "method,recovery,partitions,metric,count,min,q1,median,q3,max\n";
  for (const auto& s : boxplot_summaries(rows)) {
    os << '"' << s.method << "\"," << s.recovery << ',' << s.partitions << ',' << s.metric << ',' << s.count << ','
       << format_number(s.min) << ',' << format_number(s.q1) << ',' << format_number(s.median) << ','
       << format_number(s.q3) << ',' << format_number(s.max) << '\n';
  }
  detail::write_text(path, os.str());
}

/// Groupings of a four-factor term used for the recursive comparisons.
inline const std::vector<std::string>& standard_groupings() {
  static const std::vector<std::string> g = {"(a*(b*c))*d", "((a*b)*c)*d", "a*(b*(c*d))"};
  return g;
}

inline GroupingTree parse_positional_grouping(const std::string& expr, std::size_t arity) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < arity; ++i) {
    if (i >= 26) throw GroupingParseError("positional groupings support at most 26 factors");
    names.emplace_back(1, static_cast<char>('a' + i));
  }
  return parse_grouping(expr, names);
}

struct RandomInstanceConfig {
  int variables = 8;
  int terms = 3;
  int arity = 4;
};

/// Random maximization over [0,1] boxes: positive weights on the lifted terms, a small linear
/// part, and one knapsack row that cuts the box.
inline ProblemSpec random_instance(std::uint64_t seed, const RandomInstanceConfig& rc = {}) {
  if (rc.arity < 2 || rc.arity > rc.variables || rc.terms < 1) throw std::invalid_argument("bad random instance shape");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> weight(0.5, 1.5), lin(-0.5, 0.5), row(0.1, 1.0);
  ProblemSpec spec;
  for (int i = 0; i < rc.variables; ++i) spec.variables.push_back({"x" + std::to_string(i + 1), 0.0, 1.0});
  std::vector<int> order(static_cast<std::size_t>(rc.variables));
  for (int t = 0; t < rc.terms; ++t) {
    for (int i = 0; i < rc.variables; ++i) order[static_cast<std::size_t>(i)] = i;
    std::shuffle(order.begin(), order.end(), rng);
    std::sort(order.begin(), order.begin() + rc.arity);
    TermSpec term;
    for (int k = 0; k < rc.arity; ++k) term.variables.push_back(spec.variables[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])].name);
    term.output = "t" + std::to_string(t + 1);
    spec.terms.push_back(std::move(term));
  }
  ConstraintSpec cap{"cap", {}, RowSense::le, 0.0};
  double total = 0.0;
  for (const auto& v : spec.variables) {
    const double a = row(rng);
    cap.coefficients.emplace_back(v.name, a);
    total += a;
  }
  cap.rhs = 0.6 * total;
  spec.constraints.push_back(std::move(cap));
  spec.objective.sense = ObjSense::maximize;
  for (const auto& t : spec.terms) spec.objective.coefficients.emplace_back(t.output, weight(rng));
  for (const auto& v : spec.variables) spec.objective.coefficients.emplace_back(v.name, lin(rng));
  return spec;
}

}  // namespace multirelax
