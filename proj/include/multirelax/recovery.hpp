/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 The multirelax Authors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "multirelax/branch_and_bound.hpp"
#include "multirelax/grouping.hpp"
#include "multirelax/milp_model.hpp"
#include "multirelax/multilinear.hpp"
#include "multirelax/problem.hpp"
#include "multirelax/relaxations.hpp"

namespace multirelax {

class RecoveryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One-dimensional faces of a grid: vertices are grid points, edges join points that differ in
/// exactly one coordinate by one breakpoint step.
struct EdgeSet {
  Discretization grid;
  std::vector<std::pair<std::size_t, std::size_t>> edges;  // (lower vertex, upper vertex)
  std::vector<std::vector<std::size_t>> incidence;         // vertex -> incident edges

  [[nodiscard]] std::size_t num_vertices() const { return grid.grid().size(); }
  [[nodiscard]] std::size_t num_edges() const { return edges.size(); }
};

/// Edges ordered by varying axis, then by lower vertex.
inline EdgeSet grid_edges(const Discretization& d) {
  EdgeSet out{d, {}, std::vector<std::vector<std::size_t>>(d.grid().size())};
  const auto& g = d.grid();
  for (std::size_t axis = 0; axis < d.dimension(); ++axis) {
    for (std::size_t v = 0; v < g.size(); ++v) {
      if (g.coordinate(v, axis) + 1 >= g.shape()[axis]) continue;
      const std::size_t u = v + g.stride(axis);
      out.incidence[v].push_back(out.edges.size());
      out.incidence[u].push_back(out.edges.size());
      out.edges.emplace_back(v, u);
    }
  }
  return out;
}

inline EdgeSet box_edges(const Box& box) {
  for (const auto& iv : box.dims) {
    if (!(iv.lo < iv.hi)) throw DomainError("box_edges needs a nondegenerate box");
  }
  return grid_edges(uniform_discretization(box, 1));
}

struct RecoveryBlock {
  std::vector<VarRef> lambda;  // per vertex
  std::vector<VarRef> z;       // per edge
  EdgeSet edges;
};

/// Convex combination of edge-set vertices where only the two ends of one selected edge may
/// carry weight, so w equals the exact product along that edge.
inline RecoveryBlock build_recovery(const MultilinearTerm& term, const EdgeSet& es, MilpModel& model,
                                    const std::string& prefix) {
  if (es.edges.empty()) throw RecoveryError("empty edge set");
  if (es.grid.dimension() != term.arity()) throw RecoveryError("edge set does not match term arity");
  RecoveryBlock block{detail::add_lambda_block(term, es.grid, model, prefix), {}, es};
  LinearExpr pick;
  for (std::size_t e = 0; e < es.edges.size(); ++e) {
    block.z.push_back(model.add_variable(prefix + "_z" + std::to_string(e + 1), 0, 1, VarKind::binary));
    pick.add(block.z.back(), 1.0);
  }
  model.add_row(std::move(pick), RowSense::eq, 1.0, prefix + "_edge");
  for (std::size_t v = 0; v < es.num_vertices(); ++v) {
    LinearExpr gate{{block.lambda[v], 1.0}};
    for (std::size_t e : es.incidence[v]) gate.add(block.z[e], -1.0);
    model.add_row(std::move(gate), RowSense::le, 0.0, prefix + "_gate" + std::to_string(v + 1));
  }
  return block;
}

inline double ub_gap(double ub, double opt) {
  if (ub == 0.0) throw DomainError("ub_gap: zero upper bound");
  return (ub - opt) / std::abs(ub) * 100.0;
}

inline double lb_gap(double opt, double lb) {
  if (lb == 0.0) throw DomainError("lb_gap: zero lower bound");
  return (opt - lb) / std::abs(lb) * 100.0;
}

/// Relative product residual |w - prod x| / max(1, |w|).
inline double product_residual(double w, std::span<const double> x) { return std::abs(w - phi(x)) / std::max(1.0, std::abs(w)); }

inline constexpr double kProductTolerance = 1e-6;

enum class RecoveryVariant { fa, ff1, ff2 };

inline const char* to_string(RecoveryVariant v) {
  switch (v) {
    case RecoveryVariant::fa: return "fa";
    case RecoveryVariant::ff1: return "ff1";
    case RecoveryVariant::ff2: return "ff2";
  }
  return "?";
}

struct MilpReport {
  SolutionVector solution;
  BnbStats stats;
};

/// Any MILP backend: the internal branch-and-bound or an external adapter.
using MilpSolver = std::function<MilpReport(const MilpModel&, const SolveConfig&)>;

inline MilpSolver internal_solver() {
  return [](const MilpModel& m, const SolveConfig& cfg) {
    auto [sol, stats] = solve_milp(m, cfg);
    return MilpReport{std::move(sol), std::move(stats)};
  };
}

struct RecoveryResult {
  RecoveryVariant variant = RecoveryVariant::fa;
  SolveStatus status = SolveStatus::infeasible;
  double objective = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> x;                 // original variables, spec order
  std::vector<double> w;                 // per term
  std::vector<std::vector<std::size_t>> active_edges;  // per term, one entry per recovery block
  bool fell_back = false;                // fa replaced by ff1
  double max_residual = 0.0;             // worst product_residual over terms
  BnbStats stats;
  MilpModel model;
  SolutionVector solution;

  [[nodiscard]] bool has_point() const { return !x.empty(); }
  [[nodiscard]] bool product_feasible(double tol = kProductTolerance) const { return has_point() && max_residual <= tol; }
};

namespace detail {

struct RecoveryPlan {
  BaseModel base;
  std::vector<std::vector<RecoveryBlock>> blocks;  // per term
};

inline RecoveryResult finish_recovery(RecoveryVariant variant, RecoveryPlan plan, const MilpSolver& solver,
                                      const SolveConfig& cfg) {
  RecoveryResult out;
  out.variant = variant;
  auto report = solver(plan.base.model, cfg);
  out.status = report.solution.status;
  out.stats = std::move(report.stats);
  out.solution = std::move(report.solution);
  if (out.solution.has_point()) {
    const auto& sol = out.solution;
    out.objective = sol.objective;
    for (auto v : plan.base.variables) out.x.push_back(sol[v]);
    for (std::size_t t = 0; t < plan.base.terms.size(); ++t) {
      const auto& term = plan.base.terms[t];
      std::vector<double> xs;
      for (auto v : term.variables) xs.push_back(sol[v]);
      out.w.push_back(sol[term.output]);
      out.max_residual = std::max(out.max_residual, product_residual(sol[term.output], xs));
      std::vector<std::size_t> edges;
      for (const auto& b : plan.blocks[t]) {
        std::size_t pick = b.z.size();
        for (std::size_t e = 0; e < b.z.size(); ++e) {
          if (sol[b.z[e]] >= 0.5) pick = e;
        }
        edges.push_back(pick);
      }
      out.active_edges.push_back(std::move(edges));
    }
  }
  out.model = std::move(plan.base.model);
  return out;
}

inline std::string block_prefix(const MilpModel& m, VarRef out) { return "rec_" + m.variable(out).name; }

/// Every product of a left and a right breakpoint, sorted, with near-equal values merged.
inline Breakpoints product_breakpoints(const Breakpoints& left, const Breakpoints& right) {
  std::vector<double> prods;
  for (double u : left.points()) {
    for (double v : right.points()) prods.push_back(u * v);
  }
  std::sort(prods.begin(), prods.end());
  std::vector<double> merged;
  for (double q : prods) {
    if (merged.empty() || q - merged.back() > 1e-12 * std::max(1.0, std::abs(q))) merged.push_back(q);
  }
  return Breakpoints(std::move(merged));
}

// Per-node bilinear recovery along `tree`. An auxiliary's breakpoints are the products of its
// children's breakpoints when aux_partitions is 0, else aux_partitions uniform intervals over
// its interval-arithmetic bounds.
inline std::vector<RecoveryBlock> tree_recovery(const MultilinearTerm& term, const GroupingTree& tree,
                                                const Discretization& d, int aux_partitions, MilpModel& model) {
  if (aux_partitions < 0) throw RecoveryError("aux_partitions must be nonnegative");
  const std::size_t pairs = tree.num_pairs();
  std::vector<VarRef> aux(pairs);
  std::vector<Breakpoints> aux_axis(pairs);
  std::vector<RecoveryBlock> blocks;
  const std::string name = model.variable(term.output).name;
  auto axis_of = [&](int node) -> const Breakpoints& {
    const auto& n = tree.node(node);
    return n.is_leaf() ? d.axis(static_cast<std::size_t>(n.leaf)) : aux_axis[static_cast<std::size_t>(n.aux)];
  };
  auto ref_of = [&](int node) -> VarRef {
    const auto& n = tree.node(node);
    return n.is_leaf() ? term.variables[static_cast<std::size_t>(n.leaf)] : aux[static_cast<std::size_t>(n.aux)];
  };
  for (std::size_t a = 0; a < pairs; ++a) {
    const auto& node = tree.node(tree.pairs()[a]);
    const Breakpoints& bl = axis_of(node.left);
    const Breakpoints& br = axis_of(node.right);
    aux_axis[a] = aux_partitions == 0
                      ? product_breakpoints(bl, br)
                      : uniform_breakpoints(interval_product(bl.range(), br.range()), aux_partitions);
    const Interval bounds = aux_axis[a].range();
    aux[a] = tree.pairs()[a] == tree.root()
                 ? term.output
                 : model.add_variable("rec_" + name + "_aux" + std::to_string(a + 1), bounds.lo, bounds.hi);
    MultilinearTerm bilinear({ref_of(node.left), ref_of(node.right)}, aux[a]);
    blocks.push_back(build_recovery(bilinear, grid_edges(Discretization({bl, br})), model,
                                    "rec_" + name + "_n" + std::to_string(a + 1)));
  }
  return blocks;
}

inline Discretization term_discretization(const BaseModel& base, const MultilinearTerm& term, int partitions) {
  std::vector<Breakpoints> axes;
  for (auto v : term.variables) {
    axes.push_back(uniform_breakpoints({base.model.variable(v).lb, base.model.variable(v).ub}, partitions));
  }
  return Discretization(std::move(axes));
}

}  // namespace detail

/// Recovery over the grid edges of every term's full discretization. With a tree, each
/// bilinear node recovers separately and auxiliaries stay unpartitioned.
inline RecoveryResult recover_Ff1(const ProblemSpec& spec, int partitions, const std::optional<GroupingTree>& tree,
                                  const MilpSolver& solver = internal_solver(), const SolveConfig& cfg = {}) {
  detail::RecoveryPlan plan{build_base(spec), {}};
  for (const auto& term : plan.base.terms) {
    const auto d = detail::term_discretization(plan.base, term, partitions);
    if (tree) {
      plan.blocks.push_back(detail::tree_recovery(term, *tree, d, 1, plan.base.model));
    } else {
      plan.blocks.push_back(
          {build_recovery(term, grid_edges(d), plan.base.model, detail::block_prefix(plan.base.model, term.output))});
    }
  }
  return detail::finish_recovery(RecoveryVariant::ff1, std::move(plan), solver, cfg);
}

/// Per-node bilinear recovery where auxiliaries are partitioned as well: at the products of
/// their children's breakpoints by default, or into `aux_partitions` uniform intervals.
inline RecoveryResult recover_Ff2(const ProblemSpec& spec, int partitions, const GroupingTree& tree,
                                  int aux_partitions = 0,
                                  const MilpSolver& solver = internal_solver(), const SolveConfig& cfg = {}) {
  detail::RecoveryPlan plan{build_base(spec), {}};
  for (const auto& term : plan.base.terms) {
    const auto d = detail::term_discretization(plan.base, term, partitions);
    plan.blocks.push_back(detail::tree_recovery(term, tree, d, aux_partitions, plan.base.model));
  }
  return detail::finish_recovery(RecoveryVariant::ff2, std::move(plan), solver, cfg);
}

/// Recovery over the box edges of each term's active box. Falls back to recover_Ff1 when the
/// edge-restricted problem is infeasible.
inline RecoveryResult recover_Fa(const ProblemSpec& spec, const std::vector<Box>& active_boxes, int partitions,
                                 const std::optional<GroupingTree>& fallback_tree,
                                 const MilpSolver& solver = internal_solver(), const SolveConfig& cfg = {}) {
  detail::RecoveryPlan plan{build_base(spec), {}};
  if (active_boxes.size() != plan.base.terms.size()) throw RecoveryError("need one active box per term");
  for (std::size_t t = 0; t < plan.base.terms.size(); ++t) {
    const auto& term = plan.base.terms[t];
    if (active_boxes[t].size() != term.arity()) throw RecoveryError("active box does not match term arity");
    plan.blocks.push_back({build_recovery(term, box_edges(active_boxes[t]), plan.base.model,
                                          detail::block_prefix(plan.base.model, term.output))});
  }
  auto out = detail::finish_recovery(RecoveryVariant::fa, std::move(plan), solver, cfg);
  if (out.status == SolveStatus::infeasible) {
    out = recover_Ff1(spec, partitions, fallback_tree, solver, cfg);
    out.variant = RecoveryVariant::fa;
    out.fell_back = true;
  }
  return out;
}

}  // namespace multirelax
