/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 The multirelax Authors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "multirelax/grouping.hpp"
#include "multirelax/milp_model.hpp"
#include "multirelax/multilinear.hpp"

namespace multirelax {

/// Indicator binaries y[k] = 1 iff a variable lies in its k-th interval.
///
/// Partitions belong to variables, so every term touching a variable shares one set of
/// binaries and one breakpoint vector.
class PartitionIndicators {
 public:
  /// Returns the binaries for `x`, creating them and the choose-one row on first use.
  const std::vector<VarRef>& ensure(MilpModel& model, VarRef x, const Breakpoints& bp) {
    auto it = entries_.find(x.id);
    if (it != entries_.end()) {
      if (it->second.breakpoints.points() != bp.points()) {
        throw DomainError("conflicting breakpoints for variable " + model.variable(x).name);
      }
      return it->second.y;
    }
    Entry e{bp, {}};
    const std::string name = model.variable(x).name;
    LinearExpr choose;
    for (std::size_t k = 0; k < bp.num_intervals(); ++k) {
      auto y = model.add_variable("y_" + name + "_" + std::to_string(k + 1), 0, 1, VarKind::binary);
      e.y.push_back(y);
      choose.add(y, 1.0);
    }
    model.add_row(std::move(choose), RowSense::eq, 1.0, "choose_" + name);
    return entries_.emplace(x.id, std::move(e)).first->second.y;
  }

  [[nodiscard]] bool contains(VarRef x) const { return entries_.count(x.id) != 0; }
  [[nodiscard]] const std::vector<VarRef>& binaries(VarRef x) const { return entries_.at(x.id).y; }
  [[nodiscard]] const Breakpoints& breakpoints(VarRef x) const { return entries_.at(x.id).breakpoints; }

 private:
  struct Entry {
    Breakpoints breakpoints;
    std::vector<VarRef> y;
  };
  std::map<std::size_t, Entry> entries_;
};

/// Handles into a caller-owned model for one lambda-grid relaxation of one term.
struct PprArtifacts {
  std::vector<VarRef> lambda_refs;           // indexed by flat grid index
  std::vector<std::vector<VarRef>> y_refs;   // [term position][interval]
  MultilinearTerm term;
  Discretization discretization;
};

struct RpprArtifacts {
  GroupingTree tree;
  std::vector<PprArtifacts> nodes;  // indexed by aux id
  std::vector<VarRef> aux;          // aux id -> output column; the root maps to the term output
  std::vector<Interval> aux_bounds;
};

struct ActivePartition {
  std::vector<std::size_t> intervals;  // per term position
  Box box;
};

namespace detail {

inline void require_finite(const Box& box) {
  for (const auto& iv : box.dims) {
    if (is_infinite(iv.lo) || is_infinite(iv.hi)) throw DomainError("relaxation needs finite bounds");
  }
}

inline Box term_box(const MilpModel& model, const MultilinearTerm& term) {
  std::vector<Interval> dims;
  for (auto v : term.variables) dims.push_back({model.variable(v).lb, model.variable(v).ub});
  return Box(std::move(dims));
}

// Adds lambda columns over every grid point plus the x-link, w-link, and convexity rows.
inline std::vector<VarRef> add_lambda_block(const MultilinearTerm& term, const Discretization& d, MilpModel& model,
                                            const std::string& prefix) {
  if (d.dimension() != term.arity()) throw DomainError("discretization does not match term arity");
  const std::size_t count = d.grid().size();
  std::vector<VarRef> lambda;
  lambda.reserve(count);
  for (std::size_t s = 0; s < count; ++s) {
    lambda.push_back(model.add_variable(prefix + "_" + std::to_string(s + 1), 0, kInfinity));
  }
  std::vector<LinearExpr> links(term.arity());
  LinearExpr wlink, conv;
  for (std::size_t i = 0; i < term.arity(); ++i) links[i].add(term.variables[i], 1.0);
  wlink.add(term.output, 1.0);
  for (std::size_t s = 0; s < count; ++s) {
    const auto v = d.vertex(s);
    for (std::size_t i = 0; i < term.arity(); ++i) links[i].add(lambda[s], -v[i]);
    wlink.add(lambda[s], -phi(v));
    conv.add(lambda[s], 1.0);
  }
  for (std::size_t i = 0; i < term.arity(); ++i) {
    model.add_row(std::move(links[i]), RowSense::eq, 0.0, prefix + "_x" + std::to_string(i + 1));
  }
  model.add_row(std::move(wlink), RowSense::eq, 0.0, prefix + "_w");
  model.add_row(std::move(conv), RowSense::eq, 1.0, prefix + "_conv");
  return lambda;
}

}  // namespace detail

/// Four McCormick inequalities for a bilinear term; returns their row tags.
inline std::vector<std::string> build_mccormick(const MultilinearTerm& term, const Box& bounds, MilpModel& model) {
  if (term.arity() != 2 || bounds.size() != 2) throw DomainError("McCormick envelope needs a bilinear term");
  detail::require_finite(bounds);
  const auto x1 = term.variables[0], x2 = term.variables[1], w = term.output;
  const double l1 = bounds.dims[0].lo, u1 = bounds.dims[0].hi;
  const double l2 = bounds.dims[1].lo, u2 = bounds.dims[1].hi;
  const std::string p = "mc_" + model.variable(w).name;
  std::vector<std::string> tags{p + "_uu", p + "_ll", p + "_lu", p + "_ul"};
  // w - a x1 - b x2 (>= | <=) -a*b  for the four corner pairs.
  model.add_row(LinearExpr{{w, 1}, {x1, -u2}, {x2, -u1}}, RowSense::ge, -u1 * u2, tags[0]);
  model.add_row(LinearExpr{{w, 1}, {x1, -l2}, {x2, -l1}}, RowSense::ge, -l1 * l2, tags[1]);
  model.add_row(LinearExpr{{w, 1}, {x1, -u2}, {x2, -l1}}, RowSense::le, -l1 * u2, tags[2]);
  model.add_row(LinearExpr{{w, 1}, {x1, -l2}, {x2, -u1}}, RowSense::le, -u1 * l2, tags[3]);
  return tags;
}

inline constexpr std::size_t kDefaultHullArityCap = 12;

/// Convex combination of the 2^n box corners.
inline std::vector<VarRef> build_convex_hull(const MultilinearTerm& term, const Box& bounds, MilpModel& model,
                                             std::size_t arity_cap = kDefaultHullArityCap) {
  if (term.arity() > arity_cap) {
    throw DomainError("convex hull over " + std::to_string(term.arity()) + " variables exceeds the cap of " +
                      std::to_string(arity_cap));
  }
  if (bounds.size() != term.arity()) throw DomainError("box does not match term arity");
  detail::require_finite(bounds);
  return detail::add_lambda_block(term, uniform_discretization(bounds, 1), model,
                                  "hull_" + model.variable(term.output).name);
}

/// SOS-2 lambda formulation over the full grid of `d`.
///
/// For every axis i and breakpoint j, the lambda mass on grid points whose i-th coordinate is
/// the j-th breakpoint is bounded by the indicators of the (at most two) adjacent intervals.
inline PprArtifacts build_ppr(const MultilinearTerm& term, const Discretization& d, MilpModel& model,
                              PartitionIndicators& indicators) {
  if (d.dimension() != term.arity()) throw DomainError("discretization does not match term arity");
  for (std::size_t i = 0; i < d.dimension(); ++i) {
    if (is_infinite(d.axis(i).range().lo) || is_infinite(d.axis(i).range().hi)) {
      throw DomainError("relaxation needs finite bounds");
    }
  }
  const std::string name = model.variable(term.output).name;
  PprArtifacts art{{}, {}, term, d};
  for (std::size_t i = 0; i < term.arity(); ++i) {
    art.y_refs.push_back(indicators.ensure(model, term.variables[i], d.axis(i)));
  }
  art.lambda_refs = detail::add_lambda_block(term, d, model, "lam_" + name);

  const auto& grid = d.grid();
  for (std::size_t i = 0; i < term.arity(); ++i) {
    const std::size_t n = d.axis(i).size();
    std::vector<LinearExpr> rows(n);
    for (std::size_t s = 0; s < grid.size(); ++s) rows[grid.coordinate(s, i)].add(art.lambda_refs[s], 1.0);
    for (std::size_t j = 0; j < n; ++j) {
      if (j > 0) rows[j].add(art.y_refs[i][j - 1], -1.0);
      if (j + 1 < n) rows[j].add(art.y_refs[i][j], -1.0);
      model.add_row(std::move(rows[j]), RowSense::le, 0.0,
                    "sos_" + name + "_" + std::to_string(i + 1) + "_" + std::to_string(j + 1));
    }
  }
  return art;
}

inline PprArtifacts build_ppr(const MultilinearTerm& term, const Discretization& d, MilpModel& model) {
  PartitionIndicators local;
  return build_ppr(term, d, model, local);
}

/// Recursive bilinear PPRs following `tree`; leaf positions index `term.variables` and `d`.
///
/// Auxiliary outputs are bounded by interval arithmetic and carry a single partition.
inline RpprArtifacts build_rppr(const MultilinearTerm& term, const GroupingTree& tree, const Discretization& d,
                                MilpModel& model, PartitionIndicators& indicators) {
  auto leaves = tree.leaves();
  std::sort(leaves.begin(), leaves.end());
  if (leaves.size() != term.arity() || d.dimension() != term.arity()) {
    throw DomainError("grouping tree does not match the term");
  }
  for (std::size_t i = 0; i < leaves.size(); ++i) {
    if (leaves[i] != static_cast<int>(i)) throw DomainError("grouping tree does not match the term");
  }
  RpprArtifacts out{tree, {}, {}, {}};
  const std::string name = model.variable(term.output).name;
  const std::size_t pairs = tree.num_pairs();
  out.aux.resize(pairs);
  out.aux_bounds.resize(pairs);

  auto child_ref = [&](int node) -> VarRef {
    const auto& n = tree.node(node);
    return n.is_leaf() ? term.variables[static_cast<std::size_t>(n.leaf)] : out.aux[static_cast<std::size_t>(n.aux)];
  };
  auto child_axis = [&](int node) -> Breakpoints {
    const auto& n = tree.node(node);
    if (n.is_leaf()) return d.axis(static_cast<std::size_t>(n.leaf));
    const auto& iv = out.aux_bounds[static_cast<std::size_t>(n.aux)];
    return Breakpoints({iv.lo, iv.hi});
  };

  for (std::size_t a = 0; a < pairs; ++a) {
    const auto& node = tree.node(tree.pairs()[a]);
    const Breakpoints bl = child_axis(node.left), br = child_axis(node.right);
    out.aux_bounds[a] = interval_product(bl.range(), br.range());
    if (tree.pairs()[a] == tree.root()) {
      out.aux[a] = term.output;
    } else {
      out.aux[a] = model.add_variable(name + "_aux" + std::to_string(a + 1), out.aux_bounds[a].lo, out.aux_bounds[a].hi);
    }
    MultilinearTerm bilinear({child_ref(node.left), child_ref(node.right)}, out.aux[a]);
    out.nodes.push_back(build_ppr(bilinear, Discretization({bl, br}), model, indicators));
  }
  return out;
}

inline RpprArtifacts build_rppr(const MultilinearTerm& term, const GroupingTree& tree, const Discretization& d,
                                MilpModel& model) {
  PartitionIndicators local;
  return build_rppr(term, tree, d, model, local);
}

/// Reads the active interval of each term variable from the indicator values.
inline ActivePartition extract_active_partition(const PprArtifacts& art, const SolutionVector& sol) {
  if (!sol.has_point()) throw DomainError("solution carries no point");
  ActivePartition out{{}, Box{}};
  for (std::size_t i = 0; i < art.y_refs.size(); ++i) {
    std::size_t pick = art.y_refs[i].size();
    for (std::size_t k = 0; k < art.y_refs[i].size(); ++k) {
      if (sol[art.y_refs[i][k]] >= 0.5) {
        if (pick != art.y_refs[i].size()) throw DomainError("two active intervals for one variable");
        pick = k;
      }
    }
    if (pick == art.y_refs[i].size()) throw DomainError("no active interval for a variable");
    out.intervals.push_back(pick);
    out.box.dims.push_back(art.discretization.axis(i).interval(pick));
  }
  return out;
}

}  // namespace multirelax
