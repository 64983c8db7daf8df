/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 The multirelax Authors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <limits>
#include <memory>
#include <queue>
#include <utility>
#include <vector>

#include "multirelax/milp_model.hpp"
#include "multirelax/simplex.hpp"

namespace multirelax {

struct NodeRecord {
  std::size_t id = 0;
  std::size_t parent = 0;
  double parent_bound = 0.0;  // model objective units
  double bound = 0.0;
  SolveStatus lp_status = SolveStatus::optimal;
};

struct BnbStats {
  std::size_t nodes = 0;
  std::size_t lp_iterations = 0;
  double incumbent = std::numeric_limits<double>::quiet_NaN();
  double best_bound = std::numeric_limits<double>::quiet_NaN();
  double gap = std::numeric_limits<double>::infinity();
  double wall_seconds = 0.0;
  std::vector<NodeRecord> trace;
};

namespace detail {

struct BnbNode {
  std::size_t id = 0;
  std::size_t parent = 0;
  std::size_t depth = 0;
  double bound = 0.0;  // minimization form
  std::vector<std::pair<std::size_t, std::uint8_t>> fixings;
  std::shared_ptr<const Basis> basis;
};

struct NodeOrder {
  // priority_queue pops the "largest": lowest bound first, then deepest, then newest.
  bool operator()(const BnbNode& a, const BnbNode& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;
    if (a.depth != b.depth) return a.depth < b.depth;
    return a.id < b.id;
  }
};

}  // namespace detail

/// LP-based branch-and-bound over the binary columns. Best-bound node selection with ties
/// broken depth-first, most-fractional branching with ties broken by lowest column id.
/// The returned point comes from a final LP with every binary fixed at its rounded value.
inline std::pair<SolutionVector, BnbStats> solve_milp(const MilpModel& model, const SolveConfig& cfg = {}) {
  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();
  const double sense = model.objective().sense == ObjSense::maximize ? -1.0 : 1.0;

  BnbStats stats;
  SolutionVector result;
  LpEngine engine(model, cfg);

  std::vector<std::size_t> binaries;
  for (std::size_t j = 0; j < model.num_variables(); ++j) {
    if (model.variables()[j].kind == VarKind::binary) binaries.push_back(j);
  }
  std::vector<double> base_lb(binaries.size()), base_ub(binaries.size());
  for (std::size_t b = 0; b < binaries.size(); ++b) {
    base_lb[b] = model.variables()[binaries[b]].lb;
    base_ub[b] = model.variables()[binaries[b]].ub;
  }

  std::priority_queue<detail::BnbNode, std::vector<detail::BnbNode>, detail::NodeOrder> open;
  open.push(detail::BnbNode{0, 0, 0, -std::numeric_limits<double>::infinity(), {}, nullptr});
  std::size_t next_id = 1;

  double incumbent = std::numeric_limits<double>::infinity();  // minimization form
  std::vector<double> incumbent_x;
  bool unbounded = false;
  bool hit_limit = false;
  bool numerical_trouble = false;
  double limit_bound = std::numeric_limits<double>::infinity();

  auto gap_tol = [&](double inc) { return cfg.optimality_tol * std::max(1.0, std::abs(inc)); };
  auto elapsed = [&] { return std::chrono::duration<double>(clock::now() - t0).count(); };

  std::vector<std::uint8_t> applied(binaries.size(), 2);  // 2 = free
  while (!open.empty()) {
    if (std::isfinite(incumbent) && open.top().bound >= incumbent - gap_tol(incumbent)) break;
    if (stats.nodes >= cfg.node_limit || elapsed() > cfg.time_limit_seconds) {
      hit_limit = true;
      limit_bound = open.top().bound;
      break;
    }
    detail::BnbNode node = open.top();
    open.pop();
    ++stats.nodes;

    std::vector<std::uint8_t> want(binaries.size(), 2);
    for (const auto& [b, v] : node.fixings) want[b] = v;
    for (std::size_t b = 0; b < binaries.size(); ++b) {
      if (want[b] == applied[b]) continue;
      const std::size_t j = binaries[b];
      if (want[b] == 2) engine.set_bounds(j, base_lb[b], base_ub[b]);
      else engine.set_bounds(j, want[b], want[b]);
      applied[b] = want[b];
    }
    if (cfg.warm_start && node.basis) engine.load_basis(*node.basis);
    else if (!cfg.warm_start) engine.set_slack_basis();

    auto outcome = engine.solve();
    if (outcome == LpEngine::Outcome::numerical_error || outcome == LpEngine::Outcome::iteration_limit) {
      engine.set_slack_basis();
      outcome = engine.solve();
    }
    stats.lp_iterations += engine.iterations();

    double bound = std::numeric_limits<double>::infinity();
    if (outcome == LpEngine::Outcome::optimal) bound = sense * engine.objective();
    if (cfg.record_trace) {
      stats.trace.push_back(NodeRecord{node.id, node.parent, sense * node.bound, sense * bound, to_status(outcome)});
    }

    if (outcome == LpEngine::Outcome::infeasible) continue;
    if (outcome == LpEngine::Outcome::unbounded) {
      unbounded = true;
      break;
    }
    if (outcome != LpEngine::Outcome::optimal) {
      numerical_trouble = true;
      continue;
    }
    // A child can never beat its parent; clamp away round-off so the bound stays monotone.
    bound = std::max(bound, node.bound);
    if (std::isfinite(incumbent) && bound >= incumbent - gap_tol(incumbent)) continue;

    const auto x = engine.primal();
    std::size_t branch = binaries.size();
    double best_score = 1.0;
    for (std::size_t b = 0; b < binaries.size(); ++b) {
      const double v = x[binaries[b]];
      const double frac = v - std::floor(v);
      if (std::min(frac, 1.0 - frac) <= cfg.integrality_tol) continue;
      const double score = std::abs(frac - 0.5);
      if (score < best_score) {
        best_score = score;
        branch = b;
      }
    }
    if (branch == binaries.size()) {
      incumbent = bound;
      incumbent_x = x;
      continue;
    }

    auto basis = std::make_shared<const Basis>(engine.basis());
    for (std::uint8_t v : {std::uint8_t{0}, std::uint8_t{1}}) {
      detail::BnbNode child;
      child.id = next_id++;
      child.parent = node.id;
      child.depth = node.depth + 1;
      child.bound = bound;
      child.fixings = node.fixings;
      child.fixings.emplace_back(branch, v);
      child.basis = basis;
      open.push(std::move(child));
    }
  }

  stats.wall_seconds = elapsed();
  if (unbounded) {
    result.status = SolveStatus::unbounded;
    return {result, stats};
  }

  double best_bound = incumbent;
  if (hit_limit) best_bound = std::min(limit_bound, incumbent);
  else if (!open.empty()) best_bound = std::min(open.top().bound, incumbent);

  if (incumbent_x.empty()) {
    result.status = hit_limit ? SolveStatus::limit
                    : numerical_trouble ? SolveStatus::numerical_error
                                        : SolveStatus::infeasible;
    stats.best_bound = sense * best_bound;
    return {result, stats};
  }

  // Polish: fix binaries at their rounded values and re-solve the LP.
  for (std::size_t b = 0; b < binaries.size(); ++b) {
    const double r = std::round(incumbent_x[binaries[b]]);
    engine.set_bounds(binaries[b], r, r);
  }
  engine.set_slack_basis();
  std::vector<double> values = incumbent_x;
  if (engine.solve() == LpEngine::Outcome::optimal) {
    values = engine.primal();
  } else {
    for (std::size_t j : binaries) values[j] = std::round(values[j]);
  }

  result.values = std::move(values);
  result.objective = objective_value(model, result.values);
  result.status = hit_limit ? SolveStatus::limit : SolveStatus::optimal;
  stats.incumbent = result.objective;
  stats.best_bound = sense * best_bound;
  stats.gap = std::abs(incumbent - best_bound) / std::max(1.0, std::abs(incumbent));
  return {result, stats};
}

}  // namespace multirelax
