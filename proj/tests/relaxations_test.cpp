/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 The multirelax Authors
 * SPDX-License-Identifier: Apache-2.0
 */
#include <random>
#include <string>
#include <vector>

#include "gtest/gtest.h"
#include "multirelax/branch_and_bound.hpp"
#include "multirelax/lp_format.hpp"
#include "multirelax/relaxations.hpp"
#include "multirelax/simplex.hpp"
#include "oracles.hpp"

namespace multirelax {
namespace {

using testing::close_rel;
using testing::grid_oracle;
using testing::random_box;
using testing::random_costs;
using testing::set_costs;
using testing::term_fixture;

LinearExpr row_expr(const MilpModel& m, const std::string& tag) { return m.row(tag).expr; }

TEST(McCormickTest, UnitSquareRows) {
  auto f = term_fixture(Box({{0, 1}, {0, 1}}));
  auto tags = build_mccormick(f.term, f.box, f.model);
  ASSERT_EQ(tags.size(), 4u);
  ASSERT_EQ(f.model.num_rows(), 4u);
  const VarRef x1{0}, x2{1}, w{2};
  // w >= x1 + x2 - 1, w >= 0, w <= x1, w <= x2
  EXPECT_EQ(row_expr(f.model, tags[0]), (LinearExpr{{w, 1}, {x1, -1}, {x2, -1}}));
  EXPECT_EQ(f.model.row(tags[0]).rhs, -1.0);
  EXPECT_EQ(row_expr(f.model, tags[1]), (LinearExpr{{w, 1}}));
  EXPECT_EQ(f.model.row(tags[1]).sense, RowSense::ge);
  EXPECT_EQ(row_expr(f.model, tags[2]), (LinearExpr{{w, 1}, {x1, -1}}));
  EXPECT_EQ(f.model.row(tags[2]).sense, RowSense::le);
  EXPECT_EQ(row_expr(f.model, tags[3]), (LinearExpr{{w, 1}, {x2, -1}}));
}

TEST(McCormickTest, ShiftedBoxCoefficients) {
  auto f = term_fixture(Box({{1, 3}, {2, 4}}));
  auto tags = build_mccormick(f.term, f.box, f.model);
  const VarRef x1{0}, x2{1}, w{2};
  // w >= 4x1 + 3x2 - 12, w >= 2x1 + x2 - 2, w <= 4x1 + x2 - 4, w <= 2x1 + 3x2 - 6
  EXPECT_EQ(row_expr(f.model, tags[0]), (LinearExpr{{w, 1}, {x1, -4}, {x2, -3}}));
  EXPECT_EQ(f.model.row(tags[0]).rhs, -12.0);
  EXPECT_EQ(row_expr(f.model, tags[1]), (LinearExpr{{w, 1}, {x1, -2}, {x2, -1}}));
  EXPECT_EQ(f.model.row(tags[1]).rhs, -2.0);
  EXPECT_EQ(row_expr(f.model, tags[2]), (LinearExpr{{w, 1}, {x1, -4}, {x2, -1}}));
  EXPECT_EQ(f.model.row(tags[2]).rhs, -4.0);
  EXPECT_EQ(row_expr(f.model, tags[3]), (LinearExpr{{w, 1}, {x1, -2}, {x2, -3}}));
  EXPECT_EQ(f.model.row(tags[3]).rhs, -6.0);
}

TEST(McCormickTest, FixedFactorCollapsesToLine) {
  auto f = term_fixture(Box({{-1, 2}, {3, 3}}));
  build_mccormick(f.term, f.box, f.model);
  for (double x1 : {-1.0, 0.25, 2.0}) {
    auto m = f.model;
    m.set_bounds(VarRef{0}, x1, x1);
    for (auto sense : {ObjSense::minimize, ObjSense::maximize}) {
      m.set_objective(sense, LinearExpr{{VarRef{2}, 1}});
      auto sol = solve_lp(m);
      ASSERT_EQ(sol.status, SolveStatus::optimal);
      EXPECT_NEAR(sol.objective, 3 * x1, 1e-9);
    }
  }
}

TEST(McCormickTest, Errors) {
  auto f = term_fixture(Box({{0, 1}, {0, 1}, {0, 1}}));
  EXPECT_THROW(build_mccormick(f.term, f.box, f.model), DomainError);
  auto g = term_fixture(Box({{0, 1}, {0, 1}}));
  EXPECT_THROW(build_mccormick(g.term, Box({{0, kInfinity}, {0, 1}}), g.model), DomainError);
}

TEST(ConvexHullTest, UnitSquareCornerValues) {
  auto f = term_fixture(Box({{0, 1}, {0, 1}}));
  auto lam = build_convex_hull(f.term, f.box, f.model);
  ASSERT_EQ(lam.size(), 4u);
  const auto& wrow = f.model.row("hull_w_w").expr;
  const double expected[] = {0, 0, 0, -1};
  for (std::size_t s = 0; s < 4; ++s) EXPECT_EQ(wrow.coef(lam[s]), expected[s]);
}

TEST(ConvexHullTest, TrilinearMaximumAtTopCorner) {
  auto f = term_fixture(Box({{0, 1}, {0, 1}, {0, 1}}));
  EXPECT_EQ(build_convex_hull(f.term, f.box, f.model).size(), 8u);
  f.model.set_objective(ObjSense::maximize, LinearExpr{{f.term.output, 1}});
  auto sol = solve_lp(f.model);
  ASSERT_EQ(sol.status, SolveStatus::optimal);
  EXPECT_NEAR(sol.objective, 1.0, 1e-9);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(sol.values[static_cast<std::size_t>(i)], 1.0, 1e-9);
}

TEST(ConvexHullTest, BudgetRowGivesOneHalf) {
  auto f = term_fixture(Box({{0, 1}, {0, 1}}));
  build_convex_hull(f.term, f.box, f.model);
  f.model.add_row(LinearExpr{{VarRef{0}, 1}, {VarRef{1}, 1}}, RowSense::le, 1, "budget");
  f.model.set_objective(ObjSense::maximize, LinearExpr{{f.term.output, 1}});
  auto sol = solve_lp(f.model);
  ASSERT_EQ(sol.status, SolveStatus::optimal);
  EXPECT_NEAR(sol.objective, 0.5, 1e-9);
}

TEST(ConvexHullTest, ArityCap) {
  std::vector<Interval> dims(13, Interval{0, 1});
  auto f = term_fixture(Box(dims));
  EXPECT_THROW(build_convex_hull(f.term, f.box, f.model), DomainError);
  auto g = term_fixture(Box({{0, 1}, {0, 1}, {0, 1}}));
  EXPECT_THROW(build_convex_hull(g.term, g.box, g.model, 2), DomainError);
}

// McCormick and the corner hull agree for any linear objective on a bilinear box.
TEST(ConvexHullTest, MatchesMcCormickProperty) {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 100; ++trial) {
    const Box box = random_box(rng, 2);
    const auto c = random_costs(rng, 2);
    auto mc = term_fixture(box);
    auto hull = term_fixture(box);
    build_mccormick(mc.term, box, mc.model);
    build_convex_hull(hull.term, box, hull.model);
    set_costs(mc, c, ObjSense::minimize);
    set_costs(hull, c, ObjSense::minimize);
    auto a = solve_lp(mc.model), b = solve_lp(hull.model);
    ASSERT_EQ(a.status, SolveStatus::optimal);
    ASSERT_EQ(b.status, SolveStatus::optimal);
    EXPECT_TRUE(close_rel(a.objective, b.objective, 1e-6)) << a.objective << " vs " << b.objective;
  }
}

testing::TermFixture four_by_four() { return term_fixture(Box({{1, 4}, {1, 4}})); }

TEST(PprTest, SixteenPointGridCounts) {
  auto f = four_by_four();
  auto d = uniform_discretization(f.box, 3);
  auto art = build_ppr(f.term, d, f.model);
  EXPECT_EQ(art.lambda_refs.size(), 16u);
  ASSERT_EQ(art.y_refs.size(), 2u);
  EXPECT_EQ(art.y_refs[0].size() + art.y_refs[1].size(), 6u);
  EXPECT_EQ(f.model.num_binaries(), 6u);
  // 2 x-links + w-link + convexity + 2 choose-one + 8 adjacency rows.
  EXPECT_EQ(f.model.num_rows(), 14u);
  EXPECT_EQ(f.model.num_variables(), 3u + 16u + 6u);
}

// Adjacency rows for the 4x4 grid, written out by hand with 1-based lambda labels.
TEST(PprTest, SixteenPointAdjacencyRows) {
  auto f = four_by_four();
  auto art = build_ppr(f.term, uniform_discretization(f.box, 3), f.model);
  auto lam = [&](int label) { return art.lambda_refs[static_cast<std::size_t>(label - 1)]; };
  auto y = [&](int var, int k) { return art.y_refs[static_cast<std::size_t>(var - 1)][static_cast<std::size_t>(k - 1)]; };
  struct Expected {
    std::string tag;
    std::vector<int> lambdas;
    std::vector<std::pair<int, int>> ys;
  };
  const std::vector<Expected> rows = {
      {"sos_w_1_1", {1, 5, 9, 13}, {{1, 1}}},
      {"sos_w_1_2", {2, 6, 10, 14}, {{1, 1}, {1, 2}}},
      {"sos_w_1_3", {3, 7, 11, 15}, {{1, 2}, {1, 3}}},
      {"sos_w_1_4", {4, 8, 12, 16}, {{1, 3}}},
      {"sos_w_2_1", {1, 2, 3, 4}, {{2, 1}}},
      {"sos_w_2_2", {5, 6, 7, 8}, {{2, 1}, {2, 2}}},
      {"sos_w_2_3", {9, 10, 11, 12}, {{2, 2}, {2, 3}}},
      {"sos_w_2_4", {13, 14, 15, 16}, {{2, 3}}},
  };
  for (const auto& e : rows) {
    LinearExpr want;
    for (int l : e.lambdas) want.add(lam(l), 1.0);
    for (auto [v, k] : e.ys) want.add(y(v, k), -1.0);
    ASSERT_TRUE(f.model.has_row(e.tag)) << e.tag;
    EXPECT_EQ(f.model.row(e.tag).expr, want) << e.tag;
    EXPECT_EQ(f.model.row(e.tag).sense, RowSense::le);
    EXPECT_EQ(f.model.row(e.tag).rhs, 0.0);
  }
}

TEST(PprTest, LpExportMentionsEveryColumn) {
  auto f = four_by_four();
  build_ppr(f.term, uniform_discretization(f.box, 3), f.model);
  const auto text = write_lp_file(f.model);
  EXPECT_NE(text.find(" sos_w_1_2: - 1 y_x1_1 - 1 y_x1_2 + 1 lam_w_2 + 1 lam_w_6 + 1 lam_w_10 + 1 lam_w_14 <= 0\n"),
            std::string::npos)
      << text;
  EXPECT_NE(text.find("Binaries\n y_x1_1\n"), std::string::npos);
  EXPECT_TRUE(read_lp_file(text) == f.model);
}

TEST(PprTest, FourFactorCounts) {
  auto f = term_fixture(Box({{0, 1}, {0, 1}, {0, 1}, {0, 1}}));
  auto art = build_ppr(f.term, uniform_discretization(f.box, 2), f.model);
  EXPECT_EQ(art.lambda_refs.size(), 81u);
  EXPECT_EQ(f.model.num_binaries(), 8u);
}

TEST(PprTest, ArityMismatchIsAnError) {
  auto f = four_by_four();
  EXPECT_THROW(build_ppr(f.term, uniform_discretization(Box({{0, 1}, {0, 1}, {0, 1}}), 1), f.model), DomainError);
}

TEST(PprTest, SharedIndicatorsAcrossTerms) {
  MilpModel m;
  auto a = m.add_variable("a", 0, 1), b = m.add_variable("b", 0, 1), c = m.add_variable("c", 0, 1);
  auto w1 = m.add_variable("w1", -kInfinity, kInfinity), w2 = m.add_variable("w2", -kInfinity, kInfinity);
  PartitionIndicators ind;
  const auto bp = uniform_breakpoints({0, 1}, 2);
  auto t1 = build_ppr(MultilinearTerm({a, b}, w1), Discretization({bp, bp}), m, ind);
  auto t2 = build_ppr(MultilinearTerm({b, c}, w2), Discretization({bp, bp}), m, ind);
  EXPECT_EQ(t1.y_refs[1], t2.y_refs[0]);
  EXPECT_EQ(m.num_binaries(), 6u);
  const auto other = uniform_breakpoints({0, 1}, 3);
  auto w3 = m.add_variable("w3", -kInfinity, kInfinity);
  EXPECT_THROW(build_ppr(MultilinearTerm({a, c}, w3), Discretization({other, bp}), m, ind), DomainError);
}

// A single partition leaves the LP equal to the corner hull for every objective.
TEST(PprTest, SinglePartitionMatchesHullProperty) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 2 + static_cast<std::size_t>(trial % 3);
    const Box box = random_box(rng, n);
    const auto c = random_costs(rng, n);
    auto ppr = term_fixture(box);
    auto hull = term_fixture(box);
    build_ppr(ppr.term, uniform_discretization(box, 1), ppr.model);
    build_convex_hull(hull.term, box, hull.model);
    set_costs(ppr, c, ObjSense::minimize);
    set_costs(hull, c, ObjSense::minimize);
    auto [mip, stats] = solve_milp(ppr.model);
    auto lp = solve_lp(hull.model);
    ASSERT_EQ(mip.status, SolveStatus::optimal);
    ASSERT_EQ(lp.status, SolveStatus::optimal);
    EXPECT_TRUE(close_rel(mip.objective, lp.objective, 1e-6));
    EXPECT_EQ(stats.nodes, 1u);
  }
}

// The LP relaxation optimum is attained at a lifted grid point.
TEST(PprTest, SharpnessAgainstGridEnumeration) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 2 + static_cast<std::size_t>(trial % 2);
    const int p = 1 + trial % 3;
    const Box box = random_box(rng, n);
    const auto c = random_costs(rng, n);
    auto f = term_fixture(box);
    const auto d = uniform_discretization(box, p);
    build_ppr(f.term, d, f.model);
    set_costs(f, c, ObjSense::minimize);
    auto lp = solve_lp(f.model);
    ASSERT_EQ(lp.status, SolveStatus::optimal);
    const double oracle = grid_oracle(d, c, ObjSense::minimize);
    EXPECT_TRUE(close_rel(lp.objective, oracle, 1e-6)) << lp.objective << " vs " << oracle;
  }
}

// Every integer-feasible point keeps its lambda mass on the active interval's two breakpoints.
TEST(PprTest, AdjacencyInvariantInMilpSolutions) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 30; ++trial) {
    const Box box = random_box(rng, 2);
    auto f = term_fixture(box);
    const auto d = uniform_discretization(box, 3);
    auto art = build_ppr(f.term, d, f.model);
    set_costs(f, random_costs(rng, 2), ObjSense::maximize);
    auto [sol, stats] = solve_milp(f.model);
    ASSERT_EQ(sol.status, SolveStatus::optimal);
    const auto active = extract_active_partition(art, sol);
    double total = 0.0;
    for (std::size_t s = 0; s < art.lambda_refs.size(); ++s) {
      const double l = sol[art.lambda_refs[s]];
      EXPECT_GE(l, -1e-9);
      total += l;
      if (l <= 1e-9) continue;
      for (std::size_t i = 0; i < 2; ++i) {
        const std::size_t k = d.grid().coordinate(s, i);
        EXPECT_TRUE(k == active.intervals[i] || k == active.intervals[i] + 1);
      }
    }
    EXPECT_NEAR(total, 1.0, 1e-9);
  }
}

// Refining the breakpoints never weakens the bound.
TEST(PprTest, RefinementMonotoneProperty) {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 25; ++trial) {
    const Box box = random_box(rng, 2);
    const auto c = random_costs(rng, 2);
    double previous = -std::numeric_limits<double>::infinity();
    for (int p : {1, 2, 4}) {
      auto f = term_fixture(box);
      build_ppr(f.term, uniform_discretization(box, p), f.model);
      f.model.add_row(LinearExpr{{f.term.variables[0], 1}, {f.term.variables[1], 1}}, RowSense::le,
                      box[0].lo + box[1].lo + 0.7 * (box[0].width() + box[1].width()), "side");
      set_costs(f, c, ObjSense::minimize);
      auto [sol, stats] = solve_milp(f.model);
      ASSERT_EQ(sol.status, SolveStatus::optimal);
      EXPECT_GE(sol.objective, previous - 1e-6 * std::max(1.0, std::abs(previous)));
      previous = sol.objective;
    }
  }
}

// Maximizing w with x1 + x2 pinned equals the best of the nine per-box hull optima.
TEST(PprTest, MilpMatchesPerPartitionEnumeration) {
  auto f = four_by_four();
  const auto d = uniform_discretization(f.box, 3);
  build_ppr(f.term, d, f.model);
  f.model.add_row(LinearExpr{{VarRef{0}, 1}, {VarRef{1}, 1}}, RowSense::eq, 4.0, "pin");
  f.model.set_objective(ObjSense::maximize, LinearExpr{{f.term.output, 1}});
  auto [sol, stats] = solve_milp(f.model);
  ASSERT_EQ(sol.status, SolveStatus::optimal);

  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      const Box cell({d.axis(0).interval(i), d.axis(1).interval(j)});
      auto g = term_fixture(cell);
      build_convex_hull(g.term, cell, g.model);
      g.model.add_row(LinearExpr{{VarRef{0}, 1}, {VarRef{1}, 1}}, RowSense::eq, 4.0, "pin");
      g.model.set_objective(ObjSense::maximize, LinearExpr{{g.term.output, 1}});
      auto lp = solve_lp(g.model);
      if (lp.status == SolveStatus::optimal) best = std::max(best, lp.objective);
    }
  }
  EXPECT_NEAR(sol.objective, best, 1e-9);
  EXPECT_NEAR(sol.objective, 4.0, 1e-9);  // x = (2, 2)
}

TEST(ExtractActivePartitionTest, ReadsIndicators) {
  auto f = four_by_four();
  auto art = build_ppr(f.term, uniform_discretization(f.box, 3), f.model);
  SolutionVector sol{std::vector<double>(f.model.num_variables(), 0.0), 0, SolveStatus::optimal, {}};
  sol.values[art.y_refs[0][1].id] = 1.0;
  sol.values[art.y_refs[1][2].id] = 1.0;
  auto active = extract_active_partition(art, sol);
  EXPECT_EQ(active.intervals, (std::vector<std::size_t>{1, 2}));
  EXPECT_EQ(active.box, Box({{2, 3}, {3, 4}}));
  // The point sits on a shared breakpoint; the indicators decide.
  sol.values[0] = 3.0;
  EXPECT_EQ(extract_active_partition(art, sol).box, Box({{2, 3}, {3, 4}}));
}

TEST(ExtractActivePartitionTest, SinglePartitionGivesWholeBox) {
  auto f = four_by_four();
  auto art = build_ppr(f.term, uniform_discretization(f.box, 1), f.model);
  f.model.set_objective(ObjSense::maximize, LinearExpr{{f.term.output, 1}});
  auto [sol, stats] = solve_milp(f.model);
  ASSERT_EQ(sol.status, SolveStatus::optimal);
  EXPECT_EQ(extract_active_partition(art, sol).box, f.box);
}

TEST(ExtractActivePartitionTest, Errors) {
  auto f = four_by_four();
  auto art = build_ppr(f.term, uniform_discretization(f.box, 3), f.model);
  SolutionVector sol{std::vector<double>(f.model.num_variables(), 0.0), 0, SolveStatus::optimal, {}};
  sol.values[art.y_refs[0][0].id] = 1.0;
  EXPECT_THROW(extract_active_partition(art, sol), DomainError);
  sol.values[art.y_refs[1][0].id] = 1.0;
  sol.values[art.y_refs[1][1].id] = 0.6;
  EXPECT_THROW(extract_active_partition(art, sol), DomainError);
}

TEST(RpprTest, NodeGridSizes) {
  auto f = term_fixture(Box({{0, 1}, {0, 1}, {0, 1}}));
  const std::vector<std::string> abc = {"a", "b", "c"};
  auto art = build_rppr(f.term, parse_grouping("(a*b)*c", abc), uniform_discretization(f.box, 2), f.model);
  ASSERT_EQ(art.nodes.size(), 2u);
  EXPECT_EQ(art.nodes[0].lambda_refs.size(), 9u);
  EXPECT_EQ(art.nodes[1].lambda_refs.size(), 6u);
  EXPECT_EQ(art.aux.back(), f.term.output);
  EXPECT_EQ(art.aux_bounds[0], (Interval{0, 1}));
  EXPECT_EQ(f.model.variable(art.aux[0]).lb, 0.0);
  EXPECT_EQ(f.model.variable(art.aux[0]).ub, 1.0);
}

TEST(RpprTest, BilinearTreeMatchesPpr) {
  const Box box({{-1, 2}, {0.5, 3}});
  auto a = term_fixture(box), b = term_fixture(box);
  const auto d = uniform_discretization(box, 3);
  build_ppr(a.term, d, a.model);
  build_rppr(b.term, GroupingTree::left_deep(2), d, b.model);
  EXPECT_EQ(write_lp_file(a.model), write_lp_file(b.model));
}

TEST(RpprTest, TreeMismatchIsAnError) {
  auto f = term_fixture(Box({{0, 1}, {0, 1}, {0, 1}}));
  EXPECT_THROW(build_rppr(f.term, GroupingTree::left_deep(4), uniform_discretization(Box({{0, 1}, {0, 1}, {0, 1}, {0, 1}}), 1),
                          f.model),
               DomainError);
}

// Over unit boxes a single-partition recursive relaxation is already the hull.
TEST(RpprTest, UnitCubeLexicographicMatchesPpr) {
  std::mt19937_64 rng(31);
  const Box cube({{0, 1}, {0, 1}, {0, 1}});
  for (int trial = 0; trial < 20; ++trial) {
    const auto c = random_costs(rng, 3);
    auto a = term_fixture(cube), b = term_fixture(cube);
    build_ppr(a.term, uniform_discretization(cube, 1), a.model);
    build_rppr(b.term, GroupingTree::left_deep(3), uniform_discretization(cube, 1), b.model);
    set_costs(a, c, ObjSense::minimize);
    set_costs(b, c, ObjSense::minimize);
    auto x = solve_lp(a.model), y = solve_lp(b.model);
    ASSERT_EQ(x.status, SolveStatus::optimal);
    ASSERT_EQ(y.status, SolveStatus::optimal);
    EXPECT_TRUE(close_rel(x.objective, y.objective, 1e-6)) << x.objective << " vs " << y.objective;
  }
}

// Over asymmetric boxes the full-grid relaxation is never weaker than a recursive one.
TEST(RpprTest, PprDominatesOnAsymmetricBoxes) {
  std::mt19937_64 rng(37);
  std::uniform_real_distribution<double> lo(0.1, 0.2), hi(0.9, 1.0);
  const std::vector<std::string> abcd = {"a", "b", "c", "d"};
  for (int trial = 0; trial < 8; ++trial) {
    std::vector<Interval> dims;
    for (int i = 0; i < 4; ++i) dims.push_back({lo(rng), hi(rng)});
    const Box box(dims);
    const auto c = random_costs(rng, 4);
    const auto d = uniform_discretization(box, 2);
    auto a = term_fixture(box);
    build_ppr(a.term, d, a.model);
    set_costs(a, c, ObjSense::minimize);
    auto ppr = solve_milp(a.model).first;
    ASSERT_EQ(ppr.status, SolveStatus::optimal);
    for (const char* g : {"(a*(b*c))*d", "((a*b)*c)*d", "a*(b*(c*d))"}) {
      auto b = term_fixture(box);
      build_rppr(b.term, parse_grouping(g, abcd), d, b.model);
      set_costs(b, c, ObjSense::minimize);
      auto r = solve_milp(b.model).first;
      ASSERT_EQ(r.status, SolveStatus::optimal);
      EXPECT_GE(ppr.objective, r.objective - 1e-6 * std::max(1.0, std::abs(r.objective))) << g;
    }
  }
}

}  // namespace
}  // namespace multirelax
