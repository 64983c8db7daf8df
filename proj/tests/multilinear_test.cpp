/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 The multirelax Authors
 * SPDX-License-Identifier: Apache-2.0
 */
#include <algorithm>
#include <numeric>
#include <random>
#include <set>

#include "gtest/gtest.h"
#include "multirelax/grouping.hpp"
#include "multirelax/multilinear.hpp"

namespace multirelax {
namespace {

using ::testing::Test;

Discretization four_by_four_grid() { return uniform_discretization(Box({{1, 4}, {1, 4}}), 3); }

TEST(UniformDiscretizationTest, Examples) {
  auto d = four_by_four_grid();
  EXPECT_EQ(d.axis(0).points(), (std::vector<double>{1, 2, 3, 4}));
  EXPECT_EQ(d.axis(1).points(), (std::vector<double>{1, 2, 3, 4}));
  EXPECT_EQ(uniform_breakpoints({0, 1}, 1).points(), (std::vector<double>{0, 1}));
  EXPECT_EQ(uniform_breakpoints({10, 100}, 2).points(), (std::vector<double>{10, 55, 100}));
}

TEST(UniformDiscretizationTest, Errors) {
  EXPECT_THROW(uniform_breakpoints({2, 2}, 3), DomainError);
  EXPECT_THROW(uniform_breakpoints({0, 1}, 0), DomainError);
  EXPECT_THROW(Breakpoints({1.0}), DomainError);
  EXPECT_THROW(Breakpoints({1.0, 1.0}), DomainError);
  EXPECT_THROW(Box({{2, 1}}), DomainError);
}

TEST(EnumerateVerticesTest, UnitSquareOrderIsFirstIndexFastest) {
  auto d = uniform_discretization(Box({{0, 1}, {0, 1}}), 1);
  auto v = enumerate_vertices(d);
  EXPECT_EQ(v, (std::vector<std::vector<double>>{{0, 0}, {1, 0}, {0, 1}, {1, 1}}));
}

TEST(EnumerateVerticesTest, SixteenPointLabels) {
  auto d = four_by_four_grid();
  auto v = enumerate_vertices(d);
  ASSERT_EQ(v.size(), 16u);
  // x̂5 = (s_{1,1}, s_{2,2}); labels are 1-based.
  EXPECT_EQ(v[4], (std::vector<double>{1, 2}));
  EXPECT_EQ(v[1], (std::vector<double>{2, 1}));
  EXPECT_EQ(v[15], (std::vector<double>{4, 4}));
}

TEST(EnumerateVerticesTest, ThreeByThreeByThree) {
  Box b({{0, 1}, {0, 1}, {0, 1}});
  EXPECT_EQ(enumerate_vertices(uniform_discretization(b, 2)).size(), 27u);
}

TEST(VertexGridTest, EncodeDecodeIsABijection) {
  VertexGrid g({3, 4, 2, 5});
  ASSERT_EQ(g.size(), 120u);
  std::set<std::vector<std::size_t>> seen;
  for (std::size_t s = 0; s < g.size(); ++s) {
    auto idx = g.decode(s);
    EXPECT_EQ(g.encode(idx), s);
    seen.insert(idx);
  }
  EXPECT_EQ(seen.size(), g.size());
}

std::vector<std::size_t> one_based(std::vector<std::size_t> v) {
  for (auto& s : v) ++s;
  return v;
}

TEST(MuTest, FourByFourSets) {
  auto d = four_by_four_grid();
  EXPECT_EQ(one_based(mu(d, 0, 1.0)), (std::vector<std::size_t>{1, 5, 9, 13}));
  EXPECT_EQ(one_based(mu(d, 1, 1.0)), (std::vector<std::size_t>{1, 2, 3, 4}));
  EXPECT_EQ(one_based(mu(d, 0, 2.0)), (std::vector<std::size_t>{2, 6, 10, 14}));
}

TEST(MuTest, UnitSquare) {
  auto d = uniform_discretization(Box({{0, 1}, {0, 1}}), 1);
  auto s = mu(d, 0, 1.0);
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(d.vertex(s[0]), (std::vector<double>{1, 0}));
  EXPECT_EQ(d.vertex(s[1]), (std::vector<double>{1, 1}));
}

TEST(MuTest, NonBreakpointIsAnError) {
  auto d = four_by_four_grid();
  EXPECT_THROW(mu(d, 0, 2.5), DomainError);
  EXPECT_THROW(mu(d, 2, 1.0), DomainError);
}

// For each axis the mu-sets over all breakpoints partition the grid.
TEST(MuTest, PartitionProperty) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> dim(2, 4), parts(1, 4);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Breakpoints> axes;
    const int n = dim(rng);
    for (int i = 0; i < n; ++i) axes.push_back(uniform_breakpoints({-1.0 * i, 2.0 + i}, parts(rng)));
    Discretization d(axes);
    for (std::size_t i = 0; i < d.dimension(); ++i) {
      std::vector<int> hits(d.grid().size(), 0);
      std::size_t expected = d.grid().size() / d.axis(i).size();
      for (double r : d.axis(i).points()) {
        auto s = mu(d, i, r);
        EXPECT_EQ(s.size(), expected);
        for (auto k : s) ++hits[k];
      }
      EXPECT_TRUE(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
    }
  }
}

TEST(IntervalProductTest, Examples) {
  EXPECT_EQ(interval_product({1, 3}, {2, 4}), (Interval{2, 12}));
  EXPECT_EQ(interval_product({-1, 1}, {-1, 1}), (Interval{-1, 1}));
  EXPECT_EQ(interval_product({-2, 1}, {3, 5}), (Interval{-10, 5}));
}

TEST(IntervalProductTest, InclusionMonotone) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-5, 5), grow(0, 2);
  for (int trial = 0; trial < 2000; ++trial) {
    double a0 = u(rng), a1 = u(rng), b0 = u(rng), b1 = u(rng);
    Interval a{std::min(a0, a1), std::max(a0, a1)};
    Interval b{std::min(b0, b1), std::max(b0, b1)};
    Interval a2{a.lo - grow(rng), a.hi + grow(rng)};
    Interval b2{b.lo - grow(rng), b.hi + grow(rng)};
    EXPECT_TRUE(interval_product(a2, b2).contains(interval_product(a, b)));
  }
}

TEST(PhiTest, Examples) {
  const double a[] = {2, 3};
  EXPECT_EQ(phi(a), 6.0);
  const double corner[] = {100, 1000, 1000, 10};
  EXPECT_EQ(phi(corner), 1e9);
  const double z[] = {5, 0, 7};
  EXPECT_EQ(phi(z), 0.0);
}

TEST(MultilinearTermTest, Invariants) {
  EXPECT_THROW(MultilinearTerm({VarRef{0}}, VarRef{1}), DomainError);
  EXPECT_THROW(MultilinearTerm({VarRef{0}, VarRef{0}}, VarRef{1}), DomainError);
  EXPECT_THROW(MultilinearTerm({VarRef{0}, VarRef{1}}, VarRef{1}), DomainError);
  MultilinearTerm t({VarRef{0}, VarRef{1}}, VarRef{2});
  const double p[] = {1, 2, 3};
  EXPECT_THROW(phi(p, t), DomainError);
}

const std::vector<std::string> kAbcd = {"a", "b", "c", "d"};

TEST(ParseGroupingTest, LeftDeep) {
  auto t = parse_grouping("((a*b)*c)*d", kAbcd);
  EXPECT_EQ(t, GroupingTree::left_deep(4));
  EXPECT_EQ(t.num_pairs(), 3u);
  const auto& root = t.node(t.root());
  EXPECT_EQ(root.aux, 2);
  EXPECT_EQ(t.node(root.right).leaf, 3);
}

TEST(ParseGroupingTest, InnerPair) {
  auto t = parse_grouping("(a*(b*c))*d", kAbcd);
  auto expected = GroupingTree::pair(
      GroupingTree::pair(GroupingTree::leaf(0), GroupingTree::pair(GroupingTree::leaf(1), GroupingTree::leaf(2))),
      GroupingTree::leaf(3));
  EXPECT_EQ(t, expected);
  EXPECT_EQ(t.leaves(), (std::vector<int>{0, 1, 2, 3}));
}

TEST(ParseGroupingTest, SinglePairWithOrWithoutOuterParens) {
  const std::vector<std::string> ab = {"a", "b"};
  EXPECT_EQ(parse_grouping("a*b", ab), GroupingTree::left_deep(2));
  EXPECT_EQ(parse_grouping("(a * b)", ab), GroupingTree::left_deep(2));
}

TEST(ParseGroupingTest, Errors) {
  EXPECT_THROW(parse_grouping("((a*b)*c*d", kAbcd), GroupingParseError);
  EXPECT_THROW(parse_grouping("((a*b)*c)*e", kAbcd), GroupingParseError);
  EXPECT_THROW(parse_grouping("(a*b)*c", kAbcd), GroupingParseError);
  EXPECT_THROW(parse_grouping("((a*b)*c)*a", kAbcd), GroupingParseError);
  EXPECT_THROW(parse_grouping("a*b*c*d", kAbcd), GroupingParseError);
  EXPECT_THROW(parse_grouping("((a*b)*c)*d)", kAbcd), GroupingParseError);
  EXPECT_THROW(parse_grouping("a", {"a"}), GroupingParseError);
}

GroupingTree random_tree(std::vector<int> leaves, std::mt19937_64& rng) {
  if (leaves.size() == 1) return GroupingTree::leaf(leaves[0]);
  std::uniform_int_distribution<std::size_t> cut(1, leaves.size() - 1);
  const std::size_t k = cut(rng);
  std::vector<int> l(leaves.begin(), leaves.begin() + static_cast<long>(k));
  std::vector<int> r(leaves.begin() + static_cast<long>(k), leaves.end());
  return GroupingTree::pair(random_tree(l, rng), random_tree(r, rng));
}

TEST(ParseGroupingTest, FormatRoundTripProperty) {
  std::mt19937_64 rng(3);
  std::vector<std::string> names;
  for (int i = 0; i < 9; ++i) names.push_back("v" + std::to_string(i));
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 2 + trial % 8;
    std::vector<int> leaves(static_cast<std::size_t>(n));
    std::iota(leaves.begin(), leaves.end(), 0);
    std::shuffle(leaves.begin(), leaves.end(), rng);
    auto t = random_tree(leaves, rng);
    std::vector<std::string> used(names.begin(), names.begin() + n);
    const auto text = format_grouping(t, used);
    EXPECT_EQ(parse_grouping(text, used), t) << text;
    // Aux ids follow post-order, so every pair's children carry smaller ids.
    for (int p : t.pairs()) {
      const auto& node = t.node(p);
      for (int c : {node.left, node.right}) {
        if (!t.node(c).is_leaf()) {
          EXPECT_LT(t.node(c).aux, node.aux);
        }
      }
    }
  }
}

}  // namespace
}  // namespace multirelax
