/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 The multirelax Authors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <cctype>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace multirelax {

class GroupingParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Binary tree describing the order in which a multilinear product is split into bilinear
/// products. Leaves hold term positions; every pair node owns one auxiliary id, assigned
/// in post-order so the root pair always has the largest id.
class GroupingTree {
 public:
  struct Node {
    int leaf = -1;  // term position for leaves, -1 for pairs
    int left = -1;
    int right = -1;
    int aux = -1;  // auxiliary id for pairs, -1 for leaves

    [[nodiscard]] bool is_leaf() const { return leaf >= 0; }
    friend bool operator==(const Node&, const Node&) = default;
  };

  GroupingTree() = default;

  static GroupingTree leaf(int position) {
    GroupingTree t;
    t.nodes_.push_back(Node{position, -1, -1, -1});
    t.root_ = 0;
    return t;
  }

  static GroupingTree pair(const GroupingTree& l, const GroupingTree& r) {
    GroupingTree t;
    const int lroot = t.graft(l);
    const int rroot = t.graft(r);
    t.nodes_.push_back(Node{-1, lroot, rroot, -1});
    t.root_ = static_cast<int>(t.nodes_.size()) - 1;
    t.renumber();
    return t;
  }

  /// ((x0*x1)*x2)*... over n positions.
  static GroupingTree left_deep(std::size_t n) {
    if (n < 2) throw GroupingParseError("a grouping needs at least two variables");
    GroupingTree t = leaf(0);
    for (std::size_t i = 1; i < n; ++i) t = pair(t, leaf(static_cast<int>(i)));
    return t;
  }

  [[nodiscard]] int root() const { return root_; }
  [[nodiscard]] const Node& node(int i) const { return nodes_.at(static_cast<std::size_t>(i)); }
  [[nodiscard]] const std::vector<Node>& nodes() const { return nodes_; }
  [[nodiscard]] std::size_t num_pairs() const { return pairs_.size(); }

  /// Pair nodes in post-order (children before parents); index k holds the node with aux id k.
  [[nodiscard]] const std::vector<int>& pairs() const { return pairs_; }

  [[nodiscard]] std::vector<int> leaves() const {
    std::vector<int> out;
    collect_leaves(root_, out);
    return out;
  }

  friend bool operator==(const GroupingTree& a, const GroupingTree& b) { return a.equal(a.root_, b, b.root_); }

 private:
  int graft(const GroupingTree& other) {
    const int offset = static_cast<int>(nodes_.size());
    for (auto n : other.nodes_) {
      if (!n.is_leaf()) {
        n.left += offset;
        n.right += offset;
      }
      nodes_.push_back(n);
    }
    return other.root_ + offset;
  }

  void renumber() {
    pairs_.clear();
    number(root_);
  }

  void number(int i) {
    auto& n = nodes_[static_cast<std::size_t>(i)];
    if (n.is_leaf()) return;
    number(n.left);
    number(n.right);
    nodes_[static_cast<std::size_t>(i)].aux = static_cast<int>(pairs_.size());
    pairs_.push_back(i);
  }

  void collect_leaves(int i, std::vector<int>& out) const {
    const auto& n = node(i);
    if (n.is_leaf()) {
      out.push_back(n.leaf);
      return;
    }
    collect_leaves(n.left, out);
    collect_leaves(n.right, out);
  }

  bool equal(int i, const GroupingTree& other, int j) const {
    if (i < 0 || j < 0) return i == j;
    const auto& a = node(i);
    const auto& b = other.node(j);
    if (a.is_leaf() || b.is_leaf()) return a.leaf == b.leaf;
    return equal(a.left, other, b.left) && equal(a.right, other, b.right);
  }

  std::vector<Node> nodes_;
  std::vector<int> pairs_;
  int root_ = -1;
};

namespace detail {

class GroupingParser {
 public:
  GroupingParser(std::string_view text, const std::vector<std::string>& names) : text_(text), names_(names) {}

  GroupingTree parse() {
    GroupingTree t = operand();
    skip_ws();
    if (peek() == '*') {
      ++pos_;
      GroupingTree rhs = operand();
      t = GroupingTree::pair(t, rhs);
    }
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    if (t.node(t.root()).is_leaf()) fail("a grouping must contain at least one product");
    auto leaves = t.leaves();
    std::vector<int> count(names_.size(), 0);
    for (int l : leaves) ++count[static_cast<std::size_t>(l)];
    for (std::size_t i = 0; i < names_.size(); ++i) {
      if (count[i] == 0) throw GroupingParseError("variable '" + names_[i] + "' missing from grouping");
      if (count[i] > 1) throw GroupingParseError("variable '" + names_[i] + "' appears more than once");
    }
    return t;
  }

 private:
  GroupingTree operand() {
    skip_ws();
    if (peek() == '(') {
      ++pos_;
      GroupingTree l = operand();
      skip_ws();
      if (peek() != '*') fail("expected '*'");
      ++pos_;
      GroupingTree r = operand();
      skip_ws();
      if (peek() != ')') fail("unbalanced parentheses");
      ++pos_;
      return GroupingTree::pair(l, r);
    }
    const std::size_t start = pos_;
    auto ident_start = [](char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; };
    auto ident_char = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; };
    if (pos_ >= text_.size() || !ident_start(text_[pos_])) fail("expected a variable or '('");
    while (pos_ < text_.size() && ident_char(text_[pos_])) ++pos_;
    const std::string name(text_.substr(start, pos_ - start));
    for (std::size_t i = 0; i < names_.size(); ++i) {
      if (names_[i] == name) return GroupingTree::leaf(static_cast<int>(i));
    }
    throw GroupingParseError("unknown variable '" + name + "' in grouping");
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  [[nodiscard]] char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }
  [[noreturn]] void fail(const std::string& what) const {
    throw GroupingParseError(what + " at offset " + std::to_string(pos_) + " in '" + std::string(text_) + "'");
  }

  std::string_view text_;
  const std::vector<std::string>& names_;
  std::size_t pos_ = 0;
};

inline void format_node(const GroupingTree& t, int i, const std::vector<std::string>& names, bool top,
                        std::string& out) {
  const auto& n = t.node(i);
  if (n.is_leaf()) {
    out += names.at(static_cast<std::size_t>(n.leaf));
    return;
  }
  if (!top) out += '(';
  format_node(t, n.left, names, false, out);
  out += '*';
  format_node(t, n.right, names, false, out);
  if (!top) out += ')';
}

}  // namespace detail

/// Parses `G := var | "(" G "*" G ")"`, optionally without the outermost parentheses.
/// Every name in `variables` must appear exactly once.
inline GroupingTree parse_grouping(std::string_view expr, const std::vector<std::string>& variables) {
  return detail::GroupingParser(expr, variables).parse();
}

/// Canonical printer; parse_grouping(format_grouping(t, v), v) == t.
inline std::string format_grouping(const GroupingTree& tree, const std::vector<std::string>& variables) {
  std::string out;
  detail::format_node(tree, tree.root(), variables, true, out);
  return out;
}

}  // namespace multirelax
