/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 The multirelax Authors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <compare>
#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace multirelax {

/// Bounds at or beyond this magnitude are treated as infinite.
inline constexpr double kInfinity = 1e30;

inline bool is_infinite(double v) { return std::abs(v) >= kInfinity; }

class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Column handle. Ids are dense and follow creation order.
struct VarRef {
  std::size_t id = 0;
  friend auto operator<=>(const VarRef&, const VarRef&) = default;
};

enum class VarKind { continuous, binary };
enum class RowSense { le, eq, ge };
enum class ObjSense { minimize, maximize };

/// Sparse coefficient list kept sorted by column id with no duplicates and no zeros.
class LinearExpr {
 public:
  LinearExpr() = default;
  LinearExpr(std::initializer_list<std::pair<VarRef, double>> terms) {
    for (const auto& [v, c] : terms) add(v, c);
  }

  LinearExpr& add(VarRef v, double coef) {
    if (coef == 0.0) return *this;
    auto it = std::lower_bound(terms_.begin(), terms_.end(), v.id,
                               [](const auto& t, std::size_t id) { return t.first < id; });
    if (it != terms_.end() && it->first == v.id) {
      it->second += coef;
      if (it->second == 0.0) terms_.erase(it);
    } else {
      terms_.insert(it, {v.id, coef});
    }
    return *this;
  }

  [[nodiscard]] const std::vector<std::pair<std::size_t, double>>& terms() const { return terms_; }
  [[nodiscard]] bool empty() const { return terms_.empty(); }
  [[nodiscard]] std::size_t size() const { return terms_.size(); }

  [[nodiscard]] double coef(VarRef v) const {
    auto it = std::lower_bound(terms_.begin(), terms_.end(), v.id,
                               [](const auto& t, std::size_t id) { return t.first < id; });
    return (it != terms_.end() && it->first == v.id) ? it->second : 0.0;
  }

  [[nodiscard]] double evaluate(const std::vector<double>& x) const {
    double s = 0.0;
    for (const auto& [j, a] : terms_) s += a * x[j];
    return s;
  }

  friend bool operator==(const LinearExpr&, const LinearExpr&) = default;

 private:
  std::vector<std::pair<std::size_t, double>> terms_;
};

struct Variable {
  std::string name;
  double lb = 0.0;
  double ub = kInfinity;
  VarKind kind = VarKind::continuous;
  friend bool operator==(const Variable&, const Variable&) = default;
};

/// One linear constraint. The tag doubles as the row name in LP exports.
struct LinearRow {
  LinearExpr expr;
  RowSense sense = RowSense::le;
  double rhs = 0.0;
  std::string tag;
  friend bool operator==(const LinearRow&, const LinearRow&) = default;
};

struct Objective {
  ObjSense sense = ObjSense::minimize;
  LinearExpr expr;
  friend bool operator==(const Objective&, const Objective&) = default;
};

/// Names must match [A-Za-z_][A-Za-z0-9_]* so that they survive LP-file exchange.
inline bool is_valid_name(std::string_view name) {
  if (name.empty()) return false;
  auto alpha = [](char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; };
  auto digit = [](char c) { return c >= '0' && c <= '9'; };
  if (!alpha(name.front())) return false;
  for (char c : name) {
    if (!alpha(c) && !digit(c)) return false;
  }
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  return lower != "free" && lower != "inf" && lower != "infinity";
}

/// Solver-agnostic MILP: columns with bounds and integrality, tagged linear rows, and a
/// linear objective. Construction is append-only and deterministic.
class MilpModel {
 public:
  VarRef add_variable(std::string name, double lb, double ub, VarKind kind = VarKind::continuous) {
    if (!is_valid_name(name)) throw ModelError("invalid variable name '" + name + "'");
    if (index_.count(name)) throw ModelError("duplicate variable name '" + name + "'");
    if (std::isnan(lb) || std::isnan(ub)) throw ModelError("NaN bound on '" + name + "'");
    lb = std::max(lb, -kInfinity);
    ub = std::min(ub, kInfinity);
    if (lb > ub) throw ModelError("lower bound exceeds upper bound on '" + name + "'");
    if (kind == VarKind::binary && (lb < 0.0 || ub > 1.0)) {
      throw ModelError("binary '" + name + "' has bounds outside [0,1]");
    }
    VarRef ref{vars_.size()};
    index_.emplace(name, ref.id);
    vars_.push_back(Variable{std::move(name), lb, ub, kind});
    return ref;
  }

  void add_row(LinearExpr expr, RowSense sense, double rhs, std::string tag) {
    if (expr.empty()) throw ModelError("row '" + tag + "' has no coefficients");
    if (!is_valid_name(tag)) throw ModelError("invalid row tag '" + tag + "'");
    if (row_index_.count(tag)) throw ModelError("duplicate row tag '" + tag + "'");
    for (const auto& [j, a] : expr.terms()) {
      if (j >= vars_.size()) throw ModelError("row '" + tag + "' references an undeclared column");
      if (!std::isfinite(a)) throw ModelError("row '" + tag + "' has a non-finite coefficient");
    }
    if (!std::isfinite(rhs)) throw ModelError("row '" + tag + "' has a non-finite right-hand side");
    row_index_.emplace(tag, rows_.size());
    rows_.push_back(LinearRow{std::move(expr), sense, rhs, std::move(tag)});
  }

  void set_objective(ObjSense sense, LinearExpr expr) {
    for (const auto& [j, a] : expr.terms()) {
      if (j >= vars_.size()) throw ModelError("objective references an undeclared column");
    }
    objective_ = Objective{sense, std::move(expr)};
  }

  void set_bounds(VarRef v, double lb, double ub) {
    auto& var = vars_.at(v.id);
    if (lb > ub) throw ModelError("lower bound exceeds upper bound on '" + var.name + "'");
    if (var.kind == VarKind::binary && (lb < 0.0 || ub > 1.0)) {
      throw ModelError("binary '" + var.name + "' has bounds outside [0,1]");
    }
    var.lb = std::max(lb, -kInfinity);
    var.ub = std::min(ub, kInfinity);
  }

  [[nodiscard]] std::size_t num_variables() const { return vars_.size(); }
  [[nodiscard]] std::size_t num_rows() const { return rows_.size(); }
  [[nodiscard]] const std::vector<Variable>& variables() const { return vars_; }
  [[nodiscard]] const Variable& variable(VarRef v) const { return vars_.at(v.id); }
  [[nodiscard]] const std::vector<LinearRow>& rows() const { return rows_; }
  [[nodiscard]] const Objective& objective() const { return objective_; }

  [[nodiscard]] std::size_t num_binaries() const {
    return static_cast<std::size_t>(std::count_if(vars_.begin(), vars_.end(),
                                                  [](const Variable& v) { return v.kind == VarKind::binary; }));
  }

  [[nodiscard]] bool has_variable(std::string_view name) const { return index_.count(std::string(name)) != 0; }
  [[nodiscard]] VarRef find(std::string_view name) const {
    auto it = index_.find(std::string(name));
    if (it == index_.end()) throw ModelError("unknown variable '" + std::string(name) + "'");
    return VarRef{it->second};
  }
  [[nodiscard]] bool has_row(std::string_view tag) const { return row_index_.count(std::string(tag)) != 0; }
  [[nodiscard]] const LinearRow& row(std::string_view tag) const {
    auto it = row_index_.find(std::string(tag));
    if (it == row_index_.end()) throw ModelError("unknown row '" + std::string(tag) + "'");
    return rows_[it->second];
  }

  friend bool operator==(const MilpModel& a, const MilpModel& b) {
    return a.vars_ == b.vars_ && a.rows_ == b.rows_ && a.objective_ == b.objective_;
  }

 private:
  std::vector<Variable> vars_;
  std::vector<LinearRow> rows_;
  Objective objective_;
  std::unordered_map<std::string, std::size_t> index_;
  std::unordered_map<std::string, std::size_t> row_index_;
};

enum class SolveStatus { optimal, infeasible, unbounded, limit, numerical_error };

inline std::string_view to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::infeasible: return "infeasible";
    case SolveStatus::unbounded: return "unbounded";
    case SolveStatus::limit: return "limit";
    case SolveStatus::numerical_error: return "numerical_error";
  }
  return "unknown";
}

/// Point in column space plus solve outcome. Row duals are filled by the LP solver only,
/// signed so that objective = duals . rhs + sum_j d_j x_j with d = c - A^T duals.
struct SolutionVector {
  std::vector<double> values;
  double objective = 0.0;
  SolveStatus status = SolveStatus::infeasible;
  std::vector<double> row_duals;

  [[nodiscard]] double operator[](VarRef v) const { return values.at(v.id); }
  [[nodiscard]] bool has_point() const { return !values.empty(); }
};

struct Violation {
  std::string tag;  // row tag, or "bound:<column>" / "integrality:<column>"
  double magnitude = 0.0;
};

/// Lists every row, bound, and integrality requirement that `point` misses by more than
/// `tol`. Row violations are measured relative to max(1, |rhs|, max_j |a_j x_j|) so that
/// rows with very large coefficients are judged at the same precision as unit-scale rows.
inline std::vector<Violation> check_feasible(const MilpModel& model, const SolutionVector& point, double tol) {
  if (point.values.size() != model.num_variables()) {
    throw ModelError("point has " + std::to_string(point.values.size()) + " values, model has " +
                     std::to_string(model.num_variables()) + " columns");
  }
  std::vector<Violation> report;
  const auto& x = point.values;
  for (std::size_t j = 0; j < model.num_variables(); ++j) {
    const auto& v = model.variables()[j];
    const double scale = std::max(1.0, std::abs(x[j]));
    double excess = 0.0;
    if (!is_infinite(v.lb)) excess = std::max(excess, v.lb - x[j]);
    if (!is_infinite(v.ub)) excess = std::max(excess, x[j] - v.ub);
    if (excess / scale > tol) report.push_back({"bound:" + v.name, excess});
    if (v.kind == VarKind::binary) {
      const double frac = std::abs(x[j] - std::round(x[j]));
      if (frac > tol) report.push_back({"integrality:" + v.name, frac});
    }
  }
  for (const auto& row : model.rows()) {
    double activity = 0.0;
    double scale = std::max(1.0, std::abs(row.rhs));
    for (const auto& [j, a] : row.expr.terms()) {
      activity += a * x[j];
      scale = std::max(scale, std::abs(a * x[j]));
    }
    double excess = 0.0;
    switch (row.sense) {
      case RowSense::le: excess = activity - row.rhs; break;
      case RowSense::ge: excess = row.rhs - activity; break;
      case RowSense::eq: excess = std::abs(activity - row.rhs); break;
    }
    if (excess / scale > tol) report.push_back({row.tag, excess});
  }
  return report;
}

inline double objective_value(const MilpModel& model, const std::vector<double>& x) {
  return model.objective().expr.evaluate(x);
}

}  // namespace multirelax
