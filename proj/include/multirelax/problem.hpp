/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 The multirelax Authors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "multirelax/milp_model.hpp"
#include "multirelax/multilinear.hpp"

namespace multirelax {

class LoadError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct VariableSpec {
  std::string name;
  double lb = 0.0;
  double ub = 0.0;
  friend bool operator==(const VariableSpec&, const VariableSpec&) = default;
};

struct TermSpec {
  std::vector<std::string> variables;
  std::string output;
  friend bool operator==(const TermSpec&, const TermSpec&) = default;
};

struct ConstraintSpec {
  std::string name;
  std::vector<std::pair<std::string, double>> coefficients;
  RowSense sense = RowSense::le;
  double rhs = 0.0;
  friend bool operator==(const ConstraintSpec&, const ConstraintSpec&) = default;
};

struct ObjectiveSpec {
  ObjSense sense = ObjSense::maximize;
  std::vector<std::pair<std::string, double>> coefficients;
  friend bool operator==(const ObjectiveSpec&, const ObjectiveSpec&) = default;
};

/// A polynomial problem whose nonconvexities are lifted multilinear terms w = prod x.
///
/// Term outputs are columns of their own; an output not listed among `variables` is free.
struct ProblemSpec {
  std::vector<VariableSpec> variables;
  std::vector<TermSpec> terms;
  std::vector<ConstraintSpec> constraints;
  ObjectiveSpec objective;
  std::optional<double> opt;

  [[nodiscard]] std::size_t index_of(const std::string& name) const {
    for (std::size_t i = 0; i < variables.size(); ++i) {
      if (variables[i].name == name) return i;
    }
    return variables.size();
  }

  /// Throws LoadError naming the offending field.
  void validate() const {
    std::set<std::string> declared, outputs;
    for (std::size_t i = 0; i < variables.size(); ++i) {
      const auto& v = variables[i];
      const std::string at = "variables[" + std::to_string(i) + "]";
      if (!is_valid_name(v.name)) throw LoadError(at + ".name: invalid name '" + v.name + "'");
      if (!declared.insert(v.name).second) throw LoadError(at + ".name: duplicate '" + v.name + "'");
      if (!(v.lb <= v.ub)) throw LoadError(at + ": lb > ub");
    }
    if (terms.empty()) throw LoadError("terms: at least one multilinear term is required");
    for (std::size_t t = 0; t < terms.size(); ++t) {
      const auto& term = terms[t];
      const std::string at = "terms[" + std::to_string(t) + "]";
      if (term.variables.size() < 2) throw LoadError(at + ".variables: need at least two factors");
      std::set<std::string> seen;
      for (std::size_t k = 0; k < term.variables.size(); ++k) {
        const auto& name = term.variables[k];
        const std::string vat = at + ".variables[" + std::to_string(k) + "]";
        if (!declared.count(name)) throw LoadError(vat + ": undeclared variable '" + name + "'");
        if (!seen.insert(name).second) throw LoadError(vat + ": repeated factor '" + name + "'");
        const auto& v = variables[index_of(name)];
        if (!std::isfinite(v.lb) || !std::isfinite(v.ub) || is_infinite(v.lb) || is_infinite(v.ub)) {
          throw LoadError(vat + ": factor '" + name + "' needs finite bounds");
        }
        if (v.lb == v.ub) throw LoadError(vat + ": factor '" + name + "' has a degenerate domain");
      }
      if (!is_valid_name(term.output)) throw LoadError(at + ".output: invalid name '" + term.output + "'");
      if (seen.count(term.output)) throw LoadError(at + ".output: output is also a factor");
      if (!outputs.insert(term.output).second) throw LoadError(at + ".output: duplicate output '" + term.output + "'");
    }
    for (const auto& term : terms) {
      for (const auto& name : term.variables) {
        if (outputs.count(name)) throw LoadError("terms: output '" + name + "' may not appear as a factor");
      }
    }
    auto known = [&](const std::string& name) { return declared.count(name) || outputs.count(name); };
    std::set<std::string> row_names;
    for (std::size_t c = 0; c < constraints.size(); ++c) {
      const auto& row = constraints[c];
      const std::string at = "linear_constraints[" + std::to_string(c) + "]";
      if (!is_valid_name(row.name)) throw LoadError(at + ".name: invalid name '" + row.name + "'");
      if (!row_names.insert(row.name).second) throw LoadError(at + ".name: duplicate '" + row.name + "'");
      if (row.coefficients.empty()) throw LoadError(at + ".coefficients: empty");
      for (const auto& [name, coef] : row.coefficients) {
        if (!known(name)) throw LoadError(at + ".coefficients." + name + ": unknown variable");
        if (!std::isfinite(coef)) throw LoadError(at + ".coefficients." + name + ": not finite");
      }
      if (!std::isfinite(row.rhs)) throw LoadError(at + ".rhs: not finite");
    }
    for (const auto& [name, coef] : objective.coefficients) {
      if (!known(name)) throw LoadError("objective.coefficients." + name + ": unknown variable");
      if (!std::isfinite(coef)) throw LoadError("objective.coefficients." + name + ": not finite");
    }
    if (opt && !std::isfinite(*opt)) throw LoadError("opt: not finite");
  }

  friend bool operator==(const ProblemSpec&, const ProblemSpec&) = default;
};

namespace detail {

inline const nlohmann::json& field(const nlohmann::json& j, const char* key, const std::string& at) {
  if (!j.is_object() || !j.contains(key)) throw LoadError(at + "." + key + ": missing");
  return j.at(key);
}

inline double number(const nlohmann::json& j, const std::string& at) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf" || s == "+inf" || s == "infinity") return kInfinity;
    if (s == "-inf" || s == "-infinity") return -kInfinity;
  }
  throw LoadError(at + ": expected a number");
}

inline std::string text(const nlohmann::json& j, const std::string& at) {
  if (!j.is_string()) throw LoadError(at + ": expected a string");
  return j.get<std::string>();
}

inline std::vector<std::pair<std::string, double>> coefficient_map(const nlohmann::json& j, const std::string& at) {
  if (!j.is_object()) throw LoadError(at + ": expected an object of name: coefficient");
  std::vector<std::pair<std::string, double>> out;
  for (auto it = j.begin(); it != j.end(); ++it) out.emplace_back(it.key(), number(it.value(), at + "." + it.key()));
  return out;
}

inline nlohmann::json number_json(double v) {
  if (v >= kInfinity) return "inf";
  if (v <= -kInfinity) return "-inf";
  return v;
}

}  // namespace detail

inline ProblemSpec problem_from_json(const nlohmann::json& doc) {
  ProblemSpec spec;
  const std::string root = "$";
  const auto& vars = detail::field(doc, "variables", root);
  if (!vars.is_array()) throw LoadError("variables: expected an array");
  for (std::size_t i = 0; i < vars.size(); ++i) {
    const std::string at = "variables[" + std::to_string(i) + "]";
    spec.variables.push_back({detail::text(detail::field(vars[i], "name", at), at + ".name"),
                              detail::number(detail::field(vars[i], "lb", at), at + ".lb"),
                              detail::number(detail::field(vars[i], "ub", at), at + ".ub")});
  }
  const auto& terms = detail::field(doc, "terms", root);
  if (!terms.is_array()) throw LoadError("terms: expected an array");
  for (std::size_t t = 0; t < terms.size(); ++t) {
    const std::string at = "terms[" + std::to_string(t) + "]";
    const auto& names = detail::field(terms[t], "variables", at);
    if (!names.is_array()) throw LoadError(at + ".variables: expected an array");
    TermSpec term;
    for (std::size_t k = 0; k < names.size(); ++k) {
      term.variables.push_back(detail::text(names[k], at + ".variables[" + std::to_string(k) + "]"));
    }
    term.output = detail::text(detail::field(terms[t], "output", at), at + ".output");
    spec.terms.push_back(std::move(term));
  }
  if (doc.contains("linear_constraints")) {
    const auto& rows = doc.at("linear_constraints");
    if (!rows.is_array()) throw LoadError("linear_constraints: expected an array");
    for (std::size_t c = 0; c < rows.size(); ++c) {
      const std::string at = "linear_constraints[" + std::to_string(c) + "]";
      ConstraintSpec row;
      row.name = rows[c].contains("name") ? detail::text(rows[c].at("name"), at + ".name") : "c" + std::to_string(c + 1);
      row.coefficients = detail::coefficient_map(detail::field(rows[c], "coefficients", at), at + ".coefficients");
      const auto sense = detail::text(detail::field(rows[c], "sense", at), at + ".sense");
      if (sense == "<=" || sense == "le") row.sense = RowSense::le;
      else if (sense == ">=" || sense == "ge") row.sense = RowSense::ge;
      else if (sense == "=" || sense == "==" || sense == "eq") row.sense = RowSense::eq;
      else throw LoadError(at + ".sense: expected <=, >=, or =");
      row.rhs = detail::number(detail::field(rows[c], "rhs", at), at + ".rhs");
      spec.constraints.push_back(std::move(row));
    }
  }
  const auto& obj = detail::field(doc, "objective", root);
  const auto sense = detail::text(detail::field(obj, "sense", "objective"), "objective.sense");
  if (sense == "max" || sense == "maximize") spec.objective.sense = ObjSense::maximize;
  else if (sense == "min" || sense == "minimize") spec.objective.sense = ObjSense::minimize;
  else throw LoadError("objective.sense: expected max or min");
  spec.objective.coefficients =
      detail::coefficient_map(detail::field(obj, "coefficients", "objective"), "objective.coefficients");
  if (doc.contains("opt") && !doc.at("opt").is_null()) spec.opt = detail::number(doc.at("opt"), "opt");
  spec.validate();
  return spec;
}

inline nlohmann::json problem_to_json(const ProblemSpec& spec) {
  nlohmann::ordered_json doc;
  doc["variables"] = nlohmann::ordered_json::array();
  for (const auto& v : spec.variables) {
    doc["variables"].push_back({{"name", v.name}, {"lb", detail::number_json(v.lb)}, {"ub", detail::number_json(v.ub)}});
  }
  doc["terms"] = nlohmann::ordered_json::array();
  for (const auto& t : spec.terms) doc["terms"].push_back({{"variables", t.variables}, {"output", t.output}});
  doc["linear_constraints"] = nlohmann::ordered_json::array();
  for (const auto& c : spec.constraints) {
    nlohmann::ordered_json coefs = nlohmann::ordered_json::object();
    for (const auto& [n, a] : c.coefficients) coefs[n] = a;
    const char* sense = c.sense == RowSense::le ? "<=" : c.sense == RowSense::ge ? ">=" : "=";
    doc["linear_constraints"].push_back({{"name", c.name}, {"coefficients", coefs}, {"sense", sense}, {"rhs", c.rhs}});
  }
  nlohmann::ordered_json coefs = nlohmann::ordered_json::object();
  for (const auto& [n, a] : spec.objective.coefficients) coefs[n] = a;
  doc["objective"] = {{"sense", spec.objective.sense == ObjSense::maximize ? "max" : "min"}, {"coefficients", coefs}};
  if (spec.opt) doc["opt"] = *spec.opt;
  return nlohmann::json::parse(doc.dump());
}

inline ProblemSpec load_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw LoadError(path + ": cannot open");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw LoadError(path + ": " + e.what());
  }
  try {
    return problem_from_json(doc);
  } catch (const LoadError& e) {
    throw LoadError(path + ": " + e.what());
  }
}

/// Three quadrilinear terms over eight variables with one knapsack-like side row.
inline ProblemSpec build_benchmark_instance() {
  ProblemSpec spec;
  spec.variables = {{"x1", 100, 500}, {"x2", 1000, 2000}, {"x3", 1000, 2000}, {"x4", 10, 100},
                    {"x5", 10, 100},  {"x6", 10, 100},    {"x7", 10, 100},    {"x8", 10, 100}};
  spec.terms = {{{"x1", "x2", "x3", "x4"}, "t1"}, {{"x3", "x4", "x5", "x6"}, "t2"}, {{"x5", "x6", "x7", "x8"}, "t3"}};
  spec.constraints = {{"budget",
                       {{"x1", 100}, {"x2", -1}, {"x3", -1}, {"x4", 833}, {"x5", 95}, {"x6", 1}, {"x7", -1}, {"x8", 100}},
                       RowSense::le,
                       50000}};
  spec.objective = {ObjSense::maximize, {{"t1", 1}, {"t2", 1}, {"t3", 1}}};
  spec.opt = 3.2642e10;
  return spec;
}

/// Redraws every term factor's bounds as lb ~ U[0.1, 0.2], ub ~ U[0.9, 1].
inline ProblemSpec randomize_bounds(ProblemSpec spec, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> lo(0.1, 0.2), hi(0.9, 1.0);
  for (auto& v : spec.variables) {
    v.lb = lo(rng);
    v.ub = hi(rng);
  }
  spec.opt.reset();
  return spec;
}

/// Columns of a spec inside a model: originals in file order, then term outputs.
struct BaseModel {
  MilpModel model;
  std::vector<VarRef> variables;
  std::vector<MultilinearTerm> terms;
};

/// Adds original columns, outputs, side rows, and the objective.
inline BaseModel build_base(const ProblemSpec& spec) {
  spec.validate();
  BaseModel base;
  std::map<std::string, VarRef> refs;
  for (const auto& v : spec.variables) refs[v.name] = base.variables.emplace_back(base.model.add_variable(v.name, v.lb, v.ub));
  for (const auto& t : spec.terms) {
    std::vector<VarRef> factors;
    for (const auto& n : t.variables) factors.push_back(refs.at(n));
    VarRef out;
    if (auto it = refs.find(t.output); it != refs.end()) {
      out = it->second;
    } else {
      out = base.model.add_variable(t.output, -kInfinity, kInfinity);
      refs[t.output] = out;
    }
    base.terms.emplace_back(std::move(factors), out);
  }
  for (const auto& c : spec.constraints) {
    LinearExpr e;
    for (const auto& [n, a] : c.coefficients) e.add(refs.at(n), a);
    base.model.add_row(std::move(e), c.sense, c.rhs, c.name);
  }
  LinearExpr obj;
  for (const auto& [n, a] : spec.objective.coefficients) obj.add(refs.at(n), a);
  base.model.set_objective(spec.objective.sense, std::move(obj));
  return base;
}

}  // namespace multirelax
