/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 The multirelax Authors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

// Export to (and a minimal import from) the CPLEX-style LP text dialect.
//
// Numbers are written with std::to_chars shortest round-trip formatting, so reading a
// written file reproduces every coefficient and bound bit for bit.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "multirelax/milp_model.hpp"

namespace multirelax {

class LpParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::string format_number(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace detail {

inline constexpr std::size_t kTermsPerLine = 8;

inline void write_expr(std::ostringstream& out, const MilpModel& model, const LinearExpr& expr) {
  std::size_t written = 0;
  for (const auto& [j, a] : expr.terms()) {
    if (written > 0 && written % kTermsPerLine == 0) out << "\n   ";
    const char* sign = a < 0 ? "-" : "+";
    if (written == 0) {
      if (a < 0) out << " - ";
      else out << " ";
    } else {
      out << ' ' << sign << ' ';
    }
    out << format_number(std::abs(a)) << ' ' << model.variables()[j].name;
    ++written;
  }
}

}  // namespace detail

inline std::string write_lp_file(const MilpModel& model) {
  std::ostringstream out;
  out << "\\ multirelax LP export\n";
  out << (model.objective().sense == ObjSense::maximize ? "Maximize\n" : "Minimize\n");
  out << " obj:";
  if (model.objective().expr.empty()) {
    if (model.num_variables() > 0) out << " 0 " << model.variables().front().name;
  } else {
    detail::write_expr(out, model, model.objective().expr);
  }
  out << "\nSubject To\n";
  for (const auto& row : model.rows()) {
    out << ' ' << row.tag << ':';
    detail::write_expr(out, model, row.expr);
    switch (row.sense) {
      case RowSense::le: out << " <= "; break;
      case RowSense::ge: out << " >= "; break;
      case RowSense::eq: out << " = "; break;
    }
    out << format_number(row.rhs) << '\n';
  }
  out << "Bounds\n";
  for (const auto& v : model.variables()) {
    const bool lo_inf = is_infinite(v.lb);
    const bool hi_inf = is_infinite(v.ub);
    out << ' ';
    if (lo_inf && hi_inf) {
      out << v.name << " free";
    } else if (!lo_inf && !hi_inf && v.lb == v.ub) {
      out << v.name << " = " << format_number(v.lb);
    } else if (lo_inf) {
      out << "-inf <= " << v.name << " <= " << format_number(v.ub);
    } else if (hi_inf) {
      out << v.name << " >= " << format_number(v.lb);
    } else {
      out << format_number(v.lb) << " <= " << v.name << " <= " << format_number(v.ub);
    }
    out << '\n';
  }
  bool any_binary = false;
  for (const auto& v : model.variables()) {
    if (v.kind != VarKind::binary) continue;
    if (!any_binary) out << "Binaries\n";
    any_binary = true;
    out << ' ' << v.name << '\n';
  }
  out << "End\n";
  return out.str();
}

namespace detail {

enum class LpSection { none, objective, constraints, bounds, binaries, end };

inline bool iequals(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(a[i])) != std::tolower(static_cast<unsigned char>(b[i]))) return false;
  }
  return true;
}

inline bool parse_number(std::string_view tok, double& out) {
  if (iequals(tok, "inf") || iequals(tok, "+inf") || iequals(tok, "infinity") || iequals(tok, "+infinity")) {
    out = kInfinity;
    return true;
  }
  if (iequals(tok, "-inf") || iequals(tok, "-infinity")) {
    out = -kInfinity;
    return true;
  }
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  auto res = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  return res.ec == std::errc() && res.ptr == tok.data() + tok.size();
}

inline std::vector<std::string> tokenize(const std::string& text) {
  std::vector<std::string> toks;
  std::istringstream in(text);
  std::string t;
  while (in >> t) toks.push_back(t);
  return toks;
}

struct PendingVar {
  double lb = 0.0;
  double ub = kInfinity;
  bool binary = false;
};

}  // namespace detail

/// Reads the subset of the LP dialect that write_lp_file produces. Columns are created in
/// order of first appearance in the Bounds section, then objective and rows.
inline MilpModel read_lp_file(const std::string& text) {
  using detail::LpSection;
  std::vector<std::string> names;
  std::unordered_map<std::string, std::size_t> idx;
  std::vector<detail::PendingVar> pending;
  auto column = [&](const std::string& n) {
    auto it = idx.find(n);
    if (it != idx.end()) return it->second;
    idx.emplace(n, names.size());
    names.push_back(n);
    pending.emplace_back();
    return names.size() - 1;
  };

  struct RawRow {
    std::string tag;
    std::vector<std::pair<std::size_t, double>> terms;
    RowSense sense = RowSense::le;
    double rhs = 0.0;
  };
  ObjSense sense = ObjSense::minimize;
  std::vector<std::pair<std::size_t, double>> obj;
  std::vector<RawRow> rows;

  // Strip comments and split into section-tagged statements.
  std::istringstream lines(text);
  std::string line;
  LpSection section = LpSection::none;
  std::string buffer;
  std::vector<std::pair<LpSection, std::string>> statements;
  auto flush = [&] {
    if (!buffer.empty() && section != LpSection::none) statements.emplace_back(section, buffer);
    buffer.clear();
  };
  while (std::getline(lines, line)) {
    if (auto c = line.find('\\'); c != std::string::npos) line.erase(c);
    auto toks = detail::tokenize(line);
    if (toks.empty()) continue;
    const auto& head = toks.front();
    LpSection next = section;
    if (toks.size() == 1 && (detail::iequals(head, "maximize") || detail::iequals(head, "max"))) {
      next = LpSection::objective;
      sense = ObjSense::maximize;
    } else if (toks.size() == 1 && (detail::iequals(head, "minimize") || detail::iequals(head, "min"))) {
      next = LpSection::objective;
      sense = ObjSense::minimize;
    } else if (toks.size() == 2 && detail::iequals(head, "subject") && detail::iequals(toks[1], "to")) {
      next = LpSection::constraints;
    } else if (toks.size() == 1 && detail::iequals(head, "bounds")) {
      next = LpSection::bounds;
    } else if (toks.size() == 1 && (detail::iequals(head, "binaries") || detail::iequals(head, "binary"))) {
      next = LpSection::binaries;
    } else if (toks.size() == 1 && detail::iequals(head, "end")) {
      next = LpSection::end;
    }
    if (next != section) {
      flush();
      section = next;
      continue;
    }
    const bool continuation = std::isspace(static_cast<unsigned char>(line.front())) && line.find(':') == std::string::npos &&
                              (section == LpSection::objective || section == LpSection::constraints) &&
                              !buffer.empty() && (toks.front() == "+" || toks.front() == "-");
    if (section == LpSection::bounds || section == LpSection::binaries || !continuation) flush();
    buffer += ' ' + line;
  }
  flush();

  auto parse_terms = [&](const std::vector<std::string>& toks, std::size_t begin, std::size_t end) {
    std::vector<std::pair<std::size_t, double>> terms;
    double sign = 1.0;
    double coef = 1.0;
    bool have_coef = false;
    for (std::size_t k = begin; k < end; ++k) {
      const auto& t = toks[k];
      double num = 0.0;
      if (t == "+") {
        sign = 1.0;
      } else if (t == "-") {
        sign = -1.0;
      } else if (detail::parse_number(t, num)) {
        coef = num;
        have_coef = true;
      } else {
        terms.emplace_back(column(t), sign * (have_coef ? coef : 1.0));
        sign = 1.0;
        coef = 1.0;
        have_coef = false;
      }
    }
    return terms;
  };

  // Bounds first so that columns take the order of the Bounds section, which the writer
  // emits in column-id order.
  std::stable_partition(statements.begin(), statements.end(),
                        [](const auto& s) { return s.first == LpSection::bounds; });
  for (const auto& [sec, stmt] : statements) {
    auto toks = detail::tokenize(stmt);
    if (toks.empty()) continue;
    switch (sec) {
      case LpSection::objective: {
        std::size_t begin = 0;
        if (toks[0].back() == ':') begin = 1;
        obj = parse_terms(toks, begin, toks.size());
        break;
      }
      case LpSection::constraints: {
        RawRow row;
        std::size_t begin = 0;
        if (toks[0].back() == ':') {
          row.tag = toks[0].substr(0, toks[0].size() - 1);
          begin = 1;
        }
        if (toks.size() < begin + 3) throw LpParseError("malformed constraint: " + stmt);
        const auto& op = toks[toks.size() - 2];
        if (op == "<=" || op == "=<" || op == "<") row.sense = RowSense::le;
        else if (op == ">=" || op == "=>" || op == ">") row.sense = RowSense::ge;
        else if (op == "=") row.sense = RowSense::eq;
        else throw LpParseError("missing comparison in constraint: " + stmt);
        if (!detail::parse_number(toks.back(), row.rhs)) throw LpParseError("bad right-hand side: " + stmt);
        row.terms = parse_terms(toks, begin, toks.size() - 2);
        if (row.tag.empty()) row.tag = "R" + std::to_string(rows.size() + 1);
        rows.push_back(std::move(row));
        break;
      }
      case LpSection::bounds: {
        double a = 0.0;
        double b = 0.0;
        if (toks.size() == 2 && detail::iequals(toks[1], "free")) {
          auto& p = pending[column(toks[0])];
          p.lb = -kInfinity;
          p.ub = kInfinity;
        } else if (toks.size() == 3 && detail::parse_number(toks[2], a)) {
          auto& p = pending[column(toks[0])];
          if (toks[1] == "=") p.lb = p.ub = a;
          else if (toks[1] == ">=") p.lb = a;
          else if (toks[1] == "<=") p.ub = a;
          else throw LpParseError("bad bound: " + stmt);
        } else if (toks.size() == 5 && detail::parse_number(toks[0], a) && detail::parse_number(toks[4], b) &&
                   toks[1] == "<=" && toks[3] == "<=") {
          auto& p = pending[column(toks[2])];
          p.lb = a;
          p.ub = b;
        } else {
          throw LpParseError("bad bound: " + stmt);
        }
        break;
      }
      case LpSection::binaries:
        for (const auto& t : toks) {
          auto& p = pending[column(t)];
          p.binary = true;
        }
        break;
      default:
        break;
    }
  }

  MilpModel model;
  for (std::size_t j = 0; j < names.size(); ++j) {
    const auto& p = pending[j];
    model.add_variable(names[j], p.lb, p.binary && is_infinite(p.ub) ? 1.0 : p.ub,
                       p.binary ? VarKind::binary : VarKind::continuous);
  }
  LinearExpr objective;
  for (const auto& [j, a] : obj) objective.add(VarRef{j}, a);
  model.set_objective(sense, std::move(objective));
  for (auto& r : rows) {
    LinearExpr e;
    for (const auto& [j, a] : r.terms) e.add(VarRef{j}, a);
    model.add_row(std::move(e), r.sense, r.rhs, r.tag);
  }
  return model;
}

}  // namespace multirelax
