/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 The multirelax Authors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

// Combinatorial domain model for a multilinear term prod_{i in I} x_i: intervals and boxes,
// per-variable breakpoints, and the vertex grid they induce.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "multirelax/milp_model.hpp"

namespace multirelax {

class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  [[nodiscard]] double width() const { return hi - lo; }
  [[nodiscard]] bool contains(const Interval& o) const { return lo <= o.lo && o.hi <= hi; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Tight hull of {x*y : x in a, y in b}.
inline Interval interval_product(const Interval& a, const Interval& b) {
  const double c[4] = {a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi};
  return {*std::min_element(c, c + 4), *std::max_element(c, c + 4)};
}

/// Axis-aligned box, one interval per term dimension.
struct Box {
  std::vector<Interval> dims;

  Box() = default;
  explicit Box(std::vector<Interval> d) : dims(std::move(d)) {
    for (const auto& iv : dims) {
      if (!(iv.lo <= iv.hi)) throw DomainError("box interval has lo > hi");
    }
  }
  [[nodiscard]] std::size_t size() const { return dims.size(); }
  const Interval& operator[](std::size_t i) const { return dims[i]; }
  friend bool operator==(const Box&, const Box&) = default;
};

/// Sorted breakpoints s_1 < ... < s_n of one variable; interval k is [s_k, s_{k+1}].
class Breakpoints {
 public:
  Breakpoints() = default;
  explicit Breakpoints(std::vector<double> pts) : points_(std::move(pts)) {
    if (points_.size() < 2) throw DomainError("a discretization needs at least two breakpoints");
    for (std::size_t k = 0; k + 1 < points_.size(); ++k) {
      if (!(points_[k] < points_[k + 1])) throw DomainError("breakpoints must be strictly increasing");
    }
    for (double p : points_) {
      if (!std::isfinite(p)) throw DomainError("breakpoints must be finite");
    }
  }

  [[nodiscard]] std::size_t size() const { return points_.size(); }
  [[nodiscard]] std::size_t num_intervals() const { return points_.size() - 1; }
  [[nodiscard]] double operator[](std::size_t k) const { return points_[k]; }
  [[nodiscard]] const std::vector<double>& points() const { return points_; }
  [[nodiscard]] Interval interval(std::size_t k) const { return {points_.at(k), points_.at(k + 1)}; }
  [[nodiscard]] Interval range() const { return {points_.front(), points_.back()}; }

  /// Position of an exact breakpoint value, or npos.
  [[nodiscard]] std::size_t index_of(double r) const {
    auto it = std::lower_bound(points_.begin(), points_.end(), r);
    if (it == points_.end() || *it != r) return npos;
    return static_cast<std::size_t>(it - points_.begin());
  }

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
  friend bool operator==(const Breakpoints&, const Breakpoints&) = default;

 private:
  std::vector<double> points_;
};

inline Breakpoints uniform_breakpoints(const Interval& iv, int partitions) {
  if (partitions < 1) throw DomainError("partition count must be positive");
  if (!(iv.lo < iv.hi)) throw DomainError("cannot partition a degenerate interval");
  std::vector<double> pts(static_cast<std::size_t>(partitions) + 1);
  const double step = (iv.hi - iv.lo) / partitions;
  for (int k = 0; k <= partitions; ++k) pts[static_cast<std::size_t>(k)] = iv.lo + step * k;
  pts.front() = iv.lo;
  pts.back() = iv.hi;
  return Breakpoints(std::move(pts));
}

/// Mixed-radix index over a product of breakpoint sets, first axis varying fastest.
class VertexGrid {
 public:
  VertexGrid() = default;
  explicit VertexGrid(std::vector<std::size_t> shape) : shape_(std::move(shape)) {
    stride_.resize(shape_.size());
    std::size_t s = 1;
    for (std::size_t i = 0; i < shape_.size(); ++i) {
      stride_[i] = s;
      s *= shape_[i];
    }
    size_ = shape_.empty() ? 0 : s;
  }

  [[nodiscard]] std::size_t size() const { return size_; }
  [[nodiscard]] std::size_t dimension() const { return shape_.size(); }
  [[nodiscard]] const std::vector<std::size_t>& shape() const { return shape_; }
  [[nodiscard]] std::size_t stride(std::size_t axis) const { return stride_[axis]; }

  [[nodiscard]] std::size_t coordinate(std::size_t flat, std::size_t axis) const {
    return (flat / stride_[axis]) % shape_[axis];
  }
  [[nodiscard]] std::vector<std::size_t> decode(std::size_t flat) const {
    std::vector<std::size_t> idx(shape_.size());
    for (std::size_t i = 0; i < shape_.size(); ++i) idx[i] = coordinate(flat, i);
    return idx;
  }
  [[nodiscard]] std::size_t encode(std::span<const std::size_t> idx) const {
    std::size_t flat = 0;
    for (std::size_t i = 0; i < shape_.size(); ++i) flat += idx[i] * stride_[i];
    return flat;
  }

 private:
  std::vector<std::size_t> shape_;
  std::vector<std::size_t> stride_;
  std::size_t size_ = 0;
};

/// Breakpoints for every dimension of one term.
class Discretization {
 public:
  Discretization() = default;
  explicit Discretization(std::vector<Breakpoints> axes) : axes_(std::move(axes)) {
    std::vector<std::size_t> shape;
    shape.reserve(axes_.size());
    for (const auto& a : axes_) shape.push_back(a.size());
    grid_ = VertexGrid(std::move(shape));
  }

  [[nodiscard]] std::size_t dimension() const { return axes_.size(); }
  [[nodiscard]] const Breakpoints& axis(std::size_t i) const { return axes_.at(i); }
  [[nodiscard]] const std::vector<Breakpoints>& axes() const { return axes_; }
  [[nodiscard]] const VertexGrid& grid() const { return grid_; }
  [[nodiscard]] Box box() const {
    std::vector<Interval> d;
    for (const auto& a : axes_) d.push_back(a.range());
    return Box(std::move(d));
  }

  [[nodiscard]] std::vector<double> vertex(std::size_t flat) const {
    std::vector<double> p(axes_.size());
    for (std::size_t i = 0; i < axes_.size(); ++i) p[i] = axes_[i][grid_.coordinate(flat, i)];
    return p;
  }

  friend bool operator==(const Discretization& a, const Discretization& b) { return a.axes_ == b.axes_; }

 private:
  std::vector<Breakpoints> axes_;
  VertexGrid grid_;
};

inline Discretization uniform_discretization(const Box& bounds, int partitions_per_variable) {
  std::vector<Breakpoints> axes;
  axes.reserve(bounds.size());
  for (const auto& iv : bounds.dims) axes.push_back(uniform_breakpoints(iv, partitions_per_variable));
  return Discretization(std::move(axes));
}

/// All grid points, in flat-index order.
inline std::vector<std::vector<double>> enumerate_vertices(const Discretization& d) {
  std::vector<std::vector<double>> out;
  out.reserve(d.grid().size());
  for (std::size_t s = 0; s < d.grid().size(); ++s) out.push_back(d.vertex(s));
  return out;
}

/// Flat indices of the grid points whose coordinate on `axis` equals the breakpoint `r`.
inline std::vector<std::size_t> mu(const Discretization& d, std::size_t axis, double r) {
  if (axis >= d.dimension()) throw DomainError("axis out of range");
  const std::size_t k = d.axis(axis).index_of(r);
  if (k == Breakpoints::npos) throw DomainError("value is not a breakpoint of axis " + std::to_string(axis));
  std::vector<std::size_t> out;
  out.reserve(d.grid().size() / d.axis(axis).size());
  for (std::size_t s = 0; s < d.grid().size(); ++s) {
    if (d.grid().coordinate(s, axis) == k) out.push_back(s);
  }
  return out;
}

inline double phi(std::span<const double> point) {
  double p = 1.0;
  for (double v : point) p *= v;
  return p;
}

/// w = prod of the listed columns. `output` is the lifted column holding the product.
struct MultilinearTerm {
  std::vector<VarRef> variables;
  VarRef output;

  MultilinearTerm() = default;
  MultilinearTerm(std::vector<VarRef> vars, VarRef out) : variables(std::move(vars)), output(out) {
    if (variables.size() < 2) throw DomainError("a multilinear term needs at least two variables");
    std::set<VarRef> seen(variables.begin(), variables.end());
    if (seen.size() != variables.size()) throw DomainError("multilinear term variables must be distinct");
    if (seen.count(output)) throw DomainError("term output cannot be one of its factors");
  }
  [[nodiscard]] std::size_t arity() const { return variables.size(); }
  friend bool operator==(const MultilinearTerm&, const MultilinearTerm&) = default;
};

inline double phi(std::span<const double> point, const MultilinearTerm& term) {
  if (point.size() != term.arity()) throw DomainError("point dimension does not match term arity");
  return phi(point);
}

}  // namespace multirelax
