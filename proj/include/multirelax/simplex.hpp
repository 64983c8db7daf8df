/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 The multirelax Authors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

// Bounded-variable revised primal simplex over a dense explicit basis inverse.
//
// Every row i gets a logical column s_i with A_i x - s_i = 0 and the row sense expressed as
// bounds on s_i, so the engine only ever sees equality rows and boxed columns. Phase 1
// minimizes the sum of basic bound violations and can start from any basis, which lets
// branch-and-bound restart a child from its parent's final basis.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "multirelax/milp_model.hpp"

namespace multirelax {

enum class BranchingRule { most_fractional };
enum class NodeSelection { best_bound };

struct SolveConfig {
  double feasibility_tol = 1e-6;
  double optimality_tol = 1e-6;  // relative MILP gap, and reduced-cost tolerance on scaled costs
  double integrality_tol = 1e-6;
  double pivot_tol = 1e-9;
  std::size_t node_limit = 50'000'000;
  double time_limit_seconds = 3600.0;
  BranchingRule branching = BranchingRule::most_fractional;
  NodeSelection node_selection = NodeSelection::best_bound;
  std::size_t degenerate_pivots_before_bland = 5000;
  std::size_t lp_iteration_limit = 0;  // 0 = automatic
  std::size_t refactor_interval = 100;
  bool warm_start = true;
  bool record_trace = false;

  void validate() const {
    if (!(feasibility_tol > 0 && optimality_tol > 0 && integrality_tol > 0 && pivot_tol > 0)) {
      throw ModelError("solver tolerances must be positive");
    }
  }
};

/// Snapshot of a simplex basis: basic column per row position plus which nonbasic columns
/// sit at their upper bound.
struct Basis {
  std::vector<std::size_t> head;
  std::vector<std::uint8_t> at_upper;
  [[nodiscard]] bool empty() const { return head.empty(); }
};

namespace detail {

inline double pow2_round(double s) {
  if (!(s > 0) || !std::isfinite(s)) return 1.0;
  return std::ldexp(1.0, static_cast<int>(std::lround(std::log2(s))));
}

}  // namespace detail

/// Scaled column-major copy of a MilpModel's constraint matrix with mutable column bounds.
/// Bounds passed in and solutions handed out are always in the model's own units.
class LpEngine {
 public:
  enum class Outcome { optimal, infeasible, unbounded, iteration_limit, numerical_error };

  explicit LpEngine(const MilpModel& model, const SolveConfig& cfg = {}) : cfg_(cfg) {
    cfg_.validate();
    m_ = model.num_rows();
    n_ = model.num_variables();
    total_ = n_ + m_;
    maximize_ = model.objective().sense == ObjSense::maximize;

    // Column-major structure.
    std::vector<std::size_t> count(n_, 0);
    for (const auto& row : model.rows()) {
      for (const auto& [j, a] : row.expr.terms()) ++count[j];
    }
    col_start_.assign(n_ + 1, 0);
    for (std::size_t j = 0; j < n_; ++j) col_start_[j + 1] = col_start_[j] + count[j];
    row_idx_.resize(col_start_[n_]);
    val_.resize(col_start_[n_]);
    std::vector<std::size_t> fill(col_start_.begin(), col_start_.end() - 1);
    for (std::size_t i = 0; i < m_; ++i) {
      for (const auto& [j, a] : model.rows()[i].expr.terms()) {
        row_idx_[fill[j]] = i;
        val_[fill[j]] = a;
        ++fill[j];
      }
    }

    compute_scaling();

    cost_.assign(total_, 0.0);
    double cmax = 0.0;
    for (const auto& [j, c] : model.objective().expr.terms()) {
      cost_[j] = (maximize_ ? -c : c) * col_scale_[j];
      cmax = std::max(cmax, std::abs(cost_[j]));
    }
    obj_scale_ = cmax > 0 ? detail::pow2_round(1.0 / cmax) : 1.0;
    for (auto& c : cost_) c *= obj_scale_;
    obj_coef_.assign(n_, 0.0);
    for (const auto& [j, c] : model.objective().expr.terms()) obj_coef_[j] = c;

    lb_.assign(total_, 0.0);
    ub_.assign(total_, 0.0);
    orig_lb_.resize(n_);
    orig_ub_.resize(n_);
    for (std::size_t j = 0; j < n_; ++j) {
      orig_lb_[j] = model.variables()[j].lb;
      orig_ub_[j] = model.variables()[j].ub;
      set_scaled_bounds(j, orig_lb_[j], orig_ub_[j]);
    }
    for (std::size_t i = 0; i < m_; ++i) {
      const auto& row = model.rows()[i];
      const double r = row.rhs * row_scale_[i];
      const std::size_t k = n_ + i;
      switch (row.sense) {
        case RowSense::le: lb_[k] = -kInfinity; ub_[k] = r; break;
        case RowSense::ge: lb_[k] = r; ub_[k] = kInfinity; break;
        case RowSense::eq: lb_[k] = r; ub_[k] = r; break;
      }
    }

    x_.assign(total_, 0.0);
    state_.assign(total_, State::lower);
    pos_.assign(total_, npos);
    set_slack_basis();
  }

  [[nodiscard]] std::size_t num_rows() const { return m_; }
  [[nodiscard]] std::size_t num_cols() const { return n_; }
  [[nodiscard]] double lower(std::size_t j) const { return orig_lb_[j]; }
  [[nodiscard]] double upper(std::size_t j) const { return orig_ub_[j]; }

  /// Changes the bounds of a structural column (model units).
  void set_bounds(std::size_t j, double lb, double ub) {
    orig_lb_[j] = lb;
    orig_ub_[j] = ub;
    set_scaled_bounds(j, lb, ub);
    if (state_[j] != State::basic) place_nonbasic(j);
    values_stale_ = true;
  }

  void set_slack_basis() {
    head_.resize(m_);
    std::fill(pos_.begin(), pos_.end(), npos);
    for (std::size_t j = 0; j < n_; ++j) {
      state_[j] = State::lower;
      place_nonbasic(j);
    }
    for (std::size_t i = 0; i < m_; ++i) {
      head_[i] = n_ + i;
      pos_[n_ + i] = i;
      state_[n_ + i] = State::basic;
    }
    inverse_valid_ = false;
    values_stale_ = true;
  }

  [[nodiscard]] Basis basis() const {
    Basis b;
    b.head = head_;
    b.at_upper.resize(total_);
    for (std::size_t j = 0; j < total_; ++j) b.at_upper[j] = state_[j] == State::upper ? 1 : 0;
    return b;
  }

  void load_basis(const Basis& b) {
    if (b.head.size() != m_ || b.at_upper.size() != total_) {
      set_slack_basis();
      return;
    }
    const bool same = inverse_valid_ && b.head == head_;
    if (!same) {
      head_ = b.head;
      std::fill(pos_.begin(), pos_.end(), npos);
      for (std::size_t r = 0; r < m_; ++r) pos_[head_[r]] = r;
      inverse_valid_ = false;
    }
    for (std::size_t j = 0; j < total_; ++j) {
      if (pos_[j] != npos) {
        state_[j] = State::basic;
      } else {
        state_[j] = b.at_upper[j] ? State::upper : State::lower;
        place_nonbasic(j);
      }
    }
    values_stale_ = true;
  }

  Outcome solve() {
    const std::size_t limit =
        cfg_.lp_iteration_limit ? cfg_.lp_iteration_limit : 20000 + 50 * (m_ + n_);
    std::size_t since_refactor = 0;
    std::size_t degenerate = 0;
    bool bland = false;
    bool retried = false;
    iterations_ = 0;

    if (!inverse_valid_ && !refactor()) return Outcome::numerical_error;
    if (values_stale_) compute_basic_values();

    std::vector<double> cb(m_), y(m_), alpha(m_);
    while (true) {
      if (iterations_ >= limit) return Outcome::iteration_limit;
      if (since_refactor >= cfg_.refactor_interval) {
        if (!refactor()) return Outcome::numerical_error;
        compute_basic_values();
        since_refactor = 0;
      }

      // Phase selection and basic costs.
      bool phase1 = false;
      for (std::size_t r = 0; r < m_; ++r) {
        const std::size_t k = head_[r];
        const double v = x_[k];
        if (v < lb_[k] - ftol()) {
          cb[r] = -1.0;
          phase1 = true;
        } else if (v > ub_[k] + ftol()) {
          cb[r] = 1.0;
          phase1 = true;
        } else {
          cb[r] = 0.0;
        }
      }
      if (!phase1) {
        for (std::size_t r = 0; r < m_; ++r) cb[r] = cost_[head_[r]];
      }
      btran(cb, y);

      // Pricing.
      std::size_t entering = npos;
      double best = 0.0;
      int dir = 0;
      for (std::size_t j = 0; j < total_; ++j) {
        if (state_[j] == State::basic) continue;
        if (lb_[j] == ub_[j]) continue;
        const double d = (phase1 ? 0.0 : cost_[j]) - dot_column(j, y);
        int want = 0;
        if (state_[j] == State::zero) {
          if (std::abs(d) > dtol()) want = d < 0 ? 1 : -1;
        } else if (state_[j] == State::lower) {
          if (d < -dtol()) want = 1;
        } else if (d > dtol()) {
          want = -1;
        }
        if (!want) continue;
        if (bland) {
          entering = j;
          dir = want;
          break;
        }
        if (std::abs(d) > best) {
          best = std::abs(d);
          entering = j;
          dir = want;
        }
      }

      if (entering == npos) {
        if (since_refactor > 0) {
          // Confirm on a fresh factorization before declaring the phase finished.
          if (!refactor()) return Outcome::numerical_error;
          compute_basic_values();
          since_refactor = 0;
          continue;
        }
        if (phase1) return Outcome::infeasible;
        y_ = y;
        return Outcome::optimal;
      }

      ftran_column(entering, alpha);

      // Harris two-pass ratio test. Basic k moves at rate -dir * alpha_r.
      const double tol = ftol();
      double relaxed_max = std::numeric_limits<double>::infinity();
      if (!is_inf(lb_[entering]) && !is_inf(ub_[entering])) relaxed_max = ub_[entering] - lb_[entering];
      const double flip_step = relaxed_max;
      auto limit_for = [&](std::size_t r, bool relaxed, double& bound_hit) -> double {
        const double a = alpha[r];
        if (std::abs(a) <= cfg_.pivot_tol) return std::numeric_limits<double>::infinity();
        const double rate = -dir * a;
        const std::size_t k = head_[r];
        const double v = x_[k];
        const double slack = relaxed ? tol : 0.0;
        const bool below = v < lb_[k] - tol;
        const bool above = v > ub_[k] + tol;
        if (rate < 0) {
          if (below) return std::numeric_limits<double>::infinity();
          const double target = above ? ub_[k] : lb_[k];
          if (is_inf(target)) return std::numeric_limits<double>::infinity();
          bound_hit = target;
          return (v - target + slack) / -rate;
        }
        if (above) return std::numeric_limits<double>::infinity();
        const double target = below ? lb_[k] : ub_[k];
        if (is_inf(target)) return std::numeric_limits<double>::infinity();
        bound_hit = target;
        return (target - v + slack) / rate;
      };

      std::size_t leave = npos;
      double leave_bound = 0.0;
      double step = 0.0;
      if (bland) {
        double best_ratio = std::numeric_limits<double>::infinity();
        for (std::size_t r = 0; r < m_; ++r) {
          double hit = 0.0;
          const double t = limit_for(r, false, hit);
          if (t == std::numeric_limits<double>::infinity()) continue;
          if (leave == npos || t < best_ratio - 1e-12 || (t <= best_ratio + 1e-12 && head_[r] < head_[leave])) {
            best_ratio = t;
            leave = r;
            leave_bound = hit;
          }
        }
        step = best_ratio;
      } else {
        for (std::size_t r = 0; r < m_; ++r) {
          double hit = 0.0;
          relaxed_max = std::min(relaxed_max, limit_for(r, true, hit));
        }
        double best_alpha = 0.0;
        for (std::size_t r = 0; r < m_; ++r) {
          double hit = 0.0;
          const double t = limit_for(r, false, hit);
          if (t < std::numeric_limits<double>::infinity() && t <= relaxed_max && std::abs(alpha[r]) > best_alpha) {
            best_alpha = std::abs(alpha[r]);
            leave = r;
            leave_bound = hit;
            step = t;
          }
        }
      }

      const bool flip = flip_step < std::numeric_limits<double>::infinity() &&
                        (leave == npos || flip_step <= step);
      if (!flip && leave == npos) {
        if (!retried) {
          retried = true;
          if (!refactor()) return Outcome::numerical_error;
          compute_basic_values();
          since_refactor = 0;
          continue;
        }
        return phase1 ? Outcome::numerical_error : Outcome::unbounded;
      }
      retried = false;
      if (flip) step = flip_step;
      step = std::max(step, 0.0);

      // Update primal values.
      if (step > 0) {
        x_[entering] += dir * step;
        for (std::size_t r = 0; r < m_; ++r) {
          if (alpha[r] != 0.0) x_[head_[r]] -= dir * step * alpha[r];
        }
      }
      ++iterations_;
      if (step <= 1e-12) {
        if (++degenerate >= cfg_.degenerate_pivots_before_bland) bland = true;
      }

      if (flip) {
        state_[entering] = dir > 0 ? State::upper : State::lower;
        x_[entering] = dir > 0 ? ub_[entering] : lb_[entering];
        continue;
      }

      const std::size_t leaving = head_[leave];
      pivot(leave, alpha);
      head_[leave] = entering;
      pos_[entering] = leave;
      state_[entering] = State::basic;
      pos_[leaving] = npos;
      x_[leaving] = leave_bound;
      if (lb_[leaving] == ub_[leaving] || leave_bound == lb_[leaving]) {
        state_[leaving] = State::lower;
      } else {
        state_[leaving] = State::upper;
      }
      ++since_refactor;
    }
  }

  /// Column values in model units.
  [[nodiscard]] std::vector<double> primal() const {
    std::vector<double> out(n_);
    for (std::size_t j = 0; j < n_; ++j) out[j] = x_[j] * col_scale_[j];
    return out;
  }

  /// Row duals in model units, signed for the model's own objective sense.
  [[nodiscard]] std::vector<double> duals() const {
    std::vector<double> out(m_, 0.0);
    if (y_.size() != m_) return out;
    for (std::size_t i = 0; i < m_; ++i) {
      double v = y_[i] * row_scale_[i] / obj_scale_;
      out[i] = maximize_ ? -v : v;
    }
    return out;
  }

  [[nodiscard]] double objective() const {
    const auto x = primal();
    double s = 0.0;
    for (std::size_t j = 0; j < n_; ++j) s += obj_coef_[j] * x[j];
    return s;
  }

  [[nodiscard]] std::size_t iterations() const { return iterations_; }

 private:
  enum class State : std::uint8_t { basic, lower, upper, zero };
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  static bool is_inf(double v) { return std::abs(v) >= kInfinity; }
  [[nodiscard]] double ftol() const { return cfg_.feasibility_tol; }
  [[nodiscard]] double dtol() const { return cfg_.optimality_tol; }

  void set_scaled_bounds(std::size_t j, double lb, double ub) {
    lb_[j] = is_inf(lb) ? -kInfinity : lb / col_scale_[j];
    ub_[j] = is_inf(ub) ? kInfinity : ub / col_scale_[j];
  }

  void place_nonbasic(std::size_t j) {
    const bool lo_inf = is_inf(lb_[j]);
    const bool hi_inf = is_inf(ub_[j]);
    if (lo_inf && hi_inf) {
      state_[j] = State::zero;
      x_[j] = 0.0;
    } else if (state_[j] == State::upper && !hi_inf) {
      x_[j] = ub_[j];
    } else if (!lo_inf) {
      state_[j] = State::lower;
      x_[j] = lb_[j];
    } else {
      state_[j] = State::upper;
      x_[j] = ub_[j];
    }
  }

  void compute_scaling() {
    row_scale_.assign(m_, 1.0);
    col_scale_.assign(n_, 1.0);
    if (val_.empty()) return;
    std::vector<double> rmin(m_), rmax(m_);
    for (int pass = 0; pass < 8; ++pass) {
      // Columns.
      for (std::size_t j = 0; j < n_; ++j) {
        double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
        for (std::size_t p = col_start_[j]; p < col_start_[j + 1]; ++p) {
          const double a = std::abs(val_[p]) * row_scale_[row_idx_[p]];
          lo = std::min(lo, a);
          hi = std::max(hi, a);
        }
        if (hi > 0) col_scale_[j] = 1.0 / std::sqrt(lo * hi);
      }
      // Rows.
      std::fill(rmin.begin(), rmin.end(), std::numeric_limits<double>::infinity());
      std::fill(rmax.begin(), rmax.end(), 0.0);
      for (std::size_t j = 0; j < n_; ++j) {
        for (std::size_t p = col_start_[j]; p < col_start_[j + 1]; ++p) {
          const double a = std::abs(val_[p]) * col_scale_[j];
          rmin[row_idx_[p]] = std::min(rmin[row_idx_[p]], a);
          rmax[row_idx_[p]] = std::max(rmax[row_idx_[p]], a);
        }
      }
      for (std::size_t i = 0; i < m_; ++i) {
        if (rmax[i] > 0) row_scale_[i] = 1.0 / std::sqrt(rmin[i] * rmax[i]);
      }
    }
    for (auto& r : row_scale_) r = detail::pow2_round(r);
    for (auto& c : col_scale_) c = detail::pow2_round(c);
    for (std::size_t j = 0; j < n_; ++j) {
      for (std::size_t p = col_start_[j]; p < col_start_[j + 1]; ++p) {
        val_[p] *= row_scale_[row_idx_[p]] * col_scale_[j];
      }
    }
  }

  [[nodiscard]] double dot_column(std::size_t j, const std::vector<double>& y) const {
    if (j >= n_) return -y[j - n_];
    double s = 0.0;
    for (std::size_t p = col_start_[j]; p < col_start_[j + 1]; ++p) s += val_[p] * y[row_idx_[p]];
    return s;
  }

  // alpha = B^{-1} a_j
  void ftran_column(std::size_t j, std::vector<double>& alpha) const {
    std::fill(alpha.begin(), alpha.end(), 0.0);
    if (j >= n_) {
      const std::size_t i = j - n_;
      for (std::size_t r = 0; r < m_; ++r) alpha[r] = -binv_[r * m_ + i];
      return;
    }
    for (std::size_t p = col_start_[j]; p < col_start_[j + 1]; ++p) {
      const std::size_t i = row_idx_[p];
      const double a = val_[p];
      for (std::size_t r = 0; r < m_; ++r) alpha[r] += binv_[r * m_ + i] * a;
    }
  }

  // y^T = cb^T B^{-1}
  void btran(const std::vector<double>& cb, std::vector<double>& y) const {
    std::fill(y.begin(), y.end(), 0.0);
    for (std::size_t r = 0; r < m_; ++r) {
      const double c = cb[r];
      if (c == 0.0) continue;
      const double* row = &binv_[r * m_];
      for (std::size_t i = 0; i < m_; ++i) y[i] += c * row[i];
    }
  }

  void pivot(std::size_t leave, const std::vector<double>& alpha) {
    double* prow = &binv_[leave * m_];
    const double inv = 1.0 / alpha[leave];
    for (std::size_t i = 0; i < m_; ++i) prow[i] *= inv;
    for (std::size_t r = 0; r < m_; ++r) {
      if (r == leave || alpha[r] == 0.0) continue;
      const double f = alpha[r];
      double* row = &binv_[r * m_];
      for (std::size_t i = 0; i < m_; ++i) row[i] -= f * prow[i];
    }
  }

  // Inverts the current basis by Gauss-Jordan elimination with partial pivoting. Columns
  // that turn out dependent are swapped for logicals.
  bool refactor() {
    for (int attempt = 0; attempt < 4; ++attempt) {
      std::vector<double> b(m_ * m_, 0.0);
      for (std::size_t r = 0; r < m_; ++r) {
        const std::size_t j = head_[r];
        if (j >= n_) {
          b[(j - n_) * m_ + r] = -1.0;
        } else {
          for (std::size_t p = col_start_[j]; p < col_start_[j + 1]; ++p) b[row_idx_[p] * m_ + r] = val_[p];
        }
      }
      binv_.assign(m_ * m_, 0.0);
      for (std::size_t i = 0; i < m_; ++i) binv_[i * m_ + i] = 1.0;
      std::vector<std::size_t> perm_col(m_);
      for (std::size_t c = 0; c < m_; ++c) perm_col[c] = c;
      // Row-reduce [B | I] column by column.
      std::vector<std::size_t> row_of_col(m_, npos);
      std::vector<char> row_used(m_, 0);
      std::size_t bad_col = npos;
      for (std::size_t c = 0; c < m_; ++c) {
        std::size_t piv = npos;
        double best = 0.0;
        for (std::size_t i = 0; i < m_; ++i) {
          if (row_used[i]) continue;
          const double v = std::abs(b[i * m_ + c]);
          if (v > best) {
            best = v;
            piv = i;
          }
        }
        if (piv == npos || best < 1e-11) {
          bad_col = c;
          break;
        }
        row_used[piv] = 1;
        row_of_col[c] = piv;
        const double inv = 1.0 / b[piv * m_ + c];
        for (std::size_t k = 0; k < m_; ++k) {
          b[piv * m_ + k] *= inv;
          binv_[piv * m_ + k] *= inv;
        }
        for (std::size_t i = 0; i < m_; ++i) {
          if (i == piv) continue;
          const double f = b[i * m_ + c];
          if (f == 0.0) continue;
          for (std::size_t k = c; k < m_; ++k) b[i * m_ + k] -= f * b[piv * m_ + k];
          for (std::size_t k = 0; k < m_; ++k) binv_[i * m_ + k] -= f * binv_[piv * m_ + k];
        }
      }
      if (bad_col == npos) {
        // Rows of binv_ are currently indexed by pivot row; reorder to basis position.
        std::vector<double> ordered(m_ * m_);
        for (std::size_t c = 0; c < m_; ++c) {
          std::copy_n(&binv_[row_of_col[c] * m_], m_, &ordered[c * m_]);
        }
        binv_ = std::move(ordered);
        inverse_valid_ = true;
        return true;
      }
      repair_basis(bad_col);
    }
    inverse_valid_ = false;
    return false;
  }

  // Replaces dependent basic columns with logicals of rows not yet covered.
  void repair_basis(std::size_t /*first_bad*/) {
    std::vector<char> covered(m_, 0);
    for (std::size_t r = 0; r < m_; ++r) {
      if (head_[r] >= n_) covered[head_[r] - n_] = 1;
    }
    // Simple strategy: rebuild from logicals for every structural column that fails a
    // rank-revealing pass; structurals are retried in order.
    std::vector<std::size_t> structurals;
    for (std::size_t r = 0; r < m_; ++r) {
      if (head_[r] < n_) structurals.push_back(head_[r]);
    }
    // Greedy: accept structurals that keep the partial basis independent.
    std::vector<double> q;  // orthogonalized accepted columns (m_ each)
    std::vector<std::size_t> accepted;
    auto residual = [&](std::vector<double> v) {
      for (std::size_t a = 0; a < accepted.size(); ++a) {
        const double* u = &q[a * m_];
        double d = 0.0;
        for (std::size_t i = 0; i < m_; ++i) d += u[i] * v[i];
        for (std::size_t i = 0; i < m_; ++i) v[i] -= d * u[i];
      }
      return v;
    };
    for (std::size_t j : structurals) {
      std::vector<double> col(m_, 0.0);
      for (std::size_t p = col_start_[j]; p < col_start_[j + 1]; ++p) col[row_idx_[p]] = val_[p];
      double norm0 = 0.0;
      for (double v : col) norm0 += v * v;
      auto res = residual(col);
      double norm = 0.0;
      for (double v : res) norm += v * v;
      if (norm0 > 0 && norm > 1e-18 * norm0 && norm > 1e-20) {
        norm = std::sqrt(norm);
        for (auto& v : res) v /= norm;
        q.insert(q.end(), res.begin(), res.end());
        accepted.push_back(j);
      }
    }
    // Fill remaining positions with logicals that are independent of the accepted set.
    std::vector<std::size_t> new_head = accepted;
    for (std::size_t i = 0; i < m_ && new_head.size() < m_; ++i) {
      std::vector<double> e(m_, 0.0);
      e[i] = 1.0;
      auto res = residual(e);
      double norm = 0.0;
      for (double v : res) norm += v * v;
      if (norm > 1e-12) {
        norm = std::sqrt(norm);
        for (auto& v : res) v /= norm;
        q.insert(q.end(), res.begin(), res.end());
        accepted.push_back(n_ + i);
        new_head.push_back(n_ + i);
      }
    }
    for (std::size_t j = 0; j < total_; ++j) {
      if (state_[j] == State::basic) {
        state_[j] = State::lower;
        pos_[j] = npos;
      }
    }
    head_ = new_head;
    for (std::size_t r = 0; r < m_; ++r) {
      pos_[head_[r]] = r;
      state_[head_[r]] = State::basic;
    }
    for (std::size_t j = 0; j < total_; ++j) {
      if (state_[j] != State::basic) place_nonbasic(j);
    }
    values_stale_ = true;
  }

  void compute_basic_values() {
    // B x_B = -N x_N
    std::vector<double> rhs(m_, 0.0);
    for (std::size_t j = 0; j < total_; ++j) {
      if (state_[j] == State::basic) continue;
      const double v = x_[j];
      if (v == 0.0) continue;
      if (j >= n_) {
        rhs[j - n_] += v;  // -(-1) * v
      } else {
        for (std::size_t p = col_start_[j]; p < col_start_[j + 1]; ++p) rhs[row_idx_[p]] -= val_[p] * v;
      }
    }
    for (std::size_t r = 0; r < m_; ++r) {
      const double* row = &binv_[r * m_];
      double s = 0.0;
      for (std::size_t i = 0; i < m_; ++i) s += row[i] * rhs[i];
      x_[head_[r]] = s;
    }
    values_stale_ = false;
  }

  SolveConfig cfg_;
  std::size_t m_ = 0, n_ = 0, total_ = 0;
  bool maximize_ = false;
  std::vector<std::size_t> col_start_, row_idx_;
  std::vector<double> val_;
  std::vector<double> row_scale_, col_scale_;
  double obj_scale_ = 1.0;
  std::vector<double> cost_, obj_coef_;
  std::vector<double> lb_, ub_, orig_lb_, orig_ub_;
  std::vector<double> x_;
  std::vector<State> state_;
  std::vector<std::size_t> head_, pos_;
  std::vector<double> binv_;
  std::vector<double> y_;
  bool inverse_valid_ = false;
  bool values_stale_ = true;
  std::size_t iterations_ = 0;
};

inline SolveStatus to_status(LpEngine::Outcome o) {
  switch (o) {
    case LpEngine::Outcome::optimal: return SolveStatus::optimal;
    case LpEngine::Outcome::infeasible: return SolveStatus::infeasible;
    case LpEngine::Outcome::unbounded: return SolveStatus::unbounded;
    case LpEngine::Outcome::iteration_limit: return SolveStatus::limit;
    case LpEngine::Outcome::numerical_error: return SolveStatus::numerical_error;
  }
  return SolveStatus::numerical_error;
}

/// LP relaxation solve: binaries are treated as continuous on their bounds.
inline SolutionVector solve_lp(const MilpModel& model, const SolveConfig& cfg = {}) {
  LpEngine engine(model, cfg);
  const auto outcome = engine.solve();
  SolutionVector sol;
  sol.status = to_status(outcome);
  if (outcome == LpEngine::Outcome::optimal) {
    sol.values = engine.primal();
    sol.objective = objective_value(model, sol.values);
    sol.row_duals = engine.duals();
  }
  return sol;
}

}  // namespace multirelax
