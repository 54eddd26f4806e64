/*
 * Copyright 2026 The belltrace authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "belltrace/lp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <string>

#include "belltrace/errors.hpp"

namespace belltrace::lp {

namespace {

constexpr double kPivotTol = 1e-8;       // smallest acceptable pivot element
constexpr double kDegenerateStep = 1e-12;
constexpr int kDegenerateLimit = 60;     // consecutive degenerate pivots
                                         // before switching to Bland's rule

bool finite(double v) { return std::isfinite(v); }

}  // namespace

const char* to_string(Status s) {
  switch (s) {
    case Status::kOptimal: return "optimal";
    case Status::kInfeasible: return "infeasible";
    case Status::kUnbounded: return "unbounded";
    case Status::kNumericFailure: return "numeric-failure";
  }
  return "unknown";
}

void LinearProgram::validate() const {
  const Eigen::Index n = num_vars();
  if (n == 0) throw UsageError("LinearProgram: no variables");
  if (eq_matrix.size() > 0 || eq_rhs.size() > 0) {
    if (eq_matrix.rows() != eq_rhs.size() || eq_matrix.cols() != n) {
      throw UsageError("LinearProgram: equality block shape mismatch");
    }
  }
  if (ineq_matrix.size() > 0 || ineq_rhs.size() > 0) {
    if (ineq_matrix.rows() != ineq_rhs.size() || ineq_matrix.cols() != n) {
      throw UsageError("LinearProgram: inequality block shape mismatch");
    }
  }
  if (lower.size() != n || upper.size() != n) {
    throw UsageError("LinearProgram: bound vectors must have one entry per variable");
  }
  if (!objective.allFinite()) throw UsageError("LinearProgram: non-finite objective");
  if (eq_matrix.size() > 0 && !eq_matrix.allFinite()) {
    throw UsageError("LinearProgram: non-finite equality coefficients");
  }
  if (ineq_matrix.size() > 0 && !ineq_matrix.allFinite()) {
    throw UsageError("LinearProgram: non-finite inequality coefficients");
  }
  if (eq_rhs.size() > 0 && !eq_rhs.allFinite()) {
    throw UsageError("LinearProgram: non-finite equality rhs");
  }
  if (ineq_rhs.size() > 0 && !ineq_rhs.allFinite()) {
    throw UsageError("LinearProgram: non-finite inequality rhs");
  }
  for (Eigen::Index j = 0; j < n; ++j) {
    if (std::isnan(lower[j]) || std::isnan(upper[j]) || lower[j] > upper[j]) {
      throw UsageError("LinearProgram: bad bounds for variable " + std::to_string(j));
    }
  }
}

SimplexSolver::SimplexSolver(SolverOptions opts) : opts_(opts) {}

void SimplexSolver::reset() { have_basis_ = false; }

void SimplexSolver::load(const LinearProgram& lp) {
  n_ = static_cast<int>(lp.num_vars());
  n_eq_ = static_cast<int>(lp.num_eq());
  n_in_ = static_cast<int>(lp.num_ineq());
  m_ = n_eq_ + n_in_;
  nw_ = n_ + n_in_;

  A_ = Eigen::MatrixXd::Zero(m_, nw_);
  if (n_eq_ > 0) A_.topLeftCorner(n_eq_, n_) = lp.eq_matrix;
  if (n_in_ > 0) {
    A_.bottomLeftCorner(n_in_, n_) = lp.ineq_matrix;
    A_.bottomRightCorner(n_in_, n_in_) = Eigen::MatrixXd::Identity(n_in_, n_in_);
  }
  b_.resize(m_);
  if (n_eq_ > 0) b_.head(n_eq_) = lp.eq_rhs;
  if (n_in_ > 0) b_.tail(n_in_) = lp.ineq_rhs;

  c_ = Eigen::VectorXd::Zero(nw_ + m_);
  c_.head(n_) = lp.objective;

  lo_ = Eigen::VectorXd::Zero(nw_ + m_);
  up_ = Eigen::VectorXd::Constant(nw_ + m_, kInf);
  lo_.head(n_) = lp.lower;
  up_.head(n_) = lp.upper;
  // slacks: [0, inf). artificials: [0, inf) during phase 1, pinned later.

  // Equilibrate with powers of two (exact in binary floating point): rows
  // whose coefficients are far from unit scale — e.g. distance rows whose
  // entries shrink with a model parameter — otherwise wreck both pricing
  // accuracy and basis conditioning.
  rscale_ = Eigen::VectorXd::Ones(m_);
  for (int i = 0; i < m_; ++i) {
    const double mx = A_.row(i).cwiseAbs().maxCoeff();
    if (mx > 0.0 && std::isfinite(mx)) {
      rscale_[i] = std::exp2(-std::round(std::log2(mx)));
      A_.row(i) *= rscale_[i];
      b_[i] *= rscale_[i];
    }
  }
  cscale_ = Eigen::VectorXd::Ones(nw_);
  for (int j = 0; j < nw_; ++j) {
    const double mx = A_.col(j).cwiseAbs().maxCoeff();
    if (mx > 0.0 && std::isfinite(mx)) {
      cscale_[j] = std::exp2(-std::round(std::log2(mx)));
      A_.col(j) *= cscale_[j];
      c_[j] *= cscale_[j];
      if (finite(lo_[j])) lo_[j] /= cscale_[j];
      if (finite(up_[j])) up_[j] /= cscale_[j];
    }
  }
}

Eigen::VectorXd SimplexSolver::column(int j) const {
  if (j < nw_) return A_.col(j);
  Eigen::VectorXd e = Eigen::VectorXd::Zero(m_);
  e[j - nw_] = art_sign_[static_cast<std::size_t>(j - nw_)];
  return e;
}

double SimplexSolver::nonbasic_value(int j) const {
  switch (state_[static_cast<std::size_t>(j)]) {
    case VarState::kAtLower: return lo_[j];
    case VarState::kAtUpper: return up_[j];
    default: return 0.0;
  }
}

bool SimplexSolver::refactor() {
  Eigen::MatrixXd B(m_, m_);
  for (int i = 0; i < m_; ++i) B.col(i) = column(basis_[static_cast<std::size_t>(i)]);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(B);
  if (!lu.isInvertible()) return false;
  Binv_ = lu.inverse();
  pivots_since_refactor_ = 0;
  return true;
}

void SimplexSolver::compute_basic_values() {
  Eigen::VectorXd rhs = b_;
  for (int j = 0; j < nw_ + m_; ++j) {
    if (state_[static_cast<std::size_t>(j)] == VarState::kBasic) continue;
    double v = nonbasic_value(j);
    if (v != 0.0) rhs -= v * column(j);
  }
  xb_ = Binv_ * rhs;
}

bool SimplexSolver::basis_feasible(double tol) const {
  for (int i = 0; i < m_; ++i) {
    const int j = basis_[static_cast<std::size_t>(i)];
    if (xb_[i] < lo_[j] - tol || xb_[i] > up_[j] + tol) return false;
  }
  return true;
}

SimplexSolver::StepResult SimplexSolver::step(const Eigen::VectorXd& cost, bool bland) {
  // Pricing: y = Binv^T c_B, reduced costs d_j = c_j - y . A_j.
  Eigen::VectorXd cb(m_);
  for (int i = 0; i < m_; ++i) cb[i] = cost[basis_[static_cast<std::size_t>(i)]];
  Eigen::VectorXd y = Binv_.transpose() * cb;

  int enter = -1;
  double enter_score = opts_.optimality_tol;
  double enter_d = 0.0;
  for (int j = 0; j < nw_ + m_; ++j) {
    const VarState st = state_[static_cast<std::size_t>(j)];
    if (st == VarState::kBasic) continue;
    if (lo_[j] == up_[j]) continue;  // pinned, can never move
    double d = cost[j] - (j < nw_ ? y.dot(A_.col(j))
                                  : y[j - nw_] * art_sign_[static_cast<std::size_t>(j - nw_)]);
    double score = 0.0;
    if (st == VarState::kAtLower && d < -opts_.optimality_tol) score = -d;
    else if (st == VarState::kAtUpper && d > opts_.optimality_tol) score = d;
    else if (st == VarState::kFree && std::abs(d) > opts_.optimality_tol) score = std::abs(d);
    if (score <= 0.0) continue;
    if (bland) { enter = j; enter_d = d; break; }
    if (score > enter_score) { enter = j; enter_score = score; enter_d = d; }
  }
  if (enter < 0) return StepResult::kOptimal;

  const VarState est = state_[static_cast<std::size_t>(enter)];
  const double sigma = (est == VarState::kAtUpper || (est == VarState::kFree && enter_d > 0.0))
                           ? -1.0 : 1.0;
  Eigen::VectorXd w = Binv_ * column(enter);

  // Ratio test: entering moves by sigma * t, basics move by -sigma * t * w.
  double best_t = kInf;
  int leave_row = -1;
  double leave_pivot = 0.0;
  if (bland) {
    // Exact test with smallest-index tie break (anti-cycling needs it).
    constexpr double kTieTol = 1e-10;
    for (int i = 0; i < m_; ++i) {
      const double sw = sigma * w[i];
      if (std::abs(sw) < kPivotTol) continue;
      const int bj = basis_[static_cast<std::size_t>(i)];
      double t;
      if (sw > 0.0) {
        if (!finite(lo_[bj])) continue;
        t = (xb_[i] - lo_[bj]) / sw;
      } else {
        if (!finite(up_[bj])) continue;
        t = (xb_[i] - up_[bj]) / sw;
      }
      if (t < 0.0) t = 0.0;  // already at (or slightly past) its bound
      if (leave_row < 0 || t < best_t - kTieTol ||
          (t < best_t + kTieTol &&
           bj < basis_[static_cast<std::size_t>(leave_row)])) {
        best_t = std::min(t, best_t);
        leave_row = i;
        leave_pivot = w[i];
      }
    }
  } else {
    // Two-pass Harris test. Pass 1 finds the step limit with the bound
    // tolerance relaxed; pass 2 picks the largest pivot among the rows
    // that block within the limit. Preferring pivot magnitude over exact
    // minimality keeps the basis inverse well conditioned at the cost of
    // bound violations no larger than the feasibility tolerance.
    constexpr double kRatioFloor = 1e-9;  // coefficients below never block
    const double delta = opts_.feasibility_tol;
    double t_limit = kInf;
    for (int i = 0; i < m_; ++i) {
      const double sw = sigma * w[i];
      if (std::abs(sw) < kRatioFloor) continue;
      const int bj = basis_[static_cast<std::size_t>(i)];
      double slack;
      if (sw > 0.0) {
        if (!finite(lo_[bj])) continue;
        slack = xb_[i] - lo_[bj];
      } else {
        if (!finite(up_[bj])) continue;
        slack = up_[bj] - xb_[i];
      }
      const double t = (slack + delta) / std::abs(sw);
      t_limit = std::min(t_limit, std::max(t, 0.0));
    }
    if (finite(t_limit)) {
      for (int i = 0; i < m_; ++i) {
        const double sw = sigma * w[i];
        if (std::abs(sw) < kRatioFloor) continue;
        const int bj = basis_[static_cast<std::size_t>(i)];
        double slack;
        if (sw > 0.0) {
          if (!finite(lo_[bj])) continue;
          slack = xb_[i] - lo_[bj];
        } else {
          if (!finite(up_[bj])) continue;
          slack = up_[bj] - xb_[i];
        }
        const double t = std::max(slack, 0.0) / std::abs(sw);
        if (t <= t_limit && std::abs(w[i]) > std::abs(leave_pivot)) {
          best_t = t;
          leave_row = i;
          leave_pivot = w[i];
        }
      }
    }
  }

  const double t_bound = up_[enter] - lo_[enter];  // bound-flip distance
  if (!finite(best_t) && !finite(t_bound)) return StepResult::kUnbounded;

  if (t_bound <= best_t) {
    // Bound flip: the entering variable runs to its other bound.
    state_[static_cast<std::size_t>(enter)] =
        (sigma > 0.0) ? VarState::kAtUpper : VarState::kAtLower;
    xb_ -= (sigma * t_bound) * w;
    degenerate_run_ = 0;
    return StepResult::kStepped;
  }
  const double t_step = best_t;

  // Both selection paths floor the pivot magnitude already; anything
  // smaller than this means the basis is effectively singular.
  if (std::abs(leave_pivot) < 1e-11) return StepResult::kFailed;

  // Pivot: entering replaces basis_[leave_row].
  const int leave = basis_[static_cast<std::size_t>(leave_row)];
  const double enter_val = nonbasic_value(enter) + sigma * t_step;
  xb_ -= (sigma * t_step) * w;
  state_[static_cast<std::size_t>(leave)] =
      (sigma * leave_pivot > 0.0) ? VarState::kAtLower : VarState::kAtUpper;
  if (!finite(nonbasic_value(leave))) {
    // A free variable leaving the basis rests at value 0.
    state_[static_cast<std::size_t>(leave)] = VarState::kFree;
  }
  basis_[static_cast<std::size_t>(leave_row)] = enter;
  state_[static_cast<std::size_t>(enter)] = VarState::kBasic;
  xb_[leave_row] = enter_val;

  // Product-form update of the basis inverse.
  Binv_.row(leave_row) /= leave_pivot;
  for (int i = 0; i < m_; ++i) {
    if (i == leave_row) continue;
    const double f = w[i];
    if (f != 0.0) Binv_.row(i) -= f * Binv_.row(leave_row);
  }

  degenerate_run_ = (t_step <= kDegenerateStep) ? degenerate_run_ + 1 : 0;
  if (++pivots_since_refactor_ >= opts_.refactor_interval) {
    if (!refactor()) return StepResult::kFailed;
    compute_basic_values();
  }
  return StepResult::kStepped;
}

Status SimplexSolver::run_phase(const Eigen::VectorXd& cost, int max_iters,
                                int* iters, bool force_bland) {
  degenerate_run_ = 0;
  for (int it = 0; it < max_iters; ++it) {
    const bool bland = force_bland || degenerate_run_ >= kDegenerateLimit;
    StepResult r = step(cost, bland);
    ++*iters;
    if (r == StepResult::kOptimal) {
      // Only accept optimality certified on a freshly rebuilt inverse; a
      // drifted one can misprice and stop early.
      if (pivots_since_refactor_ == 0) return Status::kOptimal;
      if (!refactor()) return Status::kNumericFailure;
      compute_basic_values();
      continue;
    }
    if (r == StepResult::kUnbounded) return Status::kUnbounded;
    if (r == StepResult::kFailed) {
      // One salvage attempt: rebuild the inverse and retry the step.
      if (!refactor()) return Status::kNumericFailure;
      compute_basic_values();
      r = step(cost, bland);
      if (r == StepResult::kFailed) return Status::kNumericFailure;
      if (r == StepResult::kOptimal) return Status::kOptimal;
      if (r == StepResult::kUnbounded) return Status::kUnbounded;
    }
  }
  return Status::kNumericFailure;  // iteration limit: treat as numeric trouble
}

namespace {

// Deterministic per-variable offsets in [1e-10, 2e-10] used to expand the
// variable boxes on the last-resort rungs. Expanding (never shrinking)
// bounds breaks the bound degeneracy that stalls the pivot sequence while
// keeping every feasible point feasible, so verdicts are preserved; the
// optimum moves by less than the final certification tolerance.
double bound_jitter(int j, std::uint32_t salt) {
  const std::uint32_t h = (static_cast<std::uint32_t>(j) + salt) * 2654435761u;
  return 1e-10 * (1.0 + static_cast<double>(h % 97u) / 96.0);
}

}  // namespace

Solution SimplexSolver::solve(const LinearProgram& lp) {
  lp.validate();
  // Escalating cold attempts: each rung reaches the same optimum along a
  // different pivot path — refactoring more often, switching to Bland's
  // rule, finally expanding the bound boxes by ~1e-10 to break degenerate
  // faces — so one hard numeric failure does not sink the solve.
  struct Rung { int refactor_interval; bool bland; bool perturb; };
  const Rung ladder[] = {
      {opts_.refactor_interval, false, false},
      {std::min(opts_.refactor_interval, 25), false, false},
      {10, true, false},
      {10, false, true},
      {10, true, true},
  };
  const SolverOptions saved = opts_;
  Solution out;
  for (const Rung& rung : ladder) {
    opts_.refactor_interval = rung.refactor_interval;
    reset();
    if (rung.perturb) {
      LinearProgram jittered = lp;
      for (Eigen::Index j = 0; j < lp.num_vars(); ++j) {
        if (finite(jittered.lower[j])) {
          jittered.lower[j] -= bound_jitter(static_cast<int>(j), 0x9e37u);
        }
        if (finite(jittered.upper[j])) {
          jittered.upper[j] += bound_jitter(static_cast<int>(j), 0x85ebu);
        }
      }
      out = solve_attempt(jittered, rung.bland);
      if (out.status == Status::kOptimal) {
        // Snap the hairline bound excess back into the requested box.
        for (Eigen::Index j = 0; j < lp.num_vars(); ++j) {
          if (finite(lp.lower[j]) && out.x[j] < lp.lower[j]) out.x[j] = lp.lower[j];
          if (finite(lp.upper[j]) && out.x[j] > lp.upper[j]) out.x[j] = lp.upper[j];
        }
        out.objective = lp.objective.dot(out.x);
      }
    } else {
      out = solve_attempt(lp, rung.bland);
    }
    if (out.status != Status::kNumericFailure) break;
  }
  opts_ = saved;
  return out;
}

Solution SimplexSolver::solve_attempt(const LinearProgram& lp, bool force_bland) {
  load(lp);

  // Start with every structural/slack variable at its bound nearest zero
  // and one signed artificial per row carrying the residual.
  state_.assign(static_cast<std::size_t>(nw_ + m_), VarState::kAtLower);
  for (int j = 0; j < nw_; ++j) {
    if (finite(lo_[j])) state_[static_cast<std::size_t>(j)] = VarState::kAtLower;
    else if (finite(up_[j])) state_[static_cast<std::size_t>(j)] = VarState::kAtUpper;
    else state_[static_cast<std::size_t>(j)] = VarState::kFree;
  }
  Eigen::VectorXd resid = b_;
  for (int j = 0; j < nw_; ++j) {
    double v = nonbasic_value(j);
    if (v != 0.0) resid -= v * A_.col(j);
  }
  art_sign_.assign(static_cast<std::size_t>(m_), 1.0);
  basis_.resize(static_cast<std::size_t>(m_));
  xb_.resize(m_);
  for (int i = 0; i < m_; ++i) {
    art_sign_[static_cast<std::size_t>(i)] = (resid[i] < 0.0) ? -1.0 : 1.0;
    basis_[static_cast<std::size_t>(i)] = nw_ + i;
    state_[static_cast<std::size_t>(nw_ + i)] = VarState::kBasic;
    xb_[i] = std::abs(resid[i]);
  }
  Binv_ = Eigen::MatrixXd::Zero(m_, m_);
  for (int i = 0; i < m_; ++i) Binv_(i, i) = art_sign_[static_cast<std::size_t>(i)];
  pivots_since_refactor_ = 0;

  const int max_iters = (opts_.max_iterations > 0)
                            ? opts_.max_iterations
                            : 10000 + 100 * (m_ + nw_);
  int iters = 0;

  // Phase 1: drive the artificial variables to zero. Price with a much
  // tighter tolerance than phase 2: near-degenerate geometries leave
  // descent directions whose reduced cost is far below the general
  // tolerance, and stopping on them misreports feasible systems.
  Eigen::VectorXd phase1_cost = Eigen::VectorXd::Zero(nw_ + m_);
  phase1_cost.tail(m_).setOnes();
  const double saved_tol = opts_.optimality_tol;
  opts_.optimality_tol = std::min(saved_tol, 1e-12);
  Status st = run_phase(phase1_cost, max_iters, &iters, force_bland);
  opts_.optimality_tol = saved_tol;
  if (st == Status::kNumericFailure) {
    Solution s; s.status = st; s.iterations = iters; return s;
  }
  if (st == Status::kUnbounded) {
    // Phase-1 objective is bounded below by zero; this is numeric trouble.
    Solution s; s.status = Status::kNumericFailure; s.iterations = iters; return s;
  }
  // Residual artificial mass, expressed as constraint violation in the
  // caller's units (scaled rows carry scaled artificials).
  double art_total = 0.0;
  for (int i = 0; i < m_; ++i) {
    const int bj = basis_[static_cast<std::size_t>(i)];
    if (bj >= nw_) art_total += std::abs(xb_[i]) / rscale_[bj - nw_];
  }
  for (int j = nw_; j < nw_ + m_; ++j) {
    if (state_[static_cast<std::size_t>(j)] != VarState::kBasic) {
      art_total += std::abs(nonbasic_value(j)) / rscale_[j - nw_];
    }
  }
  // Three-way verdict on the leftover artificial mass: proceed when it is
  // within the final certification tolerance (the answer is then checked
  // against the true constraints anyway), call macroscopic mass infeasible,
  // and treat the gray band as numeric trouble rather than guessing.
  if (art_total > 1e-5) {
    Solution s; s.status = Status::kInfeasible; s.iterations = iters; return s;
  }
  if (art_total > 1e-6) {
    Solution s; s.status = Status::kNumericFailure; s.iterations = iters; return s;
  }
  // Pin the artificials at zero for phase 2.
  for (int j = nw_; j < nw_ + m_; ++j) {
    lo_[j] = 0.0; up_[j] = 0.0;
    if (state_[static_cast<std::size_t>(j)] != VarState::kBasic) {
      state_[static_cast<std::size_t>(j)] = VarState::kAtLower;
    }
  }

  st = run_phase(c_, max_iters, &iters, force_bland);
  if (st == Status::kUnbounded) {
    Solution s; s.status = st; s.iterations = iters; return s;
  }
  if (st != Status::kOptimal) {
    Solution s; s.status = Status::kNumericFailure; s.iterations = iters; return s;
  }
  return finish(lp, iters);
}

Solution SimplexSolver::resolve(const LinearProgram& lp) {
  if (!have_basis_ || n_ != lp.num_vars() || n_eq_ != lp.num_eq() ||
      n_in_ != lp.num_ineq()) {
    return solve(lp);
  }
  lp.validate();
  load(lp);
  // Artificials stay pinned at zero in a warm phase 2.
  for (int j = nw_; j < nw_ + m_; ++j) { lo_[j] = 0.0; up_[j] = 0.0; }
  // Nonbasic variables must sit on a finite bound; the coefficient change
  // never moves bounds in our problems, but guard anyway.
  for (int j = 0; j < nw_; ++j) {
    VarState& st = state_[static_cast<std::size_t>(j)];
    if (st == VarState::kAtLower && !finite(lo_[j])) st = finite(up_[j]) ? VarState::kAtUpper : VarState::kFree;
    if (st == VarState::kAtUpper && !finite(up_[j])) st = finite(lo_[j]) ? VarState::kAtLower : VarState::kFree;
  }
  if (!refactor()) return solve(lp);
  compute_basic_values();
  if (!basis_feasible(1e-7)) return solve(lp);

  const int max_iters = (opts_.max_iterations > 0)
                            ? opts_.max_iterations
                            : 10000 + 100 * (m_ + nw_);
  int iters = 0;
  Status st = run_phase(c_, max_iters, &iters, /*force_bland=*/false);
  if (st == Status::kUnbounded) {
    Solution s; s.status = st; s.iterations = iters; return s;
  }
  if (st != Status::kOptimal) return solve(lp);
  Solution s = finish(lp, iters);
  if (s.status == Status::kNumericFailure) return solve(lp);
  return s;
}

Solution SimplexSolver::finish(const LinearProgram& lp, int iterations) {
  // Tighten the basic values once more before reading the answer.
  if (!refactor()) {
    Solution s; s.status = Status::kNumericFailure; s.iterations = iterations; return s;
  }
  compute_basic_values();

  Eigen::VectorXd full(nw_ + m_);
  for (int j = 0; j < nw_ + m_; ++j) {
    full[j] = (state_[static_cast<std::size_t>(j)] == VarState::kBasic) ? 0.0 : nonbasic_value(j);
  }
  for (int i = 0; i < m_; ++i) full[basis_[static_cast<std::size_t>(i)]] = xb_[i];

  Solution s;
  s.iterations = iterations;
  s.x = full.head(n_).cwiseProduct(cscale_.head(n_));  // back to user units
  // Clamp round-off overshoot back into the box.
  for (int j = 0; j < n_; ++j) {
    if (finite(lp.lower[j]) && s.x[j] < lp.lower[j]) s.x[j] = lp.lower[j];
    if (finite(lp.upper[j]) && s.x[j] > lp.upper[j]) s.x[j] = lp.upper[j];
  }

  // Certify the answer: residuals beyond tolerance are a numeric failure,
  // never silently reported as optimal.
  double resid = 0.0;
  if (n_eq_ > 0) {
    resid = (lp.eq_matrix * s.x - lp.eq_rhs).cwiseAbs().maxCoeff();
  }
  if (n_in_ > 0) {
    Eigen::VectorXd slack = lp.ineq_rhs - lp.ineq_matrix * s.x;
    double worst = -slack.minCoeff();
    resid = std::max(resid, worst);
  }
  if (!std::isfinite(resid) || resid > 1e-6) {
    s.status = Status::kNumericFailure;
    return s;
  }
  s.status = Status::kOptimal;
  s.objective = lp.objective.dot(s.x);
  have_basis_ = true;
  return s;
}

Solution solve(const LinearProgram& lp, SolverOptions opts) {
  SimplexSolver solver(opts);
  return solver.solve(lp);
}

namespace {

std::string num17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_terms(std::ostream& os, const Eigen::RowVectorXd& row) {
  bool first = true;
  for (Eigen::Index j = 0; j < row.size(); ++j) {
    const double v = row[j];
    if (v == 0.0) continue;
    if (first) {
      os << (v < 0.0 ? "- " : "") << num17(std::abs(v)) << " x" << j;
      first = false;
    } else {
      os << (v < 0.0 ? " - " : " + ") << num17(std::abs(v)) << " x" << j;
    }
  }
  if (first) os << "0 x0";
}

}  // namespace

void write_lp_text(const LinearProgram& lp, std::ostream& os) {
  lp.validate();
  os << "\\ dense linear program, " << lp.num_vars() << " variables, "
     << lp.num_eq() << " equalities, " << lp.num_ineq() << " inequalities\n";
  os << "Minimize\n obj: ";
  write_terms(os, lp.objective.transpose());
  os << "\nSubject To\n";
  for (Eigen::Index i = 0; i < lp.num_eq(); ++i) {
    os << " e" << i << ": ";
    write_terms(os, lp.eq_matrix.row(i));
    os << " = " << num17(lp.eq_rhs[i]) << "\n";
  }
  for (Eigen::Index i = 0; i < lp.num_ineq(); ++i) {
    os << " i" << i << ": ";
    write_terms(os, lp.ineq_matrix.row(i));
    os << " <= " << num17(lp.ineq_rhs[i]) << "\n";
  }
  os << "Bounds\n";
  for (Eigen::Index j = 0; j < lp.num_vars(); ++j) {
    const double lo = lp.lower[j], up = lp.upper[j];
    if (!finite(lo) && !finite(up)) {
      os << " x" << j << " free\n";
    } else if (lo == up) {
      os << " x" << j << " = " << num17(lo) << "\n";
    } else if (!finite(lo)) {
      os << " -infinity <= x" << j << " <= " << num17(up) << "\n";
    } else if (!finite(up)) {
      if (lo != 0.0) os << " x" << j << " >= " << num17(lo) << "\n";
      // lo == 0, up == inf is the LP-format default; nothing to print.
    } else {
      os << " " << num17(lo) << " <= x" << j << " <= " << num17(up) << "\n";
    }
  }
  os << "End\n";
}

}  // namespace belltrace::lp
