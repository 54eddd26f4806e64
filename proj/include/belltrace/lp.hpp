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

#ifndef BELLTRACE_LP_HPP
#define BELLTRACE_LP_HPP

#include <Eigen/Dense>
#include <iosfwd>
#include <limits>
#include <vector>

namespace belltrace::lp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Status { kOptimal, kInfeasible, kUnbounded, kNumericFailure };
const char* to_string(Status s);

// minimize  objective . x
// subject to  eq_matrix * x == eq_rhs
//             ineq_matrix * x <= ineq_rhs
//             lower <= x <= upper   (entries may be +-inf)
struct LinearProgram {
  Eigen::VectorXd objective;
  Eigen::MatrixXd eq_matrix;
  Eigen::VectorXd eq_rhs;
  Eigen::MatrixXd ineq_matrix;
  Eigen::VectorXd ineq_rhs;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  Eigen::Index num_vars() const { return objective.size(); }
  Eigen::Index num_eq() const { return eq_rhs.size(); }
  Eigen::Index num_ineq() const { return ineq_rhs.size(); }

  // Throws UsageError on inconsistent dimensions, non-finite matrix /
  // objective coefficients, NaN bounds, or lower > upper.
  void validate() const;
};

struct Solution {
  Status status = Status::kNumericFailure;
  double objective = std::numeric_limits<double>::quiet_NaN();
  Eigen::VectorXd x;  // structural variables; filled only when optimal
  int iterations = 0;
};

struct SolverOptions {
  // Bound / ratio-test tolerance and the certified residual tolerance.
  double feasibility_tol = 1e-9;
  // Reduced-cost threshold for declaring optimality.
  double optimality_tol = 1e-9;
  // 0 = automatic (scales with problem size).
  int max_iterations = 0;
  // Rebuild the basis inverse from scratch every this many pivots.
  int refactor_interval = 100;
};

// Two-phase primal simplex for dense LPs with general variable bounds.
// Keeps an explicit basis inverse with eta updates and periodic
// refactorization. An instance retains its final basis so that a sequence
// of structurally identical problems (same shapes, mildly perturbed
// coefficients) can be re-solved warm via resolve().
//
// Numeric trouble is always surfaced as Status::kNumericFailure (or an
// exception from validate()); it is never reported as infeasibility.
class SimplexSolver {
 public:
  explicit SimplexSolver(SolverOptions opts = SolverOptions());

  // Cold solve; discards any retained basis first.
  Solution solve(const LinearProgram& lp);

  // Warm solve: if the retained basis matches the shape of `lp` and is
  // still primal feasible after refactorization, phase 1 is skipped.
  // Falls back to a cold solve otherwise.
  Solution resolve(const LinearProgram& lp);

  void reset();

 private:
  enum class VarState : unsigned char { kBasic, kAtLower, kAtUpper, kFree };
  enum class StepResult { kStepped, kOptimal, kUnbounded, kFailed };

  void load(const LinearProgram& lp);
  bool refactor();
  void compute_basic_values();
  double nonbasic_value(int j) const;
  Eigen::VectorXd column(int j) const;
  StepResult step(const Eigen::VectorXd& cost, bool bland);
  Status run_phase(const Eigen::VectorXd& cost, int max_iters, int* iters,
                   bool force_bland);
  Solution solve_attempt(const LinearProgram& lp, bool force_bland);
  Solution finish(const LinearProgram& lp, int iterations);
  bool basis_feasible(double tol) const;

  SolverOptions opts_;

  // Working problem: n structural, n_in slacks, m artificials.
  int n_ = 0, n_eq_ = 0, n_in_ = 0, m_ = 0, nw_ = 0;
  Eigen::MatrixXd A_;  // m x nw (structural + slack columns)
  Eigen::VectorXd b_;
  Eigen::VectorXd c_;        // phase-2 costs, length nw + m
  Eigen::VectorXd lo_, up_;  // length nw + m
  std::vector<double> art_sign_;

  // Power-of-two equilibration applied by load(); solves run in the scaled
  // space, finish() maps back. Lossless and deterministic.
  Eigen::VectorXd rscale_, cscale_;

  std::vector<int> basis_;
  std::vector<VarState> state_;
  Eigen::VectorXd xb_;
  Eigen::MatrixXd Binv_;
  bool have_basis_ = false;
  int pivots_since_refactor_ = 0;
  int degenerate_run_ = 0;
};

// One-shot convenience wrapper around SimplexSolver::solve.
Solution solve(const LinearProgram& lp, SolverOptions opts = SolverOptions());

// Writes the program in LP text format (the CPLEX-style human-readable
// dialect) with variables named x0..x{n-1}.
void write_lp_text(const LinearProgram& lp, std::ostream& os);

}  // namespace belltrace::lp

#endif  // BELLTRACE_LP_HPP
