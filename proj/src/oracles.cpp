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

#include "belltrace/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "belltrace/errors.hpp"

namespace belltrace::lp {

using scenario::BipartiteBehavior;

// ---------------------------------------------------------------------------
// Two-party quantifier
// ---------------------------------------------------------------------------

LinearProgram build_nl_lp(const scenario::CorrelatorVector& c) {
  c.validate();
  const int m = c.m;
  const int nb = 4 * m * m;                 // behavior entries
  const int ns = 1 << (2 * m);              // deterministic strategies
  const int n = nb + nb + ns;               // [t | q | lambda]
  const int off_t = 0, off_q = nb, off_l = 2 * nb;

  const auto S = scenario::build_strategy_matrix(m);
  const auto M = scenario::build_correlator_map(m);

  LinearProgram lp;
  lp.objective = Eigen::VectorXd::Zero(n);
  lp.objective.segment(off_t, nb).setOnes();

  // Inequalities:  q - S*lambda - t <= 0  and  -q + S*lambda - t <= 0.
  lp.ineq_matrix = Eigen::MatrixXd::Zero(2 * nb, n);
  lp.ineq_rhs = Eigen::VectorXd::Zero(2 * nb);
  for (int r = 0; r < nb; ++r) {
    lp.ineq_matrix(r, off_t + r) = -1.0;
    lp.ineq_matrix(r, off_q + r) = 1.0;
    lp.ineq_matrix.row(r).segment(off_l, ns) = -S.entries.row(r);
    lp.ineq_matrix(nb + r, off_t + r) = -1.0;
    lp.ineq_matrix(nb + r, off_q + r) = -1.0;
    lp.ineq_matrix.row(nb + r).segment(off_l, ns) = S.entries.row(r);
  }

  // Equalities: per-setting normalization, no-signaling, correlators of q,
  // and normalization of lambda.
  const int n_norm = m * m;
  const int n_ns = 2 * m * (m - 1);
  const int n_cor = m * m;
  const int n_eq = n_norm + n_ns + n_cor + 1;
  lp.eq_matrix = Eigen::MatrixXd::Zero(n_eq, n);
  lp.eq_rhs = Eigen::VectorXd::Zero(n_eq);
  int row = 0;
  for (int x = 0; x < m; ++x) {
    for (int y = 0; y < m; ++y) {
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
          lp.eq_matrix(row, off_q + BipartiteBehavior::index(m, a, b, x, y)) = 1.0;
      lp.eq_rhs[row] = 1.0;
      ++row;
    }
  }
  // First party's outcome marginal p(a=0 | x) must match between y and y=0
  // (the a=1 rows follow from normalization); symmetrically for the second
  // party.
  for (int x = 0; x < m; ++x) {
    for (int y = 1; y < m; ++y) {
      for (int b = 0; b < 2; ++b) {
        lp.eq_matrix(row, off_q + BipartiteBehavior::index(m, 0, b, x, y)) += 1.0;
        lp.eq_matrix(row, off_q + BipartiteBehavior::index(m, 0, b, x, 0)) -= 1.0;
      }
      ++row;
    }
  }
  for (int y = 0; y < m; ++y) {
    for (int x = 1; x < m; ++x) {
      for (int a = 0; a < 2; ++a) {
        lp.eq_matrix(row, off_q + BipartiteBehavior::index(m, a, 0, x, y)) += 1.0;
        lp.eq_matrix(row, off_q + BipartiteBehavior::index(m, a, 0, 0, y)) -= 1.0;
      }
      ++row;
    }
  }
  for (int r = 0; r < n_cor; ++r) {
    lp.eq_matrix.row(row).segment(off_q, nb) = M.matrix.row(r);
    lp.eq_rhs[row] = c.values[r];
    ++row;
  }
  lp.eq_matrix.row(row).segment(off_l, ns).setOnes();
  lp.eq_rhs[row] = 1.0;

  lp.lower = Eigen::VectorXd::Zero(n);
  lp.upper = Eigen::VectorXd::Constant(n, 1.0);
  lp.upper.segment(off_t, nb).setConstant(2.0);  // |q - p| <= 2 entrywise
  return lp;
}

NLResult nl_distance(const scenario::CorrelatorVector& c, SimplexSolver* solver) {
  const LinearProgram lp = build_nl_lp(c);
  Solution sol;
  if (solver != nullptr) {
    sol = solver->resolve(lp);
  } else {
    sol = lp::solve(lp);
  }
  if (sol.status != Status::kOptimal) {
    // The program is feasible for every correlator point in [-1,1]^(m^2)
    // (the unbiased completion always exists), so anything but optimal is
    // a numeric failure.
    throw NumericError(std::string("nl_distance: solver returned ") +
                       to_string(sol.status));
  }
  const int m = c.m;
  const int nb = 4 * m * m;
  const int ns = 1 << (2 * m);
  NLResult r;
  r.nl = std::max(0.0, sol.objective / (2.0 * m * m));
  r.completion = sol.x.segment(nb, nb);
  r.local_weights = sol.x.segment(2 * nb, ns);
  r.lp_iterations = sol.iterations;
  return r;
}

// ---------------------------------------------------------------------------
// Three-party quantifier
// ---------------------------------------------------------------------------

std::array<double, 4> marginal_qfunctions(double a0, double a1, double nu) {
  return {nu, (1.0 + a0) / 2.0 - nu, (1.0 + a1) / 2.0 - nu,
          nu - (a0 + a1) / 2.0};
}

namespace {

constexpr int kNumT = 16;
constexpr int kNumQ = scenario::kAssignmentCount;   // 64
constexpr int kNumP = scenario::kTriBehaviorSize;   // 64

// Column sets of the assignment space grouped by the 16 (a0,a1,c0,c1)
// joint outcomes and by the 4 (c0,c1) outcomes.
struct MatchTables {
  // ac_match[r][j] with r = a0 + 2*a1 + 4*c0 + 8*c1
  std::array<std::array<bool, kNumQ>, kNumT> ac;
  std::array<std::array<bool, kNumQ>, kNumT> c;
  MatchTables() {
    for (int r = 0; r < kNumT; ++r) {
      const int a0 = r & 1, a1 = (r >> 1) & 1, c0 = (r >> 2) & 1, c1 = (r >> 3) & 1;
      for (int j = 0; j < kNumQ; ++j) {
        const int ja0 = j & 1, ja1 = (j >> 1) & 1;
        const int jc0 = (j >> 4) & 1, jc1 = (j >> 5) & 1;
        ac[static_cast<std::size_t>(r)][static_cast<std::size_t>(j)] =
            (ja0 == a0 && ja1 == a1 && jc0 == c0 && jc1 == c1);
        c[static_cast<std::size_t>(r)][static_cast<std::size_t>(j)] =
            (jc0 == c0 && jc1 == c1);
      }
    }
  }
};

const MatchTables& match_tables() {
  static const MatchTables t;
  return t;
}

// Shared scaffold of the fixed-nu distance program; only the coefficients
// of q in the +-t inequality rows depend on nu.
LinearProgram build_nbl_scaffold(const Eigen::MatrixXd& cor_rows,
                                 const Eigen::VectorXd& cor_rhs) {
  const int n = kNumT + kNumQ + kNumP;  // [t | q | p]
  const int off_t = 0, off_q = kNumT, off_p = kNumT + kNumQ;

  LinearProgram lp;
  lp.objective = Eigen::VectorXd::Zero(n);
  lp.objective.segment(off_t, kNumT).setOnes();

  lp.ineq_matrix = Eigen::MatrixXd::Zero(2 * kNumT, n);
  lp.ineq_rhs = Eigen::VectorXd::Zero(2 * kNumT);
  for (int r = 0; r < kNumT; ++r) {
    lp.ineq_matrix(r, off_t + r) = -1.0;
    lp.ineq_matrix(kNumT + r, off_t + r) = -1.0;
  }

  const int n_cor = static_cast<int>(cor_rows.rows());
  lp.eq_matrix = Eigen::MatrixXd::Zero(kNumP + 2 + n_cor, n);
  lp.eq_rhs = Eigen::VectorXd::Zero(kNumP + 2 + n_cor);
  const Eigen::MatrixXd A = scenario::assignment_marginalization_matrix();
  lp.eq_matrix.block(0, off_q, kNumP, kNumQ) = A;
  lp.eq_matrix.block(0, off_p, kNumP, kNumP) =
      -Eigen::MatrixXd::Identity(kNumP, kNumP);
  lp.eq_matrix.row(kNumP).segment(off_q, kNumQ).setOnes();
  lp.eq_rhs[kNumP] = 1.0;
  lp.eq_matrix.block(kNumP + 1, off_p, n_cor, kNumP) = cor_rows;
  lp.eq_rhs.segment(kNumP + 1, n_cor) = cor_rhs;
  // Last row pins the first party's (+1,+1) assignment mass to the sweep
  // parameter: sum_{j: a0=a1=+1} q_j = nu.  Together with the first-party
  // expectation rows and normalization this forces the whole first-party
  // assignment marginal of q to equal the table the objective compares
  // against; without it the program drifts to representations whose
  // marginal differs from that table and under-estimates the distance.
  // The rhs is written by set_nbl_nu at every sweep step.
  for (int j = 0; j < kNumQ; ++j) {
    if ((j & 3) == 0) lp.eq_matrix(kNumP + 1 + n_cor, off_q + j) = 1.0;
  }

  lp.lower = Eigen::VectorXd::Zero(n);
  lp.upper = Eigen::VectorXd::Constant(n, 1.0);
  lp.upper.segment(off_t, kNumT).setConstant(2.0);
  return lp;
}

// Writes the nu-dependent q coefficients of the +-t rows and the rhs of the
// marginal-pinning equality (the last row) in place.
void set_nbl_nu(LinearProgram& lp, double a0, double a1, double nu) {
  lp.eq_rhs[lp.eq_rhs.size() - 1] = nu;
  const auto f = marginal_qfunctions(a0, a1, nu);
  const auto& mt = match_tables();
  for (int r = 0; r < kNumT; ++r) {
    const double fr = f[static_cast<std::size_t>((r & 1) * 2 + ((r >> 1) & 1))];
    for (int j = 0; j < kNumQ; ++j) {
      double v = 0.0;
      if (mt.c[static_cast<std::size_t>(r)][static_cast<std::size_t>(j)]) {
        v = -fr;
        if (mt.ac[static_cast<std::size_t>(r)][static_cast<std::size_t>(j)]) v += 1.0;
      }
      lp.ineq_matrix(r, kNumT + j) = v;
      lp.ineq_matrix(kNumT + r, kNumT + j) = -v;
    }
  }
}

// Reduced feasibility / nu-range program over q alone.
LinearProgram build_q_program(const Eigen::MatrixXd& cor_rows,
                              const Eigen::VectorXd& cor_rhs) {
  const Eigen::MatrixXd A = scenario::assignment_marginalization_matrix();
  const int n_cor = static_cast<int>(cor_rows.rows());
  LinearProgram lp;
  lp.objective = Eigen::VectorXd::Zero(kNumQ);
  lp.eq_matrix = Eigen::MatrixXd::Zero(n_cor + 1, kNumQ);
  lp.eq_matrix.topRows(n_cor) = cor_rows * A;
  lp.eq_matrix.row(n_cor).setOnes();
  lp.eq_rhs = Eigen::VectorXd::Zero(n_cor + 1);
  lp.eq_rhs.head(n_cor) = cor_rhs;
  lp.eq_rhs[n_cor] = 1.0;
  lp.lower = Eigen::VectorXd::Zero(kNumQ);
  lp.upper = Eigen::VectorXd::Constant(kNumQ, 1.0);
  return lp;
}

bool q_program_feasible(const Eigen::MatrixXd& cor_rows,
                        const Eigen::VectorXd& cor_rhs) {
  LinearProgram lp = build_q_program(cor_rows, cor_rhs);
  Solution s = lp::solve(lp);
  if (s.status == Status::kOptimal) return true;
  if (s.status == Status::kInfeasible) return false;
  throw NumericError(std::string("source-model feasibility check: ") +
                     to_string(s.status));
}

NuBounds nu_bounds_impl(const Eigen::MatrixXd& cor_rows,
                        const Eigen::VectorXd& cor_rhs) {
  LinearProgram lp = build_q_program(cor_rows, cor_rhs);
  // nu = total weight of assignments with both first-party outcomes +1.
  for (int j = 0; j < kNumQ; ++j) {
    lp.objective[j] = ((j & 3) == 0) ? 1.0 : 0.0;
  }
  Solution smin = lp::solve(lp);
  if (smin.status == Status::kInfeasible) {
    throw UsageError("nu_bounds: correlators admit no assignment model");
  }
  if (smin.status != Status::kOptimal) {
    throw NumericError(std::string("nu_bounds: ") + to_string(smin.status));
  }
  lp.objective = -lp.objective;
  Solution smax = lp::solve(lp);
  if (smax.status != Status::kOptimal) {
    throw NumericError(std::string("nu_bounds: ") + to_string(smax.status));
  }
  NuBounds b;
  b.lo = std::max(0.0, smin.objective);
  b.hi = std::max(b.lo, -smax.objective);
  return b;
}

NBLResult nbl_sweep(const Eigen::MatrixXd& cor_rows,
                    const Eigen::VectorXd& cor_rhs, double a0, double a1,
                    const NBLOptions& opts) {
  if (opts.grid_points < 2) {
    throw ConfigError("nbl: grid_points must be at least 2");
  }
  NBLResult res;
  res.nu_range = nu_bounds_impl(cor_rows, cor_rhs);

  LinearProgram lp = build_nbl_scaffold(cor_rows, cor_rhs);
  SimplexSolver solver;

  const double span = res.nu_range.hi - res.nu_range.lo;
  const int pts = (span < 1e-14) ? 1 : opts.grid_points;
  double best_obj = kInf;
  if (opts.record_profile) res.profile.reserve(static_cast<std::size_t>(pts));
  for (int k = 0; k < pts; ++k) {
    const double nu =
        (pts == 1) ? res.nu_range.lo
                   : res.nu_range.lo + span * k / static_cast<double>(pts - 1);
    set_nbl_nu(lp, a0, a1, nu);
    Solution s = (k == 0) ? solver.solve(lp) : solver.resolve(lp);
    if (s.status != Status::kOptimal && span > 0.0) {
      // Feasibility holds at every nu in the range, so a failure here is
      // numeric — typically a degenerate face right at a grid point. The
      // profile has bounded slope, so answering a hair inside the interval
      // is exact far beyond the grid resolution.
      const double nudge = 1e-9 * span * (k * 2 < pts ? 1.0 : -1.0);
      set_nbl_nu(lp, a0, a1, nu + nudge);
      s = solver.solve(lp);
    }
    if (s.status != Status::kOptimal) {
      throw NumericError(std::string("nbl: sweep solve returned ") +
                         to_string(s.status) + " at nu=" + std::to_string(nu));
    }
    ++res.lp_solves;
    res.lp_iterations += s.iterations;
    const double dist = std::max(0.0, s.objective) / 2.0;
    if (opts.record_profile) res.profile.emplace_back(nu, dist);
    if (s.objective < best_obj) {
      best_obj = s.objective;
      res.nbl = dist;
      res.nu_star = nu;
    }
    if (s.objective <= opts.early_exit) {
      res.nbl = 0.0;
      res.nu_star = nu;
      res.early_exit = true;
      break;
    }
  }
  return res;
}

Eigen::VectorXd ij_rhs(double i, double j, double a0, double a1) {
  Eigen::VectorXd v(4);
  v << i, j, a0, a1;
  for (int k = 0; k < 4; ++k) {
    if (!std::isfinite(v[k]) || v[k] < -1.0 || v[k] > 1.0) {
      throw UsageError("aggregate features must lie in [-1, 1]");
    }
  }
  return v;
}

}  // namespace

NBLResult nbl_distance(const scenario::TripartiteCorrelators& t,
                       const NBLOptions& opts) {
  t.validate();
  return nbl_sweep(scenario::tripartite_correlator_map(), t.features(), t.a0,
                   t.a1, opts);
}

NBLResult nbl_distance_ij(double i, double j, double a0, double a1,
                          const NBLOptions& opts) {
  return nbl_sweep(scenario::ij_correlator_map(), ij_rhs(i, j, a0, a1), a0, a1,
                   opts);
}

bool nbl_feasible(const scenario::TripartiteCorrelators& t) {
  t.validate();
  return q_program_feasible(scenario::tripartite_correlator_map(), t.features());
}

bool nbl_feasible_ij(double i, double j, double a0, double a1) {
  return q_program_feasible(scenario::ij_correlator_map(), ij_rhs(i, j, a0, a1));
}

NuBounds nu_bounds(const scenario::TripartiteCorrelators& t) {
  t.validate();
  return nu_bounds_impl(scenario::tripartite_correlator_map(), t.features());
}

NuBounds nu_bounds_ij(double i, double j, double a0, double a1) {
  return nu_bounds_impl(scenario::ij_correlator_map(), ij_rhs(i, j, a0, a1));
}

LinearProgram build_nbl_lp(const scenario::TripartiteCorrelators& t, double nu) {
  t.validate();
  LinearProgram lp =
      build_nbl_scaffold(scenario::tripartite_correlator_map(), t.features());
  set_nbl_nu(lp, t.a0, t.a1, nu);
  return lp;
}

LinearProgram build_nbl_lp_ij(double i, double j, double a0, double a1,
                              double nu) {
  LinearProgram lp =
      build_nbl_scaffold(scenario::ij_correlator_map(), ij_rhs(i, j, a0, a1));
  set_nbl_nu(lp, a0, a1, nu);
  return lp;
}

}  // namespace belltrace::lp
