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

#ifndef BELLTRACE_ORACLES_HPP
#define BELLTRACE_ORACLES_HPP

#include <array>
#include <utility>
#include <vector>

#include "belltrace/lp.hpp"
#include "belltrace/scenario.hpp"

namespace belltrace::lp {

// ---------------------------------------------------------------------------
// Exact nonclassicality quantifier for two-party full-correlator points.
//
// NL(c) is the minimum, over deterministic-strategy mixtures p = S*lambda
// and no-signaling completions q of the correlators c, of
//     (1 / (2 m^2)) * sum_{a,b,x,y} | q(ab|xy) - p(ab|xy) |,
// i.e. the trace distance to the closest classical behavior averaged over
// settings, computed as a single linear program.
// ---------------------------------------------------------------------------

struct NLResult {
  double nl = 0.0;
  Eigen::VectorXd local_weights;  // 4^m entries, >= 0, sums to 1
  Eigen::VectorXd completion;     // the optimal completion q, 4 m^2 entries
  int lp_iterations = 0;
};

// Builds the distance program: variables [t | q | lambda], minimize sum(t)
// subject to  -t <= q - S*lambda <= t,  q normalized per setting pair,
// q non-signaling, correlators of q equal to c, sum(lambda) = 1,
// lambda >= 0, q >= 0.
LinearProgram build_nl_lp(const scenario::CorrelatorVector& c);

// Computes NL(c). A solver may be passed in to allow warm starts across a
// stream of same-shape calls. Throws NumericError if the solve fails.
NLResult nl_distance(const scenario::CorrelatorVector& c,
                     SimplexSolver* solver = nullptr);

// ---------------------------------------------------------------------------
// Exact two-source (bilocality) quantifier for the three-party line
// scenario.
//
// Behaviors compatible with the observed correlators are represented by a
// distribution q over the 64 joint outcome assignments. For a fixed
// first-party marginal table f(nu) (nu = probability that both first-party
// outcomes are +1), the quantifier is
//    NBL = min_nu min_q (1/2) sum_{a0,a1,c0,c1}
//          | q(a0,a1,c0,c1) - f_{a0,a1}(nu) * q(c0,c1) |
// subject to q reproducing the observed correlators. The inner problem is
// an LP; the outer one-dimensional minimization is a uniform sweep of nu
// over its feasible interval.
// ---------------------------------------------------------------------------

// Entries of the first-party outcome table parametrized by nu, ordered
// [f(++), f(+-), f(-+), f(--)] (index a0_bit*2 + a1_bit; bit 0 = outcome +1):
//   f(++) = nu
//   f(+-) = (1 + <A_0>)/2 - nu
//   f(-+) = (1 + <A_1>)/2 - nu
//   f(--) = 1 - f(++) - f(+-) - f(-+) = nu - (<A_0> + <A_1>)/2
std::array<double, 4> marginal_qfunctions(double a0, double a1, double nu);

struct NuBounds {
  double lo = 0.0;
  double hi = 0.0;
};

struct NBLOptions {
  int grid_points = 1000;    // inclusive resolution of the nu sweep
  double early_exit = 1e-9;  // stop once a per-nu objective drops this low
  bool record_profile = false;
};

struct NBLResult {
  double nbl = 0.0;
  double nu_star = 0.0;   // sweep argmin
  NuBounds nu_range;
  int lp_solves = 0;
  int lp_iterations = 0;
  bool early_exit = false;
  // (nu, per-nu distance) pairs when record_profile is set
  std::vector<std::pair<double, double>> profile;
};

// Ten-feature mode: all eight three-way correlators plus both first-party
// marginals are constrained.
NBLResult nbl_distance(const scenario::TripartiteCorrelators& t,
                       const NBLOptions& opts = NBLOptions());

// Four-feature mode: only the aggregates (I, J) and the first-party
// marginals are constrained.
NBLResult nbl_distance_ij(double i, double j, double a0, double a1,
                          const NBLOptions& opts = NBLOptions());

// Feasibility of the constraint set (is there any assignment distribution
// with these observed values?). Throws NumericError on solver failure.
bool nbl_feasible(const scenario::TripartiteCorrelators& t);
bool nbl_feasible_ij(double i, double j, double a0, double a1);

// Feasible interval of nu for a given constraint set, from a pair of LPs
// minimizing / maximizing q(a0=+, a1=+). Throws UsageError when the
// constraints are infeasible.
NuBounds nu_bounds(const scenario::TripartiteCorrelators& t);
NuBounds nu_bounds_ij(double i, double j, double a0, double a1);

// Distance program at fixed nu (exposed for LP text dumps):
// variables [t (16) | q (64) | p (64)], minimize sum(t) subject to
// -t <= M(nu) q <= t, A q = p, sum(q) = 1, correlator rows on p,
// q(a0=+,a1=+) = nu (pins the first-party marginal to f(nu)), q,p >= 0.
LinearProgram build_nbl_lp(const scenario::TripartiteCorrelators& t, double nu);
LinearProgram build_nbl_lp_ij(double i, double j, double a0, double a1,
                              double nu);

}  // namespace belltrace::lp

#endif  // BELLTRACE_ORACLES_HPP
