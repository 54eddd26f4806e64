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

#ifndef BELLTRACE_SCENARIO_HPP
#define BELLTRACE_SCENARIO_HPP

#include <Eigen/Dense>
#include <array>

namespace belltrace::scenario {

// ---------------------------------------------------------------------------
// Two-party scenario: two observers, m two-outcome measurements each.
//
// Index conventions used throughout:
//   * outcomes are stored as bits a,b in {0,1}; bit 0 means outcome +1 and
//     bit 1 means outcome -1, i.e. the sign value is 1 - 2*bit.
//   * a behavior p(ab|xy) is a vector of length 4*m*m with
//     index(a,b,x,y) = ((a*2 + b)*m + x)*m + y.
//   * a correlator vector <A_x B_y> has length m*m with index x*m + y.
//   * a deterministic strategy assigns an outcome bit to every setting of
//     both parties; strategies are indexed by alpha*2^m + beta, where alpha
//     and beta are the m-bit outcome words of the two parties (bit x of
//     alpha is the first party's outcome for setting x, least significant
//     bit first).
// ---------------------------------------------------------------------------

inline constexpr int kMinSettings = 2;
inline constexpr int kMaxSettings = 6;

// Full-correlator description of a two-party behavior.
struct CorrelatorVector {
  int m = 0;               // measurements per party
  Eigen::VectorXd values;  // m*m entries <A_x B_y> in [-1, 1], index x*m + y

  // Throws UsageError if sizes disagree or entries leave [-1, 1].
  void validate() const;
};

CorrelatorVector make_correlators(int m, const Eigen::VectorXd& values);

// Probability description of a two-party behavior.
struct BipartiteBehavior {
  int m = 0;
  Eigen::VectorXd p;  // 4*m*m entries, see index convention above

  static int index(int m, int a, int b, int x, int y) {
    return ((a * 2 + b) * m + x) * m + y;
  }
  double at(int a, int b, int x, int y) const { return p[index(m, a, b, x, y)]; }

  // Throws UsageError unless p is nonnegative, normalized per setting pair
  // and non-signaling (all up to `tol`).
  void validate(double tol = 1e-9) const;
};

// Matrix whose columns are the deterministic strategies of the m-setting
// scenario, expressed as behaviors: entry ((a,b,x,y), strategy) is 1 when
// the strategy outputs (a, b) on settings (x, y). Shape 4*m*m by 4^m.
// Throws ConfigError unless kMinSettings <= m <= kMaxSettings (the column
// count grows as 4^m; beyond m = 6 the matrix is no longer desk-sized).
struct StrategyMatrix {
  int m = 0;
  Eigen::MatrixXd entries;
};
StrategyMatrix build_strategy_matrix(int m);

// Linear map from behaviors to correlator vectors: row (x, y) holds
// (-1)^(a+b) at every column (a, b, x, y). Shape m*m by 4*m*m.
// Throws ConfigError for m < kMinSettings.
struct CorrelatorMap {
  int m = 0;
  Eigen::MatrixXd matrix;
};
CorrelatorMap build_correlator_map(int m);

// Canonical no-signaling completion of a correlator vector: uniform
// single-party marginals, p(ab|xy) = (1 + (-1)^(a+b) c_xy) / 4.
BipartiteBehavior behavior_from_correlators(const CorrelatorVector& c);

// The four symmetries of the two-setting Bell expression, obtained by
// placing the minus sign on each correlator in turn:
//   S_k(c) = | sum_xy s_xy c_xy |  with s_xy = -1 exactly at position k.
// Requires m == 2 (UsageError otherwise). Local behaviors satisfy
// max_k S_k <= 2; the algebraic maximum is 4.
std::array<double, 4> chsh_symmetries(const CorrelatorVector& c);

// ---------------------------------------------------------------------------
// Three-party line scenario: two end observers (first and third party) and
// one middle observer, each with two two-outcome measurements.
//
// Index conventions:
//   * p(abc|xyz) is a vector of length 64 with
//     index = tri_setting_index(x,y,z) * 8 + tri_outcome_index(a,b,c).
//   * an outcome assignment fixes the outcome bit of all six measurements
//     (a0, a1, b0, b1, c0, c1); assignments are indexed by
//     j = a0 + 2*a1 + 4*b0 + 8*b1 + 16*c0 + 32*c1.
// ---------------------------------------------------------------------------

inline constexpr int kTriBehaviorSize = 64;
inline constexpr int kAssignmentCount = 64;

inline int tri_setting_index(int x, int y, int z) { return (x * 2 + y) * 2 + z; }
inline int tri_outcome_index(int a, int b, int c) { return (a * 2 + b) * 2 + c; }
inline int tri_index(int a, int b, int c, int x, int y, int z) {
  return tri_setting_index(x, y, z) * 8 + tri_outcome_index(a, b, c);
}
inline int assignment_index(int a0, int a1, int b0, int b1, int c0, int c1) {
  return a0 + 2 * a1 + 4 * b0 + 8 * b1 + 16 * c0 + 32 * c1;
}

// Full-correlator description used by the three-party quantifier: the eight
// three-way correlators plus the two first-party marginals.
struct TripartiteCorrelators {
  // <A_x B_y C_z>, index x*4 + y*2 + z
  Eigen::Matrix<double, 8, 1> abc = Eigen::Matrix<double, 8, 1>::Zero();
  double a0 = 0.0;  // <A_0>
  double a1 = 0.0;  // <A_1>

  double abc_at(int x, int y, int z) const { return abc[(x * 4) + y * 2 + z]; }

  // 10-entry feature layout: eight correlators then the two marginals.
  Eigen::VectorXd features() const;
  static TripartiteCorrelators from_features(const Eigen::VectorXd& f);

  // Throws UsageError if any entry leaves [-1, 1].
  void validate() const;
};

// Aggregate functionals of the three-party scenario:
//   I = (1/4) sum_{x,z} <A_x B_0 C_z>
//   J = (1/4) sum_{x,z} (-1)^(x+z) <A_x B_1 C_z>
struct IJValues {
  double i = 0.0;
  double j = 0.0;
};
IJValues ij_functionals(const TripartiteCorrelators& t);

// Value of the two-source inequality sqrt|I| + sqrt|J| (<= 1 for behaviors
// produced by two independent sources).
double bilocal_inequality_value(double i, double j);

// Marginalization of outcome assignments to observable behaviors:
// entry ((abc|xyz), j) is 1 when assignment j outputs a on x, b on y and
// c on z. Shape 64 by 64. Columns sum to 8 (one per setting triple).
Eigen::MatrixXd assignment_marginalization_matrix();

// Map from three-party behaviors to the 10 features of
// TripartiteCorrelators::features(). Shape 10 by 64.
Eigen::MatrixXd tripartite_correlator_map();

// Map from three-party behaviors to (I, J, <A_0>, <A_1>). Shape 4 by 64.
Eigen::MatrixXd ij_correlator_map();

}  // namespace belltrace::scenario

#endif  // BELLTRACE_SCENARIO_HPP
