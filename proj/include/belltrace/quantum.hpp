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

#ifndef BELLTRACE_QUANTUM_HPP
#define BELLTRACE_QUANTUM_HPP

#include <array>
#include <vector>

#include "belltrace/scenario.hpp"

namespace belltrace::quantum {

// Closed-form correlator generators for two standard quantum families.
// Measurements are dichotomic observables in the X-Z plane:
//   M(phi) = cos(phi) Z + sin(phi) X.

// Two-party family: partially entangled pure pair
//   cos(theta)|00> + sin(theta)|11>
// measured at planar angles alpha (first party) and beta (second party):
//   <A(alpha) B(beta)> = cos(alpha) cos(beta) + sin(2 theta) sin(alpha) sin(beta)
double pair_correlator(double theta, double alpha, double beta);

// Full m x m correlator table for planar settings alphas x betas.
scenario::CorrelatorVector pair_correlators(double theta,
                                            const std::vector<double>& alphas,
                                            const std::vector<double>& betas);

// Settings maximizing the two-setting Bell expression for the pair:
// first party at {0, pi/2}, second party at {chi, -chi} with
// tan(chi) = sin(2 theta); the maximum is 2 sqrt(1 + sin^2(2 theta)).
struct ChshSettings {
  std::array<double, 2> alice{};
  std::array<double, 2> bob{};
  double chsh = 0.0;
};
ChshSettings chsh_optimal_settings(double theta);

// Three-party entanglement-swapping line: two independent pair sources,
// the middle observer measures Z(x)Z or X(x)X on its two qubits, the end
// observers measure planar angles. For pure pair sources of parameter
// theta and end-observer angles (alpha_x for the first party, gamma_z for
// the third):
//   <A_x B_0 C_z> = cos(alpha_x) cos(gamma_z)
//   <A_x B_1 C_z> = sin^2(2 theta) sin(alpha_x) sin(gamma_z)
//   <A_x>         = cos(alpha_x) cos(2 theta)
scenario::TripartiteCorrelators swap_correlators(
    double theta, const std::array<double, 2>& alphas,
    const std::array<double, 2>& gammas);

// Same network with two noisy singlet sources of visibility v in [0, 1]
// and end observers measuring at (Z + (-1)^x X)/sqrt(2):
//   <A_x B_0 C_z> = v^2/2,  <A_x B_1 C_z> = (-1)^(x+z) v^2/2,  <A_x> = 0.
// The aggregates are I = J = v^2/2. Throws ConfigError for v outside [0,1].
scenario::TripartiteCorrelators werner_swap_correlators(double v);

}  // namespace belltrace::quantum

#endif  // BELLTRACE_QUANTUM_HPP
