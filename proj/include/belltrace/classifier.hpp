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

#ifndef BELLTRACE_CLASSIFIER_HPP
#define BELLTRACE_CLASSIFIER_HPP

#include "belltrace/scenario.hpp"

namespace belltrace::classifier {

// Closed-form classification of two-setting full-correlator points.
// Boundary points are assigned to the weaker (smaller) class.
enum class Region : int { kLocal = 0, kQuantum = 1, kPostQuantum = 2 };

const char* to_string(Region r);
Region region_from_index(int idx);  // throws UsageError outside {0,1,2}

// True when the point admits a deterministic-strategy mixture, i.e. all
// four symmetries of the two-setting Bell expression are at most 2 (up to
// `tol`). Requires m == 2.
bool local_member(const scenario::CorrelatorVector& c, double tol = 1e-9);

// True when the point is realizable by measurements on a quantum state:
// for every placement k of the minus sign,
//   | sum_xy arcsin(c_xy) - 2 arcsin(c_k) | <= pi  (up to `tol`).
// Requires m == 2.
bool quantum_realizable(const scenario::CorrelatorVector& c, double tol = 1e-9);

// Local if local_member, else Quantum if quantum_realizable, else
// PostQuantum.
Region classify(const scenario::CorrelatorVector& c, double tol = 1e-9);

}  // namespace belltrace::classifier

#endif  // BELLTRACE_CLASSIFIER_HPP
