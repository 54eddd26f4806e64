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

#include "belltrace/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "belltrace/errors.hpp"

namespace belltrace::classifier {

const char* to_string(Region r) {
  switch (r) {
    case Region::kLocal: return "local";
    case Region::kQuantum: return "quantum";
    case Region::kPostQuantum: return "post-quantum";
  }
  return "unknown";
}

Region region_from_index(int idx) {
  if (idx < 0 || idx > 2) {
    throw UsageError("region_from_index: index " + std::to_string(idx) +
                     " outside {0, 1, 2}");
  }
  return static_cast<Region>(idx);
}

bool local_member(const scenario::CorrelatorVector& c, double tol) {
  const auto s = scenario::chsh_symmetries(c);
  return *std::max_element(s.begin(), s.end()) <= 2.0 + tol;
}

bool quantum_realizable(const scenario::CorrelatorVector& c, double tol) {
  c.validate();
  if (c.m != 2) {
    throw UsageError("quantum_realizable: defined for m=2");
  }
  double asum = 0.0;
  std::array<double, 4> a{};
  for (int i = 0; i < 4; ++i) {
    // validate() guarantees [-1,1]; clamp to guard round-off at the edge.
    a[static_cast<std::size_t>(i)] =
        std::asin(std::clamp(c.values[i], -1.0, 1.0));
    asum += a[static_cast<std::size_t>(i)];
  }
  for (int k = 0; k < 4; ++k) {
    if (std::abs(asum - 2.0 * a[static_cast<std::size_t>(k)]) >
        std::numbers::pi + tol) {
      return false;
    }
  }
  return true;
}

Region classify(const scenario::CorrelatorVector& c, double tol) {
  if (local_member(c, tol)) return Region::kLocal;
  if (quantum_realizable(c, tol)) return Region::kQuantum;
  return Region::kPostQuantum;
}

}  // namespace belltrace::classifier
