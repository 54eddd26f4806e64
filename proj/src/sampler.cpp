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

#include "belltrace/sampler.hpp"

#include <string>

#include "belltrace/errors.hpp"
#include "belltrace/oracles.hpp"

namespace belltrace::sampler {

scenario::CorrelatorVector sample_bipartite(int m, rng::Stream& rs) {
  if (m < scenario::kMinSettings || m > scenario::kMaxSettings) {
    throw ConfigError("sample_bipartite: m outside [" +
                      std::to_string(scenario::kMinSettings) + ", " +
                      std::to_string(scenario::kMaxSettings) + "]");
  }
  Eigen::VectorXd v(m * m);
  for (int i = 0; i < m * m; ++i) v[i] = rs.uniform(-1.0, 1.0);
  return scenario::make_correlators(m, v);
}

scenario::TripartiteCorrelators sample_tripartite(rng::Stream& rs,
                                                  std::uint64_t max_attempts,
                                                  SampleStats* stats) {
  for (std::uint64_t attempt = 0; attempt < max_attempts; ++attempt) {
    scenario::TripartiteCorrelators t;
    for (int i = 0; i < 8; ++i) t.abc[i] = rs.uniform(-1.0, 1.0);
    t.a0 = rs.uniform(-1.0, 1.0);
    t.a1 = rs.uniform(-1.0, 1.0);
    if (stats != nullptr) ++stats->attempts;
    if (lp::nbl_feasible(t)) {
      if (stats != nullptr) ++stats->accepted;
      return t;
    }
  }
  throw SamplingError("sample_tripartite: no feasible point in " +
                      std::to_string(max_attempts) + " attempts");
}

Eigen::Vector4d sample_ij(rng::Stream& rs, std::uint64_t max_attempts,
                          SampleStats* stats) {
  for (std::uint64_t attempt = 0; attempt < max_attempts; ++attempt) {
    Eigen::Vector4d v;
    for (int i = 0; i < 4; ++i) v[i] = rs.uniform(-1.0, 1.0);
    if (stats != nullptr) ++stats->attempts;
    if (lp::nbl_feasible_ij(v[0], v[1], v[2], v[3])) {
      if (stats != nullptr) ++stats->accepted;
      return v;
    }
  }
  throw SamplingError("sample_ij: no feasible point in " +
                      std::to_string(max_attempts) + " attempts");
}

}  // namespace belltrace::sampler
