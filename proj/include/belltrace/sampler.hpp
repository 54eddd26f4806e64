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

#ifndef BELLTRACE_SAMPLER_HPP
#define BELLTRACE_SAMPLER_HPP

#include <cstdint>

#include "belltrace/rng.hpp"
#include "belltrace/scenario.hpp"

namespace belltrace::sampler {

inline constexpr std::uint64_t kDefaultMaxAttempts = 1'000'000;

// Rejection-sampling bookkeeping; acceptance_rate is reported in dataset
// metadata.
struct SampleStats {
  std::uint64_t attempts = 0;
  std::uint64_t accepted = 0;
  double acceptance_rate() const {
    return attempts == 0 ? 1.0
                         : static_cast<double>(accepted) /
                               static_cast<double>(attempts);
  }
};

// Uniform two-party full-correlator point in [-1,1]^(m*m); every such
// point admits a no-signaling completion, so no rejection happens. Draws
// m*m uniforms in row-major (x, y) order.
scenario::CorrelatorVector sample_bipartite(int m, rng::Stream& rs);

// Uniform ten-feature three-party point (eight three-way correlators then
// the two first-party marginals), rejected until it admits an assignment
// model. Throws SamplingError after max_attempts rejections.
scenario::TripartiteCorrelators sample_tripartite(
    rng::Stream& rs, std::uint64_t max_attempts = kDefaultMaxAttempts,
    SampleStats* stats = nullptr);

// Uniform aggregate point (I, J, <A_0>, <A_1>) in [-1,1]^4, rejected until
// feasible. Throws SamplingError after max_attempts rejections.
Eigen::Vector4d sample_ij(rng::Stream& rs,
                          std::uint64_t max_attempts = kDefaultMaxAttempts,
                          SampleStats* stats = nullptr);

}  // namespace belltrace::sampler

#endif  // BELLTRACE_SAMPLER_HPP
