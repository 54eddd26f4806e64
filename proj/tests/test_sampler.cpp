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

#include <algorithm>
#include <cstdint>
#include <vector>

#include "belltrace/errors.hpp"
#include "belltrace/oracles.hpp"
#include "doctest.h"

using namespace belltrace;

TEST_CASE("counter stream is a pure function of seed, id and counter") {
  rng::Stream a(123, 7);
  rng::Stream b(123, 7);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

  rng::Stream c(123, 8);
  rng::Stream d(124, 7);
  CHECK(rng::Stream(123, 7).next_u64() != c.next_u64());
  CHECK(rng::Stream(123, 7).next_u64() != d.next_u64());
}

TEST_CASE("substreams do not depend on parent consumption") {
  rng::Stream parent(9, 1);
  const std::uint64_t before = parent.substream(5).next_u64();
  parent.next_u64();
  parent.next_u64();
  const std::uint64_t after = parent.substream(5).next_u64();
  CHECK(before == after);
  CHECK(parent.substream(5).next_u64() != parent.substream(6).next_u64());
}

TEST_CASE("uniform helpers stay inside their ranges") {
  rng::Stream rs(10, 2);
  for (int i = 0; i < 1000; ++i) {
    const double u = rs.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    const double v = rs.uniform(-2.0, 3.0);
    CHECK(v >= -2.0);
    CHECK(v < 3.0);
    const std::uint64_t k = rs.uniform_int(7);
    CHECK(k < 7);
  }
}

TEST_CASE("shuffle is a seeded permutation") {
  std::vector<int> v1 = {0, 1, 2, 3, 4, 5, 6, 7};
  std::vector<int> v2 = v1;
  rng::Stream a(77, 3), b(77, 3);
  a.shuffle(v1);
  b.shuffle(v2);
  CHECK(v1 == v2);
  std::vector<int> sorted = v1;
  std::sort(sorted.begin(), sorted.end());
  CHECK(sorted == std::vector<int>({0, 1, 2, 3, 4, 5, 6, 7}));
}

TEST_CASE("two-party draws cover the box and reproduce") {
  rng::Stream a(5, 4), b(5, 4);
  for (int m = 2; m <= 4; ++m) {
    const auto c1 = sampler::sample_bipartite(m, a);
    const auto c2 = sampler::sample_bipartite(m, b);
    REQUIRE(c1.values.size() == m * m);
    CHECK((c1.values - c2.values).lpNorm<Eigen::Infinity>() == 0.0);
    CHECK(c1.values.minCoeff() >= -1.0);
    CHECK(c1.values.maxCoeff() <= 1.0);
    CHECK_NOTHROW(c1.validate());
  }
}

TEST_CASE("three-party draws are always representable") {
  rng::Stream rs(6, 5);
  sampler::SampleStats stats;
  for (int rep = 0; rep < 20; ++rep) {
    const auto t = sampler::sample_tripartite(rs, 100000, &stats);
    CHECK_NOTHROW(t.validate());
    CHECK(lp::nbl_feasible(t));
  }
  CHECK(stats.accepted == 20);
  CHECK(stats.attempts >= stats.accepted);
  CHECK(stats.acceptance_rate() > 0.0);
  CHECK(stats.acceptance_rate() <= 1.0);
}

TEST_CASE("aggregate draws are always representable") {
  rng::Stream rs(7, 6);
  sampler::SampleStats stats;
  for (int rep = 0; rep < 20; ++rep) {
    const Eigen::Vector4d f = sampler::sample_ij(rs, 100000, &stats);
    CHECK(f.minCoeff() >= -1.0);
    CHECK(f.maxCoeff() <= 1.0);
    CHECK(lp::nbl_feasible_ij(f[0], f[1], f[2], f[3]));
  }
  CHECK(stats.accepted == 20);
}

TEST_CASE("rejection budget is enforced") {
  rng::Stream rs(8, 7);
  // A zero budget cannot accept anything.
  CHECK_THROWS_AS(sampler::sample_tripartite(rs, 0), SamplingError);
}
