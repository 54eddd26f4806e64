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

#ifndef BELLTRACE_RNG_HPP
#define BELLTRACE_RNG_HPP

#include <cstdint>
#include <vector>

namespace belltrace::rng {

// Counter-based pseudo-random stream built on the SplitMix64 mixer.
//
// The i-th output of a stream is a pure function of (seed, stream_id, i).
// Because there is no evolving hidden state beyond the counter, a record
// can be assigned its own substream derived from its index, and parallel
// workers drawing from per-record substreams produce bit-identical results
// regardless of worker count or scheduling order.
inline std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

class Stream {
 public:
  explicit Stream(std::uint64_t seed, std::uint64_t stream_id = 0)
      : base_(splitmix64(splitmix64(seed) ^
                         splitmix64(stream_id ^ 0xa02bdbf7bb3c0a7ULL))) {}

  // Derived stream for one record; independent of how many values the
  // parent has produced.
  Stream substream(std::uint64_t record) const {
    Stream s(0);
    s.base_ = splitmix64(base_ ^ splitmix64(record ^ 0x6a09e667f3bcc909ULL));
    s.counter_ = 0;
    return s;
  }

  std::uint64_t next_u64() { return splitmix64(base_ + (++counter_) * 0x9e3779b97f4a7c15ULL); }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n). n must be positive.
  std::uint64_t uniform_int(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  // In-place Fisher-Yates shuffle.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(uniform_int(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::uint64_t base_;
  std::uint64_t counter_ = 0;
};

}  // namespace belltrace::rng

#endif  // BELLTRACE_RNG_HPP
