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

#include "belltrace/quantum.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "belltrace/errors.hpp"

namespace belltrace::quantum {

double pair_correlator(double theta, double alpha, double beta) {
  return std::cos(alpha) * std::cos(beta) +
         std::sin(2.0 * theta) * std::sin(alpha) * std::sin(beta);
}

scenario::CorrelatorVector pair_correlators(double theta,
                                            const std::vector<double>& alphas,
                                            const std::vector<double>& betas) {
  if (alphas.size() != betas.size() || alphas.empty()) {
    throw UsageError("pair_correlators: need equally many angles per party");
  }
  const int m = static_cast<int>(alphas.size());
  Eigen::VectorXd v(m * m);
  for (int x = 0; x < m; ++x)
    for (int y = 0; y < m; ++y)
      v[x * m + y] = pair_correlator(theta, alphas[static_cast<std::size_t>(x)],
                                     betas[static_cast<std::size_t>(y)]);
  return scenario::make_correlators(m, v);
}

ChshSettings chsh_optimal_settings(double theta) {
  const double s = std::sin(2.0 * theta);
  const double chi = std::atan(s);
  ChshSettings out;
  out.alice = {0.0, std::numbers::pi / 2.0};
  out.bob = {chi, -chi};
  out.chsh = 2.0 * std::sqrt(1.0 + s * s);
  return out;
}

scenario::TripartiteCorrelators swap_correlators(
    double theta, const std::array<double, 2>& alphas,
    const std::array<double, 2>& gammas) {
  const double s2 = std::sin(2.0 * theta) * std::sin(2.0 * theta);
  scenario::TripartiteCorrelators t;
  for (int x = 0; x < 2; ++x) {
    for (int z = 0; z < 2; ++z) {
      const double ax = alphas[static_cast<std::size_t>(x)];
      const double gz = gammas[static_cast<std::size_t>(z)];
      t.abc[x * 4 + 0 * 2 + z] = std::cos(ax) * std::cos(gz);
      t.abc[x * 4 + 1 * 2 + z] = s2 * std::sin(ax) * std::sin(gz);
    }
  }
  t.a0 = std::cos(alphas[0]) * std::cos(2.0 * theta);
  t.a1 = std::cos(alphas[1]) * std::cos(2.0 * theta);
  t.validate();
  return t;
}

scenario::TripartiteCorrelators werner_swap_correlators(double v) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw ConfigError("werner_swap_correlators: visibility " +
                      std::to_string(v) + " outside [0, 1]");
  }
  const double w = v * v / 2.0;
  scenario::TripartiteCorrelators t;
  for (int x = 0; x < 2; ++x) {
    for (int z = 0; z < 2; ++z) {
      t.abc[x * 4 + 0 * 2 + z] = w;
      t.abc[x * 4 + 1 * 2 + z] = ((x + z) % 2 == 0) ? w : -w;
    }
  }
  t.a0 = 0.0;
  t.a1 = 0.0;
  return t;
}

}  // namespace belltrace::quantum
