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

#ifndef BELLTRACE_OPTIMIZE_HPP
#define BELLTRACE_OPTIMIZE_HPP

#include <Eigen/Dense>
#include <functional>

namespace belltrace::optimize {

struct NelderMeadOptions {
  int max_evals = 2000;
  double xtol = 1e-7;       // simplex diameter convergence threshold
  double ftol = 1e-10;      // function spread convergence threshold
  double initial_step = 0.3;
};

struct NelderMeadResult {
  Eigen::VectorXd x;
  double value = 0.0;
  int evals = 0;
};

// Derivative-free simplex minimization (reflection 1, expansion 2,
// contraction 1/2, shrink 1/2).
NelderMeadResult nelder_mead(
    const std::function<double(const Eigen::VectorXd&)>& fn,
    const Eigen::VectorXd& x0,
    const NelderMeadOptions& opts = NelderMeadOptions());

}  // namespace belltrace::optimize

#endif  // BELLTRACE_OPTIMIZE_HPP
