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

#include "belltrace/optimize.hpp"

#include <algorithm>
#include <vector>

#include "belltrace/errors.hpp"

namespace belltrace::optimize {

NelderMeadResult nelder_mead(
    const std::function<double(const Eigen::VectorXd&)>& fn,
    const Eigen::VectorXd& x0, const NelderMeadOptions& opts) {
  const int d = static_cast<int>(x0.size());
  if (d == 0) throw UsageError("nelder_mead: empty start point");

  std::vector<Eigen::VectorXd> pts(static_cast<std::size_t>(d + 1), x0);
  std::vector<double> vals(static_cast<std::size_t>(d + 1));
  int evals = 0;
  auto eval = [&](const Eigen::VectorXd& x) {
    ++evals;
    return fn(x);
  };
  for (int i = 0; i < d; ++i) pts[static_cast<std::size_t>(i + 1)][i] += opts.initial_step;
  for (int i = 0; i <= d; ++i) vals[static_cast<std::size_t>(i)] = eval(pts[static_cast<std::size_t>(i)]);

  auto order = [&] {
    std::vector<int> idx(static_cast<std::size_t>(d + 1));
    for (int i = 0; i <= d; ++i) idx[static_cast<std::size_t>(i)] = i;
    std::sort(idx.begin(), idx.end(), [&](int a, int b) {
      return vals[static_cast<std::size_t>(a)] < vals[static_cast<std::size_t>(b)];
    });
    std::vector<Eigen::VectorXd> p2(pts.size());
    std::vector<double> v2(vals.size());
    for (int i = 0; i <= d; ++i) {
      p2[static_cast<std::size_t>(i)] = pts[static_cast<std::size_t>(idx[static_cast<std::size_t>(i)])];
      v2[static_cast<std::size_t>(i)] = vals[static_cast<std::size_t>(idx[static_cast<std::size_t>(i)])];
    }
    pts.swap(p2);
    vals.swap(v2);
  };

  while (evals < opts.max_evals) {
    order();
    // Convergence: simplex small in both value spread and extent.
    double spread = vals[static_cast<std::size_t>(d)] - vals[0];
    double extent = 0.0;
    for (int i = 1; i <= d; ++i) {
      extent = std::max(extent,
                        (pts[static_cast<std::size_t>(i)] - pts[0]).cwiseAbs().maxCoeff());
    }
    if (spread <= opts.ftol && extent <= opts.xtol) break;

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(d);
    for (int i = 0; i < d; ++i) centroid += pts[static_cast<std::size_t>(i)];
    centroid /= static_cast<double>(d);

    const Eigen::VectorXd& worst = pts[static_cast<std::size_t>(d)];
    Eigen::VectorXd xr = centroid + (centroid - worst);
    double fr = eval(xr);
    if (fr < vals[0]) {
      Eigen::VectorXd xe = centroid + 2.0 * (centroid - worst);
      double fe = eval(xe);
      if (fe < fr) {
        pts[static_cast<std::size_t>(d)] = xe;
        vals[static_cast<std::size_t>(d)] = fe;
      } else {
        pts[static_cast<std::size_t>(d)] = xr;
        vals[static_cast<std::size_t>(d)] = fr;
      }
    } else if (fr < vals[static_cast<std::size_t>(d - 1)]) {
      pts[static_cast<std::size_t>(d)] = xr;
      vals[static_cast<std::size_t>(d)] = fr;
    } else {
      // Contract toward the better of (worst, reflected).
      const bool outside = fr < vals[static_cast<std::size_t>(d)];
      Eigen::VectorXd xc = outside ? centroid + 0.5 * (xr - centroid)
                                   : centroid + 0.5 * (worst - centroid);
      double fc = eval(xc);
      if (fc < std::min(fr, vals[static_cast<std::size_t>(d)])) {
        pts[static_cast<std::size_t>(d)] = xc;
        vals[static_cast<std::size_t>(d)] = fc;
      } else {
        // Shrink toward the best vertex.
        for (int i = 1; i <= d; ++i) {
          pts[static_cast<std::size_t>(i)] =
              pts[0] + 0.5 * (pts[static_cast<std::size_t>(i)] - pts[0]);
          vals[static_cast<std::size_t>(i)] = eval(pts[static_cast<std::size_t>(i)]);
        }
      }
    }
  }
  order();
  NelderMeadResult r;
  r.x = pts[0];
  r.value = vals[0];
  r.evals = evals;
  return r;
}

}  // namespace belltrace::optimize
