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

#include "belltrace/oracles.hpp"

#include <algorithm>
#include <cmath>

#include "belltrace/errors.hpp"
#include "belltrace/quantum.hpp"
#include "belltrace/rng.hpp"
#include "belltrace/sampler.hpp"
#include "doctest.h"

using namespace belltrace;

namespace {

scenario::CorrelatorVector isotropic(double lambda) {
  Eigen::VectorXd v(4);
  v << lambda, lambda, lambda, -lambda;
  return scenario::make_correlators(2, v);
}

scenario::CorrelatorVector random_point(int m, rng::Stream& rs) {
  Eigen::VectorXd v(m * m);
  for (int i = 0; i < m * m; ++i) v[i] = rs.uniform(-1.0, 1.0);
  return scenario::make_correlators(m, v);
}

// Independent two-setting closed form: the distance is the worst facet
// excess, max_k (S_k - 2)/8, clipped at zero.
double closed_form_m2(const scenario::CorrelatorVector& c) {
  const auto s = scenario::chsh_symmetries(c);
  return std::max(0.0, (*std::max_element(s.begin(), s.end()) - 2.0) / 8.0);
}

scenario::CorrelatorVector random_mixture(int m, rng::Stream& rs) {
  const scenario::StrategyMatrix S = scenario::build_strategy_matrix(m);
  Eigen::VectorXd lambda(S.entries.cols());
  for (int i = 0; i < lambda.size(); ++i) {
    lambda[i] = -std::log(1.0 - rs.uniform());
  }
  lambda /= lambda.sum();
  const scenario::CorrelatorMap M = scenario::build_correlator_map(m);
  return scenario::make_correlators(m, M.matrix * (S.entries * lambda));
}

scenario::TripartiteCorrelators product_point(rng::Stream& rs) {
  // Independent single-party expectations multiply.
  double a[2], b[2], c[2];
  for (int i = 0; i < 2; ++i) {
    a[i] = rs.uniform(-1.0, 1.0);
    b[i] = rs.uniform(-1.0, 1.0);
    c[i] = rs.uniform(-1.0, 1.0);
  }
  scenario::TripartiteCorrelators t;
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      for (int z = 0; z < 2; ++z) t.abc[x * 4 + y * 2 + z] = a[x] * b[y] * c[z];
  t.a0 = a[0];
  t.a1 = a[1];
  return t;
}

}  // namespace

TEST_CASE("two-party distance: known extremal values") {
  CHECK(lp::nl_distance(isotropic(1.0)).nl == doctest::Approx(0.25));
  CHECK(lp::nl_distance(isotropic(0.0)).nl ==
        doctest::Approx(0.0).epsilon(1e-9));
  const double tsirelson = 1.0 / std::sqrt(2.0);
  CHECK(lp::nl_distance(isotropic(tsirelson)).nl ==
        doctest::Approx((std::sqrt(2.0) - 1.0) / 4.0));
}

TEST_CASE("two-party distance along the isotropic line") {
  for (double lambda : {0.0, 0.3, 0.5, 0.6, 0.75, 0.9, 1.0}) {
    const double expected = std::max(0.0, (2.0 * lambda - 1.0) / 4.0);
    CHECK(lp::nl_distance(isotropic(lambda)).nl ==
          doctest::Approx(expected).epsilon(1e-8));
  }
}

TEST_CASE("strategy mixtures have zero distance") {
  rng::Stream rs(21, 1);
  for (int m = 2; m <= 3; ++m) {
    lp::SimplexSolver solver;
    for (int rep = 0; rep < 25; ++rep) {
      const auto c = random_mixture(m, rs);
      CHECK(lp::nl_distance(c, &solver).nl <= 1e-6);
    }
  }
}

TEST_CASE("two-party distance matches the facet closed form") {
  rng::Stream rs(22, 2);
  lp::SimplexSolver solver;
  for (int rep = 0; rep < 200; ++rep) {
    const auto c = random_point(2, rs);
    const double nl = lp::nl_distance(c, &solver).nl;
    CHECK(nl == doctest::Approx(closed_form_m2(c)).epsilon(1e-7));
    // Spec cross-check: positive distance iff a facet is violated.
    const auto s = scenario::chsh_symmetries(c);
    const bool violated = *std::max_element(s.begin(), s.end()) > 2.0;
    CHECK((nl > 1e-6) == violated);
  }
}

TEST_CASE("two-party distance is invariant under polytope symmetries") {
  rng::Stream rs(23, 3);
  lp::SimplexSolver solver;
  for (int rep = 0; rep < 15; ++rep) {
    const auto c = random_point(2, rs);
    const double base = lp::nl_distance(c, &solver).nl;

    // Outcome relabeling: negate one first-party row.
    scenario::CorrelatorVector flip = c;
    flip.values[0] = -flip.values[0];
    flip.values[1] = -flip.values[1];
    CHECK(lp::nl_distance(flip, &solver).nl ==
          doctest::Approx(base).epsilon(1e-6).scale(1.0));

    // Setting permutation: swap the first party's settings.
    scenario::CorrelatorVector swap = c;
    std::swap(swap.values[0], swap.values[2]);
    std::swap(swap.values[1], swap.values[3]);
    CHECK(lp::nl_distance(swap, &solver).nl ==
          doctest::Approx(base).epsilon(1e-6).scale(1.0));

    // Party exchange: transpose the correlator table.
    scenario::CorrelatorVector t = c;
    std::swap(t.values[1], t.values[2]);
    CHECK(lp::nl_distance(t, &solver).nl ==
          doctest::Approx(base).epsilon(1e-6).scale(1.0));
  }
}

TEST_CASE("two-party result carries a usable certificate") {
  rng::Stream rs(24, 4);
  const auto c = random_point(2, rs);
  const lp::NLResult r = lp::nl_distance(c);
  REQUIRE(r.local_weights.size() == 16);
  REQUIRE(r.completion.size() == 16);
  CHECK(r.local_weights.minCoeff() >= -1e-9);
  CHECK(r.local_weights.sum() == doctest::Approx(1.0));
  // The completion reproduces the correlators.
  const auto M = scenario::build_correlator_map(2);
  CHECK((M.matrix * r.completion - c.values).lpNorm<Eigen::Infinity>() <=
        1e-7);
  // And the objective is the scaled l1 gap between completion and mixture.
  const auto S = scenario::build_strategy_matrix(2);
  const double gap =
      (r.completion - S.entries * r.local_weights).lpNorm<1>() / 8.0;
  CHECK(r.nl == doctest::Approx(gap).epsilon(1e-7));
}

TEST_CASE("first-party table parametrization is normalized") {
  rng::Stream rs(25, 5);
  for (int rep = 0; rep < 20; ++rep) {
    const double a0 = rs.uniform(-1.0, 1.0);
    const double a1 = rs.uniform(-1.0, 1.0);
    const double nu = rs.uniform(0.0, 0.5);
    const auto f = lp::marginal_qfunctions(a0, a1, nu);
    CHECK(f[0] + f[1] + f[2] + f[3] == doctest::Approx(1.0));
    CHECK(f[0] == doctest::Approx(nu));
    // Outcome expectations encoded by the table.
    CHECK(f[0] + f[1] == doctest::Approx((1.0 + a0) / 2.0));
    CHECK(f[0] + f[2] == doctest::Approx((1.0 + a1) / 2.0));
  }
}

TEST_CASE("noisy two-source family matches the analytic curve") {
  for (double v : {0.8, 0.9, 1.0}) {
    const auto t = quantum::werner_swap_correlators(v);
    const lp::NBLResult r = lp::nbl_distance(t);
    CHECK(std::abs(r.nbl - (v * v - 0.5)) <= 2e-3);
  }
}

TEST_CASE("two-source family: visibility one pins the sweep") {
  const auto t = quantum::werner_swap_correlators(1.0);
  const auto b = lp::nu_bounds(t);
  CHECK(b.lo == doctest::Approx(0.25).epsilon(1e-9));
  CHECK(b.hi == doctest::Approx(0.25).epsilon(1e-9));
  const lp::NBLResult r = lp::nbl_distance(t);
  CHECK(r.lp_solves == 1);
  CHECK(r.nbl == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("two-source distance vanishes below the threshold visibility") {
  for (double v : {0.5, 0.7}) {
    const lp::NBLResult r =
        lp::nbl_distance(quantum::werner_swap_correlators(v));
    CHECK(r.nbl == 0.0);
    CHECK(r.early_exit);
  }
}

TEST_CASE("two-source distance is monotone in the visibility") {
  lp::NBLOptions opts;
  opts.grid_points = 301;
  double prev = -1.0;
  for (double v = 0.72; v <= 1.001; v += 0.04) {
    const double nbl =
        lp::nbl_distance(quantum::werner_swap_correlators(std::min(v, 1.0)),
                         opts)
            .nbl;
    CHECK(nbl >= prev - 1e-3);
    prev = nbl;
  }
}

TEST_CASE("product behaviors certify zero via early exit") {
  rng::Stream rs(26, 6);
  for (int rep = 0; rep < 10; ++rep) {
    const auto t = product_point(rs);
    const lp::NBLResult r = lp::nbl_distance(t);
    CHECK(r.nbl == 0.0);
    CHECK(r.early_exit);
    CHECK(r.lp_solves <= 3);
  }
}

TEST_CASE("grid refinement is stable") {
  rng::Stream rs(27, 7);
  lp::NBLOptions coarse, fine;
  coarse.grid_points = 1000;
  fine.grid_points = 2000;
  // The analytic family point plus random feasible draws.
  const auto w = quantum::werner_swap_correlators(0.9);
  CHECK(std::abs(lp::nbl_distance(w, coarse).nbl -
                 lp::nbl_distance(w, fine).nbl) <= 1e-3);
  for (int rep = 0; rep < 2; ++rep) {
    const auto t = sampler::sample_tripartite(rs);
    CHECK(std::abs(lp::nbl_distance(t, coarse).nbl -
                   lp::nbl_distance(t, fine).nbl) <= 1e-3);
  }
}

TEST_CASE("aggregate mode relaxes the ten-feature mode") {
  rng::Stream rs(28, 8);
  for (int rep = 0; rep < 2; ++rep) {
    const auto t = sampler::sample_tripartite(rs);
    const auto ij = scenario::ij_functionals(t);
    const double full = lp::nbl_distance(t).nbl;
    const double agg = lp::nbl_distance_ij(ij.i, ij.j, t.a0, t.a1).nbl;
    CHECK(agg <= full + 1e-6);
  }
  // On the noisy two-source family both modes meet the analytic value.
  const auto w = quantum::werner_swap_correlators(0.9);
  const auto ij = scenario::ij_functionals(w);
  CHECK(std::abs(lp::nbl_distance_ij(ij.i, ij.j, 0.0, 0.0).nbl - 0.31) <=
        2e-3);
}

TEST_CASE("sweep bookkeeping is consistent with the profile") {
  lp::NBLOptions opts;
  opts.grid_points = 201;
  opts.record_profile = true;
  const lp::NBLResult r =
      lp::nbl_distance(quantum::werner_swap_correlators(0.9), opts);
  REQUIRE(!r.profile.empty());
  CHECK(static_cast<int>(r.profile.size()) == r.lp_solves);
  double best = lp::kInf;
  double best_nu = 0.0;
  for (const auto& [nu, dist] : r.profile) {
    if (dist < best) {
      best = dist;
      best_nu = nu;
    }
    CHECK(nu >= r.nu_range.lo - 1e-12);
    CHECK(nu <= r.nu_range.hi + 1e-12);
  }
  CHECK(r.nbl == doctest::Approx(best));
  CHECK(r.nu_star == doctest::Approx(best_nu));
  CHECK(r.profile.front().first == doctest::Approx(r.nu_range.lo));
  CHECK(r.profile.back().first == doctest::Approx(r.nu_range.hi));
}

TEST_CASE("fixed-parameter program pins the first-party table") {
  const auto t = quantum::werner_swap_correlators(0.9);
  const double nu = 0.25;
  const lp::LinearProgram p = lp::build_nbl_lp(t, nu);
  const lp::Solution s = lp::solve(p);
  REQUIRE(s.status == lp::Status::kOptimal);
  // q occupies columns [16, 80); masses grouped by the first-party bits
  // must equal the parametrized table.
  const auto f = lp::marginal_qfunctions(t.a0, t.a1, nu);
  std::array<double, 4> mass = {0.0, 0.0, 0.0, 0.0};
  for (int j = 0; j < 64; ++j) {
    mass[static_cast<std::size_t>(j & 3)] += s.x[16 + j];
  }
  // Assignment bit pair (a0,a1) = (j&1, (j>>1)&1) maps to table index
  // a0_bit*2 + a1_bit.
  CHECK(mass[0] == doctest::Approx(f[0]).epsilon(1e-7));
  CHECK(mass[1] == doctest::Approx(f[2]).epsilon(1e-7));
  CHECK(mass[2] == doctest::Approx(f[1]).epsilon(1e-7));
  CHECK(mass[3] == doctest::Approx(f[3]).epsilon(1e-7));
}

TEST_CASE("contradictory constraints are rejected up front") {
  scenario::TripartiteCorrelators t;
  t.abc.setZero();
  t.abc[0] = 1.0;   // <A0 B0 C0> = 1
  t.abc[4] = 1.0;   // <A1 B0 C0> = 1
  t.a0 = 1.0;       // first party deterministically +1 on setting 0
  t.a1 = -1.0;      // and deterministically -1 on setting 1
  CHECK(!lp::nbl_feasible(t));
  CHECK_THROWS_AS(lp::nbl_distance(t), UsageError);
}

TEST_CASE("sweep rejects degenerate grids") {
  lp::NBLOptions opts;
  opts.grid_points = 1;
  CHECK_THROWS_AS(
      lp::nbl_distance(quantum::werner_swap_correlators(0.9), opts),
      ConfigError);
}
