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

#include "belltrace/lp.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "belltrace/errors.hpp"
#include "belltrace/rng.hpp"
#include "doctest.h"

using namespace belltrace;
using lp::LinearProgram;
using lp::Status;

namespace {

// min c.x over the 3x3 doubly stochastic polytope scaled by s (all row and
// column sums equal s). By Birkhoff-von Neumann the optimum is s times the
// cheapest of the six permutation matrices.
LinearProgram birkhoff_lp(const Eigen::Matrix3d& cost, double s) {
  LinearProgram p;
  p.objective = Eigen::VectorXd(9);
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) p.objective[r * 3 + c] = cost(r, c);
  p.eq_matrix = Eigen::MatrixXd::Zero(6, 9);
  p.eq_rhs = Eigen::VectorXd::Constant(6, s);
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) {
      p.eq_matrix(r, r * 3 + c) = 1.0;      // row sums
      p.eq_matrix(3 + c, r * 3 + c) = 1.0;  // column sums
    }
  p.lower = Eigen::VectorXd::Zero(9);
  p.upper = Eigen::VectorXd::Constant(9, lp::kInf);
  return p;
}

double cheapest_permutation(const Eigen::Matrix3d& cost) {
  std::array<int, 3> perm = {0, 1, 2};
  double best = std::numeric_limits<double>::infinity();
  do {
    double v = 0.0;
    for (int r = 0; r < 3; ++r) v += cost(r, perm[static_cast<std::size_t>(r)]);
    best = std::min(best, v);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

}  // namespace

TEST_CASE("box-constrained inequality program") {
  LinearProgram p;
  p.objective = Eigen::VectorXd(2);
  p.objective << -1.0, -1.0;
  p.ineq_matrix = Eigen::MatrixXd(1, 2);
  p.ineq_matrix << 1.0, 1.0;
  p.ineq_rhs = Eigen::VectorXd(1);
  p.ineq_rhs << 1.5;
  p.lower = Eigen::VectorXd::Zero(2);
  p.upper = Eigen::VectorXd::Ones(2);

  const lp::Solution s = lp::solve(p);
  REQUIRE(s.status == Status::kOptimal);
  CHECK(s.objective == doctest::Approx(-1.5));
  CHECK(s.x.sum() == doctest::Approx(1.5));
}

TEST_CASE("equality program with a vertex solution") {
  LinearProgram p;
  p.objective = Eigen::VectorXd(2);
  p.objective << 1.0, 2.0;
  p.eq_matrix = Eigen::MatrixXd(1, 2);
  p.eq_matrix << 1.0, 1.0;
  p.eq_rhs = Eigen::VectorXd(1);
  p.eq_rhs << 1.0;
  p.lower = Eigen::VectorXd::Zero(2);
  p.upper = Eigen::VectorXd::Constant(2, lp::kInf);

  const lp::Solution s = lp::solve(p);
  REQUIRE(s.status == Status::kOptimal);
  CHECK(s.objective == doctest::Approx(1.0));
  CHECK(s.x[0] == doctest::Approx(1.0));
  CHECK(s.x[1] == doctest::Approx(0.0));
}

TEST_CASE("infeasibility is detected") {
  LinearProgram p;
  p.objective = Eigen::VectorXd::Zero(2);
  p.eq_matrix = Eigen::MatrixXd(1, 2);
  p.eq_matrix << 1.0, 1.0;
  p.eq_rhs = Eigen::VectorXd(1);
  p.eq_rhs << 3.0;
  p.lower = Eigen::VectorXd::Zero(2);
  p.upper = Eigen::VectorXd::Ones(2);
  CHECK(lp::solve(p).status == Status::kInfeasible);
}

TEST_CASE("unboundedness is detected") {
  LinearProgram p;
  p.objective = Eigen::VectorXd(2);
  p.objective << -1.0, 0.0;
  p.ineq_matrix = Eigen::MatrixXd(1, 2);
  p.ineq_matrix << 0.0, 1.0;
  p.ineq_rhs = Eigen::VectorXd(1);
  p.ineq_rhs << 1.0;
  p.lower = Eigen::VectorXd::Zero(2);
  p.upper = Eigen::VectorXd::Constant(2, lp::kInf);
  CHECK(lp::solve(p).status == Status::kUnbounded);
}

TEST_CASE("free variables reach interior targets") {
  // min t subject to -t <= x - 0.7 <= t with x free: optimum 0 at x = 0.7.
  LinearProgram p;
  p.objective = Eigen::VectorXd(2);
  p.objective << 1.0, 0.0;  // [t, x]
  p.ineq_matrix = Eigen::MatrixXd(2, 2);
  p.ineq_matrix << -1.0, 1.0, -1.0, -1.0;
  p.ineq_rhs = Eigen::VectorXd(2);
  p.ineq_rhs << 0.7, -0.7;
  p.lower = Eigen::VectorXd(2);
  p.lower << 0.0, -lp::kInf;
  p.upper = Eigen::VectorXd::Constant(2, lp::kInf);

  const lp::Solution s = lp::solve(p);
  REQUIRE(s.status == Status::kOptimal);
  CHECK(s.objective == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(s.x[1] == doctest::Approx(0.7));
}

TEST_CASE("random assignment polytopes match brute-force matching") {
  rng::Stream rs(5, 10);
  for (int rep = 0; rep < 20; ++rep) {
    Eigen::Matrix3d cost;
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) cost(r, c) = rs.uniform(-2.0, 2.0);
    const LinearProgram p = birkhoff_lp(cost, 1.0);
    const lp::Solution s = lp::solve(p);
    REQUIRE(s.status == Status::kOptimal);
    CHECK(s.objective == doctest::Approx(cheapest_permutation(cost)));
    // Certified: the reported point satisfies the constraints.
    CHECK((p.eq_matrix * s.x - p.eq_rhs).lpNorm<Eigen::Infinity>() <= 1e-8);
    CHECK(s.x.minCoeff() >= -1e-9);
  }
}

TEST_CASE("warm resolve tracks objective and rhs changes") {
  rng::Stream rs(6, 11);
  Eigen::Matrix3d cost;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) cost(r, c) = rs.uniform(0.0, 1.0);

  lp::SimplexSolver solver;
  LinearProgram p = birkhoff_lp(cost, 1.0);
  lp::Solution s0 = solver.solve(p);
  REQUIRE(s0.status == Status::kOptimal);

  // Objective perturbations.
  for (int rep = 0; rep < 10; ++rep) {
    for (int i = 0; i < 9; ++i) p.objective[i] += rs.uniform(-0.05, 0.05);
    Eigen::Matrix3d c2;
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) c2(r, c) = p.objective[r * 3 + c];
    const lp::Solution w = solver.resolve(p);
    REQUIRE(w.status == Status::kOptimal);
    CHECK(w.objective == doctest::Approx(cheapest_permutation(c2)));
  }

  // Scaling the polytope scales the optimum (rhs change on a warm basis).
  for (double s : {1.25, 0.75, 2.0}) {
    LinearProgram q = birkhoff_lp(cost, s);
    const lp::Solution w = solver.resolve(q);
    REQUIRE(w.status == Status::kOptimal);
    CHECK(w.objective == doctest::Approx(s * cheapest_permutation(cost)));
  }
}

TEST_CASE("solver options cap iterations") {
  lp::SolverOptions opts;
  opts.max_iterations = 1;
  Eigen::Matrix3d cost;
  cost << 1, 2, 3, 4, 5, 6, 7, 8, 9;
  const lp::Solution s = lp::solve(birkhoff_lp(cost, 1.0), opts);
  CHECK(s.status != Status::kOptimal);
}

TEST_CASE("program validation rejects malformed input") {
  LinearProgram p;
  p.objective = Eigen::VectorXd::Zero(2);
  p.lower = Eigen::VectorXd::Zero(2);
  p.upper = Eigen::VectorXd::Ones(2);

  LinearProgram bad = p;
  bad.objective[0] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(lp::solve(bad), UsageError);

  bad = p;
  bad.lower[0] = 2.0;  // lower > upper
  CHECK_THROWS_AS(lp::solve(bad), UsageError);

  bad = p;
  bad.eq_matrix = Eigen::MatrixXd::Zero(1, 3);  // wrong column count
  bad.eq_rhs = Eigen::VectorXd::Zero(1);
  CHECK_THROWS_AS(lp::solve(bad), UsageError);
}

TEST_CASE("LP text dump carries the whole program") {
  LinearProgram p;
  p.objective = Eigen::VectorXd(2);
  p.objective << 1.0, -2.5;
  p.eq_matrix = Eigen::MatrixXd(1, 2);
  p.eq_matrix << 1.0, 1.0;
  p.eq_rhs = Eigen::VectorXd(1);
  p.eq_rhs << 1.0;
  p.lower = Eigen::VectorXd::Zero(2);
  p.upper = Eigen::VectorXd::Ones(2);

  std::ostringstream os;
  lp::write_lp_text(p, os);
  const std::string text = os.str();
  CHECK(text.find("Minimize") != std::string::npos);
  CHECK(text.find("Subject To") != std::string::npos);
  CHECK(text.find("Bounds") != std::string::npos);
  CHECK(text.find("x0") != std::string::npos);
  CHECK(text.find("x1") != std::string::npos);
  CHECK(text.find("End") != std::string::npos);
}
