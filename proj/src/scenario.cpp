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

#include "belltrace/scenario.hpp"

#include <cmath>
#include <string>

#include "belltrace/errors.hpp"

namespace belltrace::scenario {

namespace {

void check_settings_range(int m, const char* where) {
  if (m < kMinSettings || m > kMaxSettings) {
    throw ConfigError(std::string(where) + ": settings count m=" +
                      std::to_string(m) + " outside [" +
                      std::to_string(kMinSettings) + ", " +
                      std::to_string(kMaxSettings) + "]");
  }
}

int bit_of(int word, int pos) { return (word >> pos) & 1; }

}  // namespace

void CorrelatorVector::validate() const {
  if (m < kMinSettings) {
    throw UsageError("CorrelatorVector: m=" + std::to_string(m) + " < " +
                     std::to_string(kMinSettings));
  }
  if (values.size() != static_cast<Eigen::Index>(m) * m) {
    throw UsageError("CorrelatorVector: expected " + std::to_string(m * m) +
                     " entries, got " + std::to_string(values.size()));
  }
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i]) || values[i] < -1.0 || values[i] > 1.0) {
      throw UsageError("CorrelatorVector: entry " + std::to_string(i) +
                       " = " + std::to_string(values[i]) +
                       " outside [-1, 1]");
    }
  }
}

CorrelatorVector make_correlators(int m, const Eigen::VectorXd& values) {
  CorrelatorVector c{m, values};
  c.validate();
  return c;
}

void BipartiteBehavior::validate(double tol) const {
  if (m < kMinSettings || p.size() != static_cast<Eigen::Index>(4) * m * m) {
    throw UsageError("BipartiteBehavior: bad shape");
  }
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (!std::isfinite(p[i]) || p[i] < -tol) {
      throw UsageError("BipartiteBehavior: negative probability at entry " +
                       std::to_string(i));
    }
  }
  for (int x = 0; x < m; ++x) {
    for (int y = 0; y < m; ++y) {
      double s = 0.0;
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) s += at(a, b, x, y);
      if (std::abs(s - 1.0) > tol) {
        throw UsageError("BipartiteBehavior: settings (" + std::to_string(x) +
                         "," + std::to_string(y) + ") sum to " +
                         std::to_string(s));
      }
    }
  }
  // First party's marginal must not depend on the second party's setting,
  // and vice versa.
  for (int a = 0; a < 2; ++a) {
    for (int x = 0; x < m; ++x) {
      double ref = at(a, 0, x, 0) + at(a, 1, x, 0);
      for (int y = 1; y < m; ++y) {
        double v = at(a, 0, x, y) + at(a, 1, x, y);
        if (std::abs(v - ref) > tol) {
          throw UsageError("BipartiteBehavior: signaling first-party marginal");
        }
      }
    }
  }
  for (int b = 0; b < 2; ++b) {
    for (int y = 0; y < m; ++y) {
      double ref = at(0, b, 0, y) + at(1, b, 0, y);
      for (int x = 1; x < m; ++x) {
        double v = at(0, b, x, y) + at(1, b, x, y);
        if (std::abs(v - ref) > tol) {
          throw UsageError(
              "BipartiteBehavior: signaling second-party marginal");
        }
      }
    }
  }
}

StrategyMatrix build_strategy_matrix(int m) {
  check_settings_range(m, "build_strategy_matrix");
  const int rows = 4 * m * m;
  const int cols = 1 << (2 * m);
  StrategyMatrix s;
  s.m = m;
  s.entries = Eigen::MatrixXd::Zero(rows, cols);
  for (int alpha = 0; alpha < (1 << m); ++alpha) {
    for (int beta = 0; beta < (1 << m); ++beta) {
      const int col = alpha * (1 << m) + beta;
      for (int x = 0; x < m; ++x) {
        for (int y = 0; y < m; ++y) {
          const int a = bit_of(alpha, x);
          const int b = bit_of(beta, y);
          s.entries(BipartiteBehavior::index(m, a, b, x, y), col) = 1.0;
        }
      }
    }
  }
  return s;
}

CorrelatorMap build_correlator_map(int m) {
  check_settings_range(m, "build_correlator_map");
  CorrelatorMap cm;
  cm.m = m;
  cm.matrix = Eigen::MatrixXd::Zero(m * m, 4 * m * m);
  for (int x = 0; x < m; ++x) {
    for (int y = 0; y < m; ++y) {
      for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
          double sign = ((a + b) % 2 == 0) ? 1.0 : -1.0;
          cm.matrix(x * m + y, BipartiteBehavior::index(m, a, b, x, y)) = sign;
        }
      }
    }
  }
  return cm;
}

BipartiteBehavior behavior_from_correlators(const CorrelatorVector& c) {
  c.validate();
  BipartiteBehavior beh;
  beh.m = c.m;
  beh.p.resize(4 * c.m * c.m);
  for (int x = 0; x < c.m; ++x) {
    for (int y = 0; y < c.m; ++y) {
      for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
          double sign = ((a + b) % 2 == 0) ? 1.0 : -1.0;
          beh.p[BipartiteBehavior::index(c.m, a, b, x, y)] =
              (1.0 + sign * c.values[x * c.m + y]) / 4.0;
        }
      }
    }
  }
  return beh;
}

std::array<double, 4> chsh_symmetries(const CorrelatorVector& c) {
  c.validate();
  if (c.m != 2) {
    throw UsageError("chsh_symmetries: defined for m=2, got m=" +
                     std::to_string(c.m));
  }
  std::array<double, 4> out{};
  for (int k = 0; k < 4; ++k) {
    double s = 0.0;
    for (int i = 0; i < 4; ++i) s += (i == k ? -1.0 : 1.0) * c.values[i];
    out[static_cast<std::size_t>(k)] = std::abs(s);
  }
  return out;
}

Eigen::VectorXd TripartiteCorrelators::features() const {
  Eigen::VectorXd f(10);
  f.head<8>() = abc;
  f[8] = a0;
  f[9] = a1;
  return f;
}

TripartiteCorrelators TripartiteCorrelators::from_features(
    const Eigen::VectorXd& f) {
  if (f.size() != 10) {
    throw UsageError("TripartiteCorrelators: expected 10 features, got " +
                     std::to_string(f.size()));
  }
  TripartiteCorrelators t;
  t.abc = f.head<8>();
  t.a0 = f[8];
  t.a1 = f[9];
  t.validate();
  return t;
}

void TripartiteCorrelators::validate() const {
  auto check = [](double v, const char* name) {
    if (!std::isfinite(v) || v < -1.0 || v > 1.0) {
      throw UsageError(std::string("TripartiteCorrelators: ") + name +
                       " outside [-1, 1]");
    }
  };
  for (int i = 0; i < 8; ++i) check(abc[i], "correlator");
  check(a0, "<A_0>");
  check(a1, "<A_1>");
}

IJValues ij_functionals(const TripartiteCorrelators& t) {
  t.validate();
  IJValues v;
  for (int x = 0; x < 2; ++x) {
    for (int z = 0; z < 2; ++z) {
      v.i += 0.25 * t.abc_at(x, 0, z);
      v.j += 0.25 * ((x + z) % 2 == 0 ? 1.0 : -1.0) * t.abc_at(x, 1, z);
    }
  }
  return v;
}

double bilocal_inequality_value(double i, double j) {
  return std::sqrt(std::abs(i)) + std::sqrt(std::abs(j));
}

Eigen::MatrixXd assignment_marginalization_matrix() {
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(kTriBehaviorSize, kAssignmentCount);
  for (int j = 0; j < kAssignmentCount; ++j) {
    const int a[2] = {bit_of(j, 0), bit_of(j, 1)};
    const int b[2] = {bit_of(j, 2), bit_of(j, 3)};
    const int c[2] = {bit_of(j, 4), bit_of(j, 5)};
    for (int x = 0; x < 2; ++x)
      for (int y = 0; y < 2; ++y)
        for (int z = 0; z < 2; ++z)
          A(tri_index(a[x], b[y], c[z], x, y, z), j) = 1.0;
  }
  return A;
}

namespace {

// Row mapping a three-party behavior to <A_x B_y C_z>.
Eigen::RowVectorXd abc_correlator_row(int x, int y, int z) {
  Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(kTriBehaviorSize);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c) {
        double sign = ((a + b + c) % 2 == 0) ? 1.0 : -1.0;
        row[tri_index(a, b, c, x, y, z)] = sign;
      }
  return row;
}

// Row mapping a three-party behavior to <A_x>, evaluated on the (y=0, z=0)
// slice; any slice works for non-signaling behaviors.
Eigen::RowVectorXd a_marginal_row(int x) {
  Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(kTriBehaviorSize);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c) {
        row[tri_index(a, b, c, x, 0, 0)] = (a == 0) ? 1.0 : -1.0;
      }
  return row;
}

}  // namespace

Eigen::MatrixXd tripartite_correlator_map() {
  Eigen::MatrixXd M(10, kTriBehaviorSize);
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      for (int z = 0; z < 2; ++z)
        M.row(x * 4 + y * 2 + z) = abc_correlator_row(x, y, z);
  M.row(8) = a_marginal_row(0);
  M.row(9) = a_marginal_row(1);
  return M;
}

Eigen::MatrixXd ij_correlator_map() {
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(4, kTriBehaviorSize);
  for (int x = 0; x < 2; ++x)
    for (int z = 0; z < 2; ++z) {
      M.row(0) += 0.25 * abc_correlator_row(x, 0, z);
      M.row(1) += 0.25 * ((x + z) % 2 == 0 ? 1.0 : -1.0) *
                  abc_correlator_row(x, 1, z);
    }
  M.row(2) = a_marginal_row(0);
  M.row(3) = a_marginal_row(1);
  return M;
}

}  // namespace belltrace::scenario
