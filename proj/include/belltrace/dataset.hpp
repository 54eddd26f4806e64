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

#ifndef BELLTRACE_DATASET_HPP
#define BELLTRACE_DATASET_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "belltrace/sampler.hpp"

namespace belltrace::data {

enum class Task { kRegression, kClassification };
const char* to_string(Task t);
Task task_from_string(const std::string& s);  // throws ConfigError

// The three sampling scenarios:
//   bipartite  - two-party m-setting full-correlator points, target is the
//                classical distance (regression) or the region label
//                (classification, m = 2 only)
//   bilocal4   - three-party aggregate features (I, J, <A_0>, <A_1>),
//                target is the two-source distance
//   bilocal10  - three-party ten-feature points, same target
enum class ScenarioKind { kBipartite, kBilocal4, kBilocal10 };

struct ScenarioSpec {
  ScenarioKind kind = ScenarioKind::kBipartite;
  int m = 2;  // only meaningful for kBipartite

  int feature_width() const;
  double target_max() const;  // regression clamp range is [0, target_max]
  std::string name() const;
  // Accepts "bipartite", "bilocal4", "bilocal10". Throws ConfigError.
  static ScenarioSpec parse(const std::string& name, int m = 2);
};

struct Dataset {
  Task task = Task::kRegression;
  Eigen::MatrixXd X;  // n x k features
  Eigen::VectorXd y;  // regression value or class index (0, 1, 2)
  std::vector<int> probe_rows;  // rows excluded from training
  std::map<std::string, std::string> metadata;

  int n() const { return static_cast<int>(X.rows()); }
  int width() const { return static_cast<int>(X.cols()); }
  // Finite entries, consistent shapes, integral class labels in {0,1,2}
  // for classification. Throws DataError.
  void validate() const;
};

struct GenConfig {
  ScenarioSpec scenario;
  Task task = Task::kRegression;
  int n = 1000;  // sampled rows (probes are appended on top)
  std::uint64_t seed = 0;
  int nu_grid = 1000;
  int workers = 1;  // 0 = hardware concurrency
  bool probes = true;
  std::uint64_t max_attempts = sampler::kDefaultMaxAttempts;

  void validate() const;  // throws ConfigError
};

struct GenReport {
  sampler::SampleStats stats;
  double oracle_seconds = 0.0;  // wall time spent in quantifier calls
  int oracle_calls = 0;
};

// Samples n feature points, evaluates the exact quantifier (or the
// analytic region label) on each, and appends the scenario's probe rows.
// Record i draws from rng substream i, so output is byte-identical for
// any worker count.
Dataset generate(const GenConfig& cfg, GenReport* report = nullptr);

// CSV with header f0,...,f{k-1},target and %.17g values, plus a key=value
// sidecar at <path>.meta carrying the metadata map (sorted by key).
void write_csv(const Dataset& d, const std::string& path);
Dataset read_csv(const std::string& path);  // throws DataError

struct Split {
  std::vector<int> train_rows;
  std::vector<int> test_rows;
};

// Seeded shuffle split of the non-probe rows; probe rows are always
// appended to the test side. test_fraction must lie in (0, 1).
Split train_test_split(const Dataset& d, double test_fraction,
                       std::uint64_t seed);

Eigen::MatrixXd take_rows(const Eigen::MatrixXd& X, const std::vector<int>& rows);
Eigen::VectorXd take_rows(const Eigen::VectorXd& v, const std::vector<int>& rows);

// Degree-2 monomial expansion: [x_0 .. x_{k-1}, x_i * x_j for i <= j in
// lexicographic order]. Output width poly2_width(k) = k + k(k+1)/2.
int poly2_width(int k);
Eigen::MatrixXd poly2_features(const Eigen::MatrixXd& X);

}  // namespace belltrace::data

#endif  // BELLTRACE_DATASET_HPP
