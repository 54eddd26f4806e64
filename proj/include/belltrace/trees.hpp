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

#ifndef BELLTRACE_TREES_HPP
#define BELLTRACE_TREES_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace belltrace::learn {

// Shared node layout. Internal nodes route on feature/threshold; leaves
// (feature == -1) carry either a scalar value (regression) or a class
// distribution.
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;
  Eigen::VectorXd dist;  // classification leaves only

  bool is_leaf() const { return feature < 0; }
};

struct Tree {
  std::vector<TreeNode> nodes;
  const TreeNode& route(const Eigen::Ref<const Eigen::RowVectorXd>& x) const;
};

// ---------------------------------------------------------------------------
// Gradient-boosted regression trees: squared-error boosting from the target
// mean with exact greedy splits.
// ---------------------------------------------------------------------------

struct GBRTConfig {
  int n_trees = 100;
  int max_depth = 3;
  double shrinkage = 0.1;
  int min_samples_leaf = 1;

  void validate() const;  // throws ConfigError
};

class GBRTModel {
 public:
  GBRTModel() = default;
  GBRTModel(GBRTConfig cfg, double init, std::vector<Tree> trees)
      : cfg_(cfg), init_(init), trees_(std::move(trees)) {}

  const GBRTConfig& config() const { return cfg_; }
  double init_value() const { return init_; }
  const std::vector<Tree>& trees() const { return trees_; }

  double predict_row(const Eigen::Ref<const Eigen::RowVectorXd>& x) const;
  Eigen::VectorXd predict(const Eigen::MatrixXd& X) const;

 private:
  GBRTConfig cfg_;
  double init_ = 0.0;
  std::vector<Tree> trees_;
};

GBRTModel fit_gbrt(const GBRTConfig& cfg, const Eigen::MatrixXd& X,
                   const Eigen::VectorXd& y);

// ---------------------------------------------------------------------------
// Extremely randomized classification trees: each candidate split draws one
// uniform threshold between the node's feature minimum and maximum, the
// best Gini reduction over ceil(sqrt(k)) random candidate features wins.
// Trees are grown on the full sample (no bootstrap) to purity by default.
// ---------------------------------------------------------------------------

struct ERTConfig {
  int n_trees = 100;
  int max_depth = 0;  // 0 = unlimited
  int min_samples_split = 2;
  int num_classes = 3;
  std::uint64_t seed = 0;

  void validate() const;  // throws ConfigError
};

class ERTModel {
 public:
  ERTModel() = default;
  ERTModel(ERTConfig cfg, std::vector<Tree> trees)
      : cfg_(cfg), trees_(std::move(trees)) {}

  const ERTConfig& config() const { return cfg_; }
  const std::vector<Tree>& trees() const { return trees_; }

  // Mean leaf distribution over trees, one row per sample.
  Eigen::MatrixXd predict_proba(const Eigen::MatrixXd& X) const;
  Eigen::VectorXi predict(const Eigen::MatrixXd& X) const;

 private:
  ERTConfig cfg_;
  std::vector<Tree> trees_;
};

ERTModel fit_ert(const ERTConfig& cfg, const Eigen::MatrixXd& X,
                 const Eigen::VectorXi& y);

}  // namespace belltrace::learn

#endif  // BELLTRACE_TREES_HPP
