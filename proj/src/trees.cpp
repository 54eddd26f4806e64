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

#include "belltrace/trees.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "belltrace/errors.hpp"
#include "belltrace/rng.hpp"

namespace belltrace::learn {

const TreeNode& Tree::route(const Eigen::Ref<const Eigen::RowVectorXd>& x) const {
  int idx = 0;
  while (!nodes[static_cast<std::size_t>(idx)].is_leaf()) {
    const TreeNode& nd = nodes[static_cast<std::size_t>(idx)];
    idx = (x[nd.feature] <= nd.threshold) ? nd.left : nd.right;
  }
  return nodes[static_cast<std::size_t>(idx)];
}

void GBRTConfig::validate() const {
  if (n_trees < 1) throw ConfigError("gbrt: n_trees must be positive");
  if (max_depth < 1) throw ConfigError("gbrt: max_depth must be positive");
  if (!(shrinkage > 0.0 && shrinkage <= 1.0)) {
    throw ConfigError("gbrt: shrinkage must lie in (0, 1]");
  }
  if (min_samples_leaf < 1) throw ConfigError("gbrt: min_samples_leaf must be positive");
}

void ERTConfig::validate() const {
  if (n_trees < 1) throw ConfigError("ert: n_trees must be positive");
  if (max_depth < 0) throw ConfigError("ert: max_depth must be >= 0");
  if (min_samples_split < 2) throw ConfigError("ert: min_samples_split must be >= 2");
  if (num_classes < 2) throw ConfigError("ert: need at least two classes");
}

namespace {

// ----- regression tree with exact greedy squared-error splits -----

struct RegGrower {
  const Eigen::MatrixXd& X;
  const Eigen::VectorXd& r;  // residuals
  const GBRTConfig& cfg;
  std::vector<TreeNode> nodes;

  int grow(std::vector<int>& idx, int depth) {
    const int node_id = static_cast<int>(nodes.size());
    nodes.emplace_back();

    const auto n = static_cast<double>(idx.size());
    double sum = 0.0;
    for (int i : idx) sum += r[i];
    const double mean = sum / n;

    bool make_leaf = depth >= cfg.max_depth ||
                     static_cast<int>(idx.size()) < 2 * cfg.min_samples_leaf;
    int best_feature = -1;
    double best_threshold = 0.0, best_gain = 1e-12;
    if (!make_leaf) {
      const int k = static_cast<int>(X.cols());
      const double base = sum * sum / n;
      std::vector<std::pair<double, double>> vals(idx.size());
      for (int f = 0; f < k; ++f) {
        for (std::size_t i = 0; i < idx.size(); ++i) {
          vals[i] = {X(idx[i], f), r[idx[i]]};
        }
        std::sort(vals.begin(), vals.end());
        double left_sum = 0.0;
        for (std::size_t i = 0; i + 1 < vals.size(); ++i) {
          left_sum += vals[i].second;
          if (vals[i].first == vals[i + 1].first) continue;
          const auto nl = static_cast<double>(i + 1);
          const auto nr = n - nl;
          if (nl < cfg.min_samples_leaf || nr < cfg.min_samples_leaf) continue;
          const double right_sum = sum - left_sum;
          const double gain =
              left_sum * left_sum / nl + right_sum * right_sum / nr - base;
          if (gain > best_gain) {
            best_gain = gain;
            best_feature = f;
            best_threshold = (vals[i].first + vals[i + 1].first) / 2.0;
          }
        }
      }
    }

    if (best_feature < 0) {
      nodes[static_cast<std::size_t>(node_id)].value = mean;
      return node_id;
    }

    std::vector<int> left, right;
    for (int i : idx) {
      (X(i, best_feature) <= best_threshold ? left : right).push_back(i);
    }
    // Guard: ties at the threshold could starve one side.
    if (left.empty() || right.empty()) {
      nodes[static_cast<std::size_t>(node_id)].value = mean;
      return node_id;
    }
    idx.clear();
    idx.shrink_to_fit();
    const int l = grow(left, depth + 1);
    const int rgt = grow(right, depth + 1);
    TreeNode& nd = nodes[static_cast<std::size_t>(node_id)];
    nd.feature = best_feature;
    nd.threshold = best_threshold;
    nd.left = l;
    nd.right = rgt;
    return node_id;
  }
};

// ----- extremely randomized classification tree -----

struct ErtGrower {
  const Eigen::MatrixXd& X;
  const Eigen::VectorXi& y;
  const ERTConfig& cfg;
  rng::Stream rs;
  std::vector<TreeNode> nodes;

  Eigen::VectorXd distribution(const std::vector<int>& idx) const {
    Eigen::VectorXd d = Eigen::VectorXd::Zero(cfg.num_classes);
    for (int i : idx) d[y[i]] += 1.0;
    return d / static_cast<double>(idx.size());
  }

  static double gini(const Eigen::VectorXd& counts, double n) {
    if (n <= 0.0) return 0.0;
    double g = 1.0;
    for (Eigen::Index c = 0; c < counts.size(); ++c) {
      const double p = counts[c] / n;
      g -= p * p;
    }
    return g;
  }

  int grow(std::vector<int>& idx, int depth) {
    const int node_id = static_cast<int>(nodes.size());
    nodes.emplace_back();

    Eigen::VectorXd counts = Eigen::VectorXd::Zero(cfg.num_classes);
    for (int i : idx) counts[y[i]] += 1.0;
    const auto n = static_cast<double>(idx.size());
    const bool pure = (counts.maxCoeff() == n);

    bool stop = pure || static_cast<int>(idx.size()) < cfg.min_samples_split ||
                (cfg.max_depth > 0 && depth >= cfg.max_depth);

    int best_feature = -1;
    double best_threshold = 0.0, best_gain = 1e-12;
    if (!stop) {
      const int k = static_cast<int>(X.cols());
      const int tries = std::max(
          1, static_cast<int>(std::ceil(std::sqrt(static_cast<double>(k)))));
      std::vector<int> features(static_cast<std::size_t>(k));
      std::iota(features.begin(), features.end(), 0);
      rs.shuffle(features);
      const double parent = gini(counts, n);
      for (int t = 0; t < tries; ++t) {
        const int f = features[static_cast<std::size_t>(t)];
        double lo = X(idx[0], f), hi = lo;
        for (int i : idx) {
          lo = std::min(lo, X(i, f));
          hi = std::max(hi, X(i, f));
        }
        if (hi <= lo) continue;  // constant feature at this node
        const double threshold = rs.uniform(lo, hi);
        Eigen::VectorXd lcount = Eigen::VectorXd::Zero(cfg.num_classes);
        double nl = 0.0;
        for (int i : idx) {
          if (X(i, f) <= threshold) {
            lcount[y[i]] += 1.0;
            nl += 1.0;
          }
        }
        const double nr = n - nl;
        if (nl == 0.0 || nr == 0.0) continue;
        const Eigen::VectorXd rcount = counts - lcount;
        const double gain =
            parent - (nl / n) * gini(lcount, nl) - (nr / n) * gini(rcount, nr);
        if (gain > best_gain) {
          best_gain = gain;
          best_feature = f;
          best_threshold = threshold;
        }
      }
    }

    if (best_feature < 0) {
      nodes[static_cast<std::size_t>(node_id)].dist = counts / n;
      return node_id;
    }

    std::vector<int> left, right;
    for (int i : idx) {
      (X(i, best_feature) <= best_threshold ? left : right).push_back(i);
    }
    idx.clear();
    idx.shrink_to_fit();
    const int l = grow(left, depth + 1);
    const int rgt = grow(right, depth + 1);
    TreeNode& nd = nodes[static_cast<std::size_t>(node_id)];
    nd.feature = best_feature;
    nd.threshold = best_threshold;
    nd.left = l;
    nd.right = rgt;
    return node_id;
  }
};

}  // namespace

double GBRTModel::predict_row(
    const Eigen::Ref<const Eigen::RowVectorXd>& x) const {
  double out = init_;
  for (const Tree& t : trees_) out += cfg_.shrinkage * t.route(x).value;
  return out;
}

Eigen::VectorXd GBRTModel::predict(const Eigen::MatrixXd& X) const {
  Eigen::VectorXd out(X.rows());
  for (Eigen::Index i = 0; i < X.rows(); ++i) out[i] = predict_row(X.row(i));
  return out;
}

GBRTModel fit_gbrt(const GBRTConfig& cfg, const Eigen::MatrixXd& X,
                   const Eigen::VectorXd& y) {
  cfg.validate();
  if (X.rows() != y.size() || X.rows() == 0) {
    throw UsageError("fit_gbrt: bad training shapes");
  }
  const double init = y.mean();
  Eigen::VectorXd current = Eigen::VectorXd::Constant(y.size(), init);
  std::vector<Tree> trees;
  trees.reserve(static_cast<std::size_t>(cfg.n_trees));
  std::vector<int> all(static_cast<std::size_t>(X.rows()));
  std::iota(all.begin(), all.end(), 0);
  for (int t = 0; t < cfg.n_trees; ++t) {
    Eigen::VectorXd resid = y - current;
    RegGrower grower{X, resid, cfg, {}};
    std::vector<int> idx = all;
    grower.grow(idx, 0);
    Tree tree{std::move(grower.nodes)};
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
      current[i] += cfg.shrinkage * tree.route(X.row(i)).value;
    }
    trees.push_back(std::move(tree));
  }
  return GBRTModel(cfg, init, std::move(trees));
}

Eigen::MatrixXd ERTModel::predict_proba(const Eigen::MatrixXd& X) const {
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(X.rows(), cfg_.num_classes);
  for (const Tree& t : trees_) {
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
      P.row(i) += t.route(X.row(i)).dist.transpose();
    }
  }
  return P / static_cast<double>(trees_.size());
}

Eigen::VectorXi ERTModel::predict(const Eigen::MatrixXd& X) const {
  Eigen::MatrixXd P = predict_proba(X);
  Eigen::VectorXi cls(P.rows());
  for (Eigen::Index i = 0; i < P.rows(); ++i) {
    Eigen::Index best;
    P.row(i).maxCoeff(&best);
    cls[i] = static_cast<int>(best);
  }
  return cls;
}

ERTModel fit_ert(const ERTConfig& cfg, const Eigen::MatrixXd& X,
                 const Eigen::VectorXi& y) {
  cfg.validate();
  if (X.rows() != y.size() || X.rows() == 0) {
    throw UsageError("fit_ert: bad training shapes");
  }
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (y[i] < 0 || y[i] >= cfg.num_classes) {
      throw UsageError("fit_ert: label outside 0.." +
                       std::to_string(cfg.num_classes - 1));
    }
  }
  rng::Stream base(cfg.seed, /*stream_id=*/0xe47);
  std::vector<Tree> trees;
  trees.reserve(static_cast<std::size_t>(cfg.n_trees));
  std::vector<int> all(static_cast<std::size_t>(X.rows()));
  std::iota(all.begin(), all.end(), 0);
  for (int t = 0; t < cfg.n_trees; ++t) {
    ErtGrower grower{X, y, cfg, base.substream(static_cast<std::uint64_t>(t)), {}};
    std::vector<int> idx = all;
    grower.grow(idx, 0);
    trees.push_back(Tree{std::move(grower.nodes)});
  }
  return ERTModel(cfg, std::move(trees));
}

}  // namespace belltrace::learn
