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

#include "belltrace/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "belltrace/errors.hpp"
#include "belltrace/rng.hpp"

namespace belltrace::learn {

void MLPConfig::validate(bool strict_grid) const {
  if (input_width < 1) throw ConfigError("mlp: input_width must be positive");
  if (output_width < 1) throw ConfigError("mlp: output_width must be positive");
  if (hidden_layers < 1) throw ConfigError("mlp: need at least one hidden layer");
  if (hidden_width < 1) throw ConfigError("mlp: hidden_width must be positive");
  if (!(learning_rate > 0.0)) throw ConfigError("mlp: learning_rate must be positive");
  if (batch_size < 1) throw ConfigError("mlp: batch_size must be positive");
  if (max_epochs < 1) throw ConfigError("mlp: max_epochs must be positive");
  if (patience < 1) throw ConfigError("mlp: patience must be positive");
  if (!(target_min <= target_max)) throw ConfigError("mlp: bad target range");
  if (loss == Loss::kSoftmaxCrossEntropy && output_width < 2) {
    throw ConfigError("mlp: cross-entropy needs at least two outputs");
  }
  if (strict_grid) {
    if (hidden_layers < 2 || hidden_layers > 5) {
      throw ConfigError("mlp grid: hidden_layers must lie in [2, 5]");
    }
    if (hidden_width < 100 || hidden_width > 500 || hidden_width % 50 != 0) {
      throw ConfigError(
          "mlp grid: hidden_width must be a multiple of 50 in [100, 500]");
    }
  }
}

MLPModel::MLPModel(const MLPConfig& cfg) : cfg_(cfg) {
  cfg_.validate(false);
  rng::Stream rs(cfg_.seed, /*stream_id=*/0x31337);
  std::vector<int> dims;
  dims.push_back(cfg_.input_width);
  for (int l = 0; l < cfg_.hidden_layers; ++l) dims.push_back(cfg_.hidden_width);
  dims.push_back(cfg_.output_width);
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    const int fan_in = dims[l];
    const int fan_out = dims[l + 1];
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in));
    Eigen::MatrixXd W(fan_out, fan_in);
    for (int r = 0; r < fan_out; ++r)
      for (int c = 0; c < fan_in; ++c) W(r, c) = rs.uniform(-limit, limit);
    W_.push_back(std::move(W));
    b_.push_back(Eigen::VectorXd::Zero(fan_out));
  }
}

Eigen::MatrixXd MLPModel::forward(const Eigen::MatrixXd& X) const {
  if (X.cols() != cfg_.input_width) {
    throw UsageError("mlp forward: expected " + std::to_string(cfg_.input_width) +
                     " features, got " + std::to_string(X.cols()));
  }
  Eigen::MatrixXd A = X;
  for (std::size_t l = 0; l < W_.size(); ++l) {
    Eigen::MatrixXd Z = A * W_[l].transpose();
    Z.rowwise() += b_[l].transpose();
    if (l + 1 < W_.size()) Z = Z.cwiseMax(0.0);  // ReLU on hidden layers
    A = std::move(Z);
  }
  return A;
}

Eigen::VectorXd MLPModel::predict(const Eigen::MatrixXd& X) const {
  Eigen::VectorXd out = forward(X).col(0);
  return out.cwiseMax(cfg_.target_min).cwiseMin(cfg_.target_max);
}

Eigen::MatrixXd MLPModel::predict_proba(const Eigen::MatrixXd& X) const {
  Eigen::MatrixXd Z = forward(X);
  // Row-wise stable softmax.
  Eigen::VectorXd rowmax = Z.rowwise().maxCoeff();
  Z.colwise() -= rowmax;
  Eigen::MatrixXd E = Z.array().exp().matrix();
  Eigen::VectorXd sums = E.rowwise().sum();
  E.array().colwise() /= sums.array();
  return E;
}

Eigen::VectorXi MLPModel::predict_class(const Eigen::MatrixXd& X) const {
  Eigen::MatrixXd P = predict_proba(X);
  Eigen::VectorXi cls(P.rows());
  for (Eigen::Index i = 0; i < P.rows(); ++i) {
    Eigen::Index best;
    P.row(i).maxCoeff(&best);
    cls[i] = static_cast<int>(best);
  }
  return cls;
}

Eigen::MatrixXd MLPModel::one_hot(const Eigen::VectorXd& labels, int classes) {
  Eigen::MatrixXd Y = Eigen::MatrixXd::Zero(labels.size(), classes);
  for (Eigen::Index i = 0; i < labels.size(); ++i) {
    const int c = static_cast<int>(labels[i]);
    if (c < 0 || c >= classes || labels[i] != std::floor(labels[i])) {
      throw UsageError("one_hot: label " + std::to_string(labels[i]) +
                       " outside 0.." + std::to_string(classes - 1));
    }
    Y(i, c) = 1.0;
  }
  return Y;
}

double MLPModel::loss_and_gradient(const Eigen::MatrixXd& X,
                                   const Eigen::MatrixXd& Y,
                                   std::vector<Eigen::MatrixXd>* dW,
                                   std::vector<Eigen::VectorXd>* db) const {
  if (X.rows() != Y.rows() || Y.cols() != cfg_.output_width) {
    throw UsageError("mlp loss: target shape mismatch");
  }
  const auto n = static_cast<double>(X.rows());
  const std::size_t L = W_.size();

  // Forward pass, keeping activations for the backward pass.
  std::vector<Eigen::MatrixXd> acts;  // acts[l] = input to layer l
  acts.reserve(L + 1);
  acts.push_back(X);
  for (std::size_t l = 0; l < L; ++l) {
    Eigen::MatrixXd Z = acts.back() * W_[l].transpose();
    Z.rowwise() += b_[l].transpose();
    if (l + 1 < L) Z = Z.cwiseMax(0.0);
    acts.push_back(std::move(Z));
  }
  const Eigen::MatrixXd& out = acts.back();

  double loss_value;
  Eigen::MatrixXd G;  // dLoss/dZ_L
  if (cfg_.loss == Loss::kMse) {
    Eigen::MatrixXd err = out - Y;
    loss_value = err.squaredNorm() / n;
    if (dW != nullptr) G = (2.0 / n) * err;
  } else {
    Eigen::VectorXd rowmax = out.rowwise().maxCoeff();
    Eigen::MatrixXd Zs = out.colwise() - rowmax;
    Eigen::MatrixXd E = Zs.array().exp().matrix();
    Eigen::VectorXd sums = E.rowwise().sum();
    Eigen::MatrixXd P = E.array().colwise() / sums.array();
    // L = -(1/n) sum log P[true]
    double acc = 0.0;
    for (Eigen::Index i = 0; i < out.rows(); ++i) {
      for (Eigen::Index c = 0; c < out.cols(); ++c) {
        if (Y(i, c) > 0.5) acc -= std::log(std::max(P(i, c), 1e-300));
      }
    }
    loss_value = acc / n;
    if (dW != nullptr) G = (P - Y) / n;
  }

  if (dW != nullptr && db != nullptr) {
    dW->assign(L, Eigen::MatrixXd());
    db->assign(L, Eigen::VectorXd());
    for (std::size_t l = L; l-- > 0;) {
      (*dW)[l] = G.transpose() * acts[l];
      (*db)[l] = G.colwise().sum().transpose();
      if (l > 0) {
        Eigen::MatrixXd back = G * W_[l];
        // ReLU mask: acts[l] is the post-activation of hidden layer l.
        back.array() *= (acts[l].array() > 0.0).cast<double>();
        G = std::move(back);
      }
    }
  }
  return loss_value;
}

namespace {

struct AdamState {
  std::vector<Eigen::MatrixXd> mW, vW;
  std::vector<Eigen::VectorXd> mb, vb;
  long t = 0;
};

void adam_step(MLPModel& model, const std::vector<Eigen::MatrixXd>& dW,
               const std::vector<Eigen::VectorXd>& db, AdamState& st,
               double lr) {
  constexpr double b1 = 0.9, b2 = 0.999, eps = 1e-8;
  ++st.t;
  const double corr1 = 1.0 - std::pow(b1, static_cast<double>(st.t));
  const double corr2 = 1.0 - std::pow(b2, static_cast<double>(st.t));
  for (std::size_t l = 0; l < dW.size(); ++l) {
    st.mW[l] = b1 * st.mW[l] + (1.0 - b1) * dW[l];
    st.vW[l] = b2 * st.vW[l].array().matrix() +
               (1.0 - b2) * dW[l].array().square().matrix();
    st.mb[l] = b1 * st.mb[l] + (1.0 - b1) * db[l];
    st.vb[l] = b2 * st.vb[l].array().matrix() +
               (1.0 - b2) * db[l].array().square().matrix();
    model.weights()[l].array() -=
        lr * (st.mW[l].array() / corr1) /
        ((st.vW[l].array() / corr2).sqrt() + eps);
    model.biases()[l].array() -=
        lr * (st.mb[l].array() / corr1) /
        ((st.vb[l].array() / corr2).sqrt() + eps);
  }
}

std::string history_tail(const TrainHistory& h) {
  std::string s = "train[";
  const std::size_t n = h.train_loss.size();
  for (std::size_t i = n > 3 ? n - 3 : 0; i < n; ++i) {
    s += std::to_string(h.train_loss[i]) + " ";
  }
  s += "] val[";
  const std::size_t m = h.val_loss.size();
  for (std::size_t i = m > 3 ? m - 3 : 0; i < m; ++i) {
    s += std::to_string(h.val_loss[i]) + " ";
  }
  return s + "]";
}

}  // namespace

MLPModel fit_mlp(const MLPConfig& cfg, const Eigen::MatrixXd& X_train,
                 const Eigen::MatrixXd& Y_train, const Eigen::MatrixXd& X_val,
                 const Eigen::MatrixXd& Y_val) {
  cfg.validate(false);
  if (X_train.rows() < 1) throw UsageError("fit_mlp: empty training set");
  if (X_train.cols() != cfg.input_width) {
    throw UsageError("fit_mlp: training width mismatch");
  }
  const bool has_val = X_val.rows() > 0;

  MLPModel model(cfg);
  AdamState st;
  for (const auto& W : model.weights()) {
    st.mW.push_back(Eigen::MatrixXd::Zero(W.rows(), W.cols()));
    st.vW.push_back(Eigen::MatrixXd::Zero(W.rows(), W.cols()));
  }
  for (const auto& b : model.biases()) {
    st.mb.push_back(Eigen::VectorXd::Zero(b.size()));
    st.vb.push_back(Eigen::VectorXd::Zero(b.size()));
  }

  const int n = static_cast<int>(X_train.rows());
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  rng::Stream shuffler(cfg.seed, /*stream_id=*/0x0bacd);

  double best_val = std::numeric_limits<double>::infinity();
  std::vector<Eigen::MatrixXd> best_W = model.weights();
  std::vector<Eigen::VectorXd> best_b = model.biases();
  int best_epoch = -1;
  int stale = 0;

  std::vector<Eigen::MatrixXd> dW;
  std::vector<Eigen::VectorXd> db;
  Eigen::MatrixXd bx, by;

  for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    rng::Stream es = shuffler.substream(static_cast<std::uint64_t>(epoch));
    es.shuffle(order);

    double epoch_loss = 0.0;
    int batches = 0;
    for (int start = 0; start < n; start += cfg.batch_size) {
      const int len = std::min(cfg.batch_size, n - start);
      bx.resize(len, X_train.cols());
      by.resize(len, Y_train.cols());
      for (int i = 0; i < len; ++i) {
        bx.row(i) = X_train.row(order[static_cast<std::size_t>(start + i)]);
        by.row(i) = Y_train.row(order[static_cast<std::size_t>(start + i)]);
      }
      const double batch_loss = model.loss_and_gradient(bx, by, &dW, &db);
      epoch_loss += batch_loss;
      ++batches;
      adam_step(model, dW, db, st, cfg.learning_rate);
    }
    epoch_loss /= std::max(1, batches);
    model.history.train_loss.push_back(epoch_loss);

    const double monitored =
        has_val ? model.loss(X_val, Y_val) : epoch_loss;
    if (has_val) model.history.val_loss.push_back(monitored);

    if (!std::isfinite(epoch_loss) || !std::isfinite(monitored)) {
      throw NumericError("fit_mlp: loss diverged at epoch " +
                         std::to_string(epoch) + " (lr=" +
                         std::to_string(cfg.learning_rate) + "); history " +
                         history_tail(model.history));
    }

    if (monitored < best_val - 1e-12) {
      best_val = monitored;
      best_W = model.weights();
      best_b = model.biases();
      best_epoch = epoch;
      stale = 0;
    } else if (++stale >= cfg.patience) {
      break;
    }
  }

  model.weights() = best_W;
  model.biases() = best_b;
  model.history.best_epoch = best_epoch;
  return model;
}

double gradient_check(const MLPModel& model, const Eigen::MatrixXd& X,
                      const Eigen::MatrixXd& Y, double step) {
  std::vector<Eigen::MatrixXd> dW;
  std::vector<Eigen::VectorXd> db;
  model.loss_and_gradient(X, Y, &dW, &db);

  MLPModel probe = model;  // mutate copies, restore via value semantics
  double worst = 0.0;
  auto check_param = [&](double* p, double analytic) {
    const double saved = *p;
    *p = saved + step;
    const double up = probe.loss(X, Y);
    *p = saved - step;
    const double dn = probe.loss(X, Y);
    *p = saved;
    const double fd = (up - dn) / (2.0 * step);
    const double rel =
        std::abs(fd - analytic) / std::max({1.0e-8, std::abs(fd), std::abs(analytic)});
    worst = std::max(worst, rel);
  };
  for (std::size_t l = 0; l < probe.weights().size(); ++l) {
    Eigen::MatrixXd& W = probe.weights()[l];
    for (Eigen::Index r = 0; r < W.rows(); ++r)
      for (Eigen::Index c = 0; c < W.cols(); ++c)
        check_param(&W(r, c), dW[l](r, c));
    Eigen::VectorXd& b = probe.biases()[l];
    for (Eigen::Index r = 0; r < b.size(); ++r) check_param(&b[r], db[l][r]);
  }
  return worst;
}

}  // namespace belltrace::learn
