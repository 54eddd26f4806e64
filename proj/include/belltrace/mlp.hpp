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

#ifndef BELLTRACE_MLP_HPP
#define BELLTRACE_MLP_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace belltrace::learn {

enum class Loss { kMse, kSoftmaxCrossEntropy };

struct MLPConfig {
  int input_width = 0;
  int output_width = 1;
  int hidden_layers = 2;
  int hidden_width = 100;
  // Default follows the reference training setup; small corpora usually
  // want a larger step (the pipeline presets override this).
  double learning_rate = 1e-5;
  int batch_size = 200;
  int max_epochs = 200;
  int patience = 10;  // epochs without validation improvement before stopping
  Loss loss = Loss::kMse;
  std::uint64_t seed = 0;
  // Regression predictions are clamped to [target_min, target_max].
  double target_min = 0.0;
  double target_max = 1.0;

  // Structural sanity always; with strict_grid also the sweep domain
  // (hidden_layers in [2,5], hidden_width a multiple of 50 in [100,500]).
  // Throws ConfigError.
  void validate(bool strict_grid = false) const;
};

struct TrainHistory {
  std::vector<double> train_loss;  // per epoch, running minibatch average
  std::vector<double> val_loss;    // per epoch, full validation pass
  int best_epoch = -1;             // epoch whose weights were kept
};

// Fully connected ReLU network trained with Adam. Weights start
// He-uniform (U(-sqrt(6/fan_in), +sqrt(6/fan_in))), biases at zero, both
// drawn deterministically from config().seed.
class MLPModel {
 public:
  MLPModel() = default;
  explicit MLPModel(const MLPConfig& cfg);  // initialized, untrained

  const MLPConfig& config() const { return cfg_; }
  int layer_count() const { return static_cast<int>(W_.size()); }

  // Raw network outputs, one row per sample (no clamping, no softmax).
  Eigen::MatrixXd forward(const Eigen::MatrixXd& X) const;

  // Regression predictions clamped to the configured target range.
  Eigen::VectorXd predict(const Eigen::MatrixXd& X) const;

  // Classification heads.
  Eigen::MatrixXd predict_proba(const Eigen::MatrixXd& X) const;
  Eigen::VectorXi predict_class(const Eigen::MatrixXd& X) const;

  // Mean loss over the batch; when dW/db are non-null they receive the
  // gradients (same shapes as the parameters). Exposed for the finite
  // difference test as well as the trainer.
  double loss_and_gradient(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y,
                           std::vector<Eigen::MatrixXd>* dW,
                           std::vector<Eigen::VectorXd>* db) const;
  double loss(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y) const {
    return loss_and_gradient(X, Y, nullptr, nullptr);
  }

  static Eigen::MatrixXd one_hot(const Eigen::VectorXd& labels, int classes);

  std::vector<Eigen::MatrixXd>& weights() { return W_; }
  std::vector<Eigen::VectorXd>& biases() { return b_; }
  const std::vector<Eigen::MatrixXd>& weights() const { return W_; }
  const std::vector<Eigen::VectorXd>& biases() const { return b_; }

  TrainHistory history;  // filled by fit_mlp

 private:
  MLPConfig cfg_;
  std::vector<Eigen::MatrixXd> W_;  // layer l maps in -> out, shape out x in
  std::vector<Eigen::VectorXd> b_;
};

// Minibatch Adam with early stopping: training stops after `patience`
// epochs without validation improvement (or at max_epochs) and the best
// validation weights are restored. Targets are one column for regression,
// one-hot rows for classification. Throws NumericError if the loss turns
// non-finite (message carries the tail of the history).
MLPModel fit_mlp(const MLPConfig& cfg, const Eigen::MatrixXd& X_train,
                 const Eigen::MatrixXd& Y_train, const Eigen::MatrixXd& X_val,
                 const Eigen::MatrixXd& Y_val);

// Relative-error finite-difference check of loss_and_gradient on the given
// batch; returns the worst relative mismatch across all parameters.
double gradient_check(const MLPModel& model, const Eigen::MatrixXd& X,
                      const Eigen::MatrixXd& Y, double step = 1e-6);

}  // namespace belltrace::learn

#endif  // BELLTRACE_MLP_HPP
