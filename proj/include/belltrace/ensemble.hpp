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

#ifndef BELLTRACE_ENSEMBLE_HPP
#define BELLTRACE_ENSEMBLE_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "belltrace/dataset.hpp"
#include "belltrace/mlp.hpp"
#include "belltrace/trees.hpp"

namespace belltrace::learn {

// Evaluation summary. Regression fills mae; classification fills accuracy
// and the 3x3 confusion matrix (row = true class, column = predicted).
struct Metrics {
  double mae = 0.0;
  double accuracy = 0.0;
  Eigen::Matrix<long long, 3, 3> confusion =
      Eigen::Matrix<long long, 3, 3>::Zero();
};

Metrics evaluate_regression(const Eigen::VectorXd& predictions,
                            const Eigen::VectorXd& targets);
Metrics evaluate_classification(const Eigen::VectorXi& predictions,
                                const Eigen::VectorXd& targets);

// Deterministic row-index plan for the stacked pipeline, derived entirely
// from (dataset, seed): test partition first (probe rows forced there),
// then a held-out blending fold inside the training partition, then a
// train/validation split of what remains for the member networks.
struct FoldPlan {
  std::vector<int> member_train;
  std::vector<int> member_val;
  std::vector<int> blend;
  std::vector<int> test;
};

// Pipeline configuration: the member sweep (layer counts x widths), the
// shared trainer settings, split fractions, the survivor filter, and the
// polynomial baseline that anchors the regression filter threshold.
struct GridConfig {
  std::vector<int> layer_counts = {2, 3, 4, 5};
  std::vector<int> widths = {100, 150, 200, 250, 300, 350, 400, 450, 500};
  MLPConfig base;  // width/layers/seed/input/output overwritten per member

  double test_fraction = 0.25;
  double blend_fraction = 0.2;        // of the training partition
  double member_val_fraction = 0.15;  // of the member pool
  bool poly2 = true;                  // degree-2 feature expansion

  double filter_ratio = 0.7;    // regression: keep MAE < ratio * baseline
  double min_accuracy = 0.985;  // classification: keep accuracy >= floor
  int baseline_degree = 4;
  int baseline_max_columns = 5000;  // expansion cap before degrading
  double ridge = 1e-8;

  int workers = 1;          // member trainings run in parallel chunks
  std::uint64_t seed = 1;   // folds + per-member init seeds

  void validate() const;  // throws ConfigError
  int member_count() const {
    return static_cast<int>(layer_counts.size() * widths.size());
  }
};

// One sweep entry in the training ledger.
struct MemberRecord {
  int hidden_layers = 0;
  int hidden_width = 0;
  std::uint64_t seed = 0;
  double metric = 0.0;  // test MAE (regression) or test accuracy
  bool kept = false;
  bool failed = false;
  std::string note;  // failure reason when failed
};

// Stacked ensemble: surviving member networks plus a tree blender trained
// on their predictions (gradient-boosted regression trees for regression,
// extremely randomized trees for classification). Holds everything needed
// to reproduce its folds and to serialize/restore itself.
struct EnsembleModel {
  data::Task task = data::Task::kRegression;
  data::ScenarioSpec scenario;  // what the raw features describe
  GridConfig grid;
  int raw_width = 0;  // feature width before expansion
  double target_min = 0.0;
  double target_max = 1.0;
  double baseline_mae = 0.0;  // regression filter anchor (0 until computed)
  std::vector<MLPModel> members;
  std::vector<MemberRecord> ledger;
  bool has_blender = false;
  GBRTModel gbrt;
  ERTModel ert;

  void validate() const;  // throws ConfigError on structural breakage

  // Degree-2 expansion when the pipeline trained with it, else identity.
  Eigen::MatrixXd expand(const Eigen::MatrixXd& X_raw) const;

  // Stacking features from expanded inputs: one column of clamped
  // predictions per member (regression) or 3 probability columns per
  // member (classification).
  Eigen::MatrixXd member_matrix(const Eigen::MatrixXd& X_expanded) const;

  // End-to-end predictions from raw features. Regression output is clamped
  // to [target_min, target_max]. Falls back to the best surviving member
  // when no blender has been trained yet.
  Eigen::VectorXd predict(const Eigen::MatrixXd& X_raw) const;
  Eigen::VectorXi predict_class(const Eigen::MatrixXd& X_raw) const;
};

// --- pipeline stages ------------------------------------------------------

FoldPlan make_folds(const data::Dataset& d, const GridConfig& cfg);

// The sweep in ledger order: layer counts outer, widths inner; member i
// gets seed cfg.seed + i.
std::vector<MLPConfig> grid_configs(const GridConfig& cfg, int input_width);

// Least-squares polynomial baseline on the raw (unexpanded) features:
// all monomials of total degree <= cfg.baseline_degree including the
// constant, ridge-regularized. Returns the test MAE. If the expansion
// would exceed cfg.baseline_max_columns the degree degrades to 2 with a
// warning on stderr.
double fit_poly_baseline(const GridConfig& cfg, const Eigen::MatrixXd& X_train,
                         const Eigen::VectorXd& y_train,
                         const Eigen::MatrixXd& X_test,
                         const Eigen::VectorXd& y_test);

// Trains the member sweep and fills the ledger (metric/kept left for the
// filter). Individual divergence is recorded, not fatal, as long as at
// least one member trains.
std::vector<MLPModel> train_members(const GridConfig& cfg,
                                    const Eigen::MatrixXd& X_train,
                                    const Eigen::MatrixXd& Y_train,
                                    const Eigen::MatrixXd& X_val,
                                    const Eigen::MatrixXd& Y_val,
                                    std::vector<MemberRecord>* ledger);

// Marks survivors in the ledger and drops the rest from `members`.
// Regression keeps test MAE < filter_ratio * baseline (strict);
// classification keeps test accuracy >= min_accuracy. Throws TrainingError
// when nothing survives.
void filter_members(const GridConfig& cfg, double baseline_mae,
                    std::vector<MLPModel>* members,
                    std::vector<MemberRecord>* ledger);

// Fits the tree blender on the held-out blending fold (expanded features).
void train_blender(const Eigen::MatrixXd& X_blend_expanded,
                   const Eigen::VectorXd& y_blend, EnsembleModel* model);

// Full pipeline: folds -> expansion -> member sweep -> test-set ledger ->
// baseline + filter -> blender. `log`, when given, receives the
// human-readable stage log. The dataset's metadata must name its scenario
// (generated corpora always do). with_blender=false stops after the filter
// (predictions then fall back to the best member).
EnsembleModel train_pipeline(const data::Dataset& d, const GridConfig& cfg,
                             std::ostream* log = nullptr,
                             bool with_blender = true);

// Metrics of a trained ensemble on dataset rows (raw features).
Metrics evaluate(const EnsembleModel& model, const Eigen::MatrixXd& X_raw,
                 const Eigen::VectorXd& y);

// --- learning curve -------------------------------------------------------

struct CurvePoint {
  int train_size = 0;
  double mae = 0.0;
};

// Trains one fixed configuration per requested size on nested prefixes of
// the (seed-shuffled) training partition and reports test MAE. Sizes must
// be positive, strictly ascending, and fit in the training partition.
std::vector<CurvePoint> learning_curve(const data::Dataset& d,
                                       const std::vector<int>& sizes,
                                       const GridConfig& cfg);

// --- serialization --------------------------------------------------------

// Versioned plain-text model format (17 significant digits everywhere);
// save -> load round-trips bit-identical predictions.
void save_ensemble(const EnsembleModel& model, const std::string& path);
EnsembleModel load_ensemble(const std::string& path);

}  // namespace belltrace::learn

#endif  // BELLTRACE_ENSEMBLE_HPP
