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

#include "belltrace/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numeric>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include "belltrace/errors.hpp"
#include "belltrace/rng.hpp"

namespace belltrace::learn {

namespace {

std::string num17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

// ---------------------------------------------------------------------------
// metrics

Metrics evaluate_regression(const Eigen::VectorXd& predictions,
                            const Eigen::VectorXd& targets) {
  if (predictions.size() != targets.size() || predictions.size() == 0) {
    throw UsageError("evaluate: prediction/target size mismatch or empty");
  }
  Metrics m;
  m.mae = (predictions - targets).cwiseAbs().mean();
  return m;
}

Metrics evaluate_classification(const Eigen::VectorXi& predictions,
                                const Eigen::VectorXd& targets) {
  if (predictions.size() != targets.size() || predictions.size() == 0) {
    throw UsageError("evaluate: prediction/target size mismatch or empty");
  }
  Metrics m;
  long long hits = 0;
  for (Eigen::Index i = 0; i < predictions.size(); ++i) {
    const int truth = static_cast<int>(targets[i]);
    const int pred = predictions[i];
    if (truth < 0 || truth > 2 || pred < 0 || pred > 2) {
      throw UsageError("evaluate: class labels must lie in {0,1,2}");
    }
    m.confusion(truth, pred) += 1;
    if (truth == pred) ++hits;
  }
  m.accuracy =
      static_cast<double>(hits) / static_cast<double>(predictions.size());
  return m;
}

// ---------------------------------------------------------------------------
// configuration

void GridConfig::validate() const {
  if (layer_counts.empty() || widths.empty()) {
    throw ConfigError("grid: empty layer or width sweep");
  }
  if (std::set<int>(layer_counts.begin(), layer_counts.end()).size() !=
          layer_counts.size() ||
      std::set<int>(widths.begin(), widths.end()).size() != widths.size()) {
    throw ConfigError("grid: sweep entries must be distinct");
  }
  auto in01 = [](double f) { return f > 0.0 && f < 1.0; };
  if (!in01(test_fraction) || !in01(blend_fraction) ||
      !in01(member_val_fraction)) {
    throw ConfigError("grid: split fractions must lie in (0, 1)");
  }
  if (!(filter_ratio > 0.0 && filter_ratio <= 1.0)) {
    throw ConfigError("grid: filter ratio must lie in (0, 1]");
  }
  if (!(min_accuracy > 0.0 && min_accuracy <= 1.0)) {
    throw ConfigError("grid: accuracy floor must lie in (0, 1]");
  }
  if (baseline_degree < 1 || baseline_degree > 8) {
    throw ConfigError("grid: baseline degree must lie in [1, 8]");
  }
  if (baseline_max_columns < 10) {
    throw ConfigError("grid: baseline column cap too small");
  }
  if (ridge < 0.0) throw ConfigError("grid: ridge must be >= 0");
  if (workers < 0) throw ConfigError("grid: workers must be >= 0");
}

// ---------------------------------------------------------------------------
// folds

FoldPlan make_folds(const data::Dataset& d, const GridConfig& cfg) {
  cfg.validate();
  const auto split = data::train_test_split(d, cfg.test_fraction, cfg.seed);

  std::vector<int> pool = split.train_rows;
  rng::Stream shuffler(cfg.seed, /*stream_id=*/0xb1e4d);
  shuffler.shuffle(pool);

  const auto pool_n = static_cast<long>(pool.size());
  long n_blend = std::lround(cfg.blend_fraction * static_cast<double>(pool_n));
  n_blend = std::clamp(n_blend, 1L, pool_n - 2);
  if (pool_n < 3) {
    throw ConfigError("dataset too small for blend/member folds (training "
                      "partition has " + std::to_string(pool_n) + " rows)");
  }

  FoldPlan plan;
  plan.test = split.test_rows;
  plan.blend.assign(pool.begin(), pool.begin() + n_blend);

  const long rest_n = pool_n - n_blend;
  long n_val =
      std::lround(cfg.member_val_fraction * static_cast<double>(rest_n));
  n_val = std::clamp(n_val, 1L, rest_n - 1);
  plan.member_val.assign(pool.begin() + n_blend, pool.begin() + n_blend + n_val);
  plan.member_train.assign(pool.begin() + n_blend + n_val, pool.end());

  std::sort(plan.member_train.begin(), plan.member_train.end());
  std::sort(plan.member_val.begin(), plan.member_val.end());
  std::sort(plan.blend.begin(), plan.blend.end());
  std::sort(plan.test.begin(), plan.test.end());
  return plan;
}

// ---------------------------------------------------------------------------
// member sweep

std::vector<MLPConfig> grid_configs(const GridConfig& cfg, int input_width) {
  cfg.validate();
  std::vector<MLPConfig> out;
  out.reserve(static_cast<std::size_t>(cfg.member_count()));
  std::uint64_t index = 0;
  for (int layers : cfg.layer_counts) {
    for (int width : cfg.widths) {
      MLPConfig c = cfg.base;
      c.input_width = input_width;
      c.hidden_layers = layers;
      c.hidden_width = width;
      c.seed = cfg.seed + index++;
      c.validate(/*strict_grid=*/true);
      out.push_back(c);
    }
  }
  return out;
}

std::vector<MLPModel> train_members(const GridConfig& cfg,
                                    const Eigen::MatrixXd& X_train,
                                    const Eigen::MatrixXd& Y_train,
                                    const Eigen::MatrixXd& X_val,
                                    const Eigen::MatrixXd& Y_val,
                                    std::vector<MemberRecord>* ledger) {
  const auto configs = grid_configs(cfg, static_cast<int>(X_train.cols()));
  const int count = static_cast<int>(configs.size());
  std::vector<std::optional<MLPModel>> slots(static_cast<std::size_t>(count));
  std::vector<std::string> notes(static_cast<std::size_t>(count));

  int workers = cfg.workers;
  if (workers == 0) {
    workers = static_cast<int>(std::thread::hardware_concurrency());
    if (workers < 1) workers = 1;
  }
  workers = std::min(workers, count);

  std::vector<std::exception_ptr> hard(static_cast<std::size_t>(workers));
  auto run_chunk = [&](int w, int begin, int end) {
    try {
      for (int i = begin; i < end; ++i) {
        try {
          slots[static_cast<std::size_t>(i)] =
              fit_mlp(configs[static_cast<std::size_t>(i)], X_train, Y_train,
                      X_val, Y_val);
        } catch (const NumericError& e) {
          notes[static_cast<std::size_t>(i)] = e.what();
        }
      }
    } catch (...) {
      hard[static_cast<std::size_t>(w)] = std::current_exception();
    }
  };

  if (workers <= 1) {
    run_chunk(0, 0, count);
  } else {
    std::vector<std::thread> threads;
    const int chunk = (count + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
      const int begin = w * chunk;
      const int end = std::min(count, begin + chunk);
      if (begin >= end) break;
      threads.emplace_back(run_chunk, w, begin, end);
    }
    for (auto& t : threads) t.join();
  }
  for (auto& e : hard) {
    if (e) std::rethrow_exception(e);
  }

  std::vector<MLPModel> members;
  if (ledger != nullptr) ledger->clear();
  for (int i = 0; i < count; ++i) {
    const auto& c = configs[static_cast<std::size_t>(i)];
    MemberRecord rec;
    rec.hidden_layers = c.hidden_layers;
    rec.hidden_width = c.hidden_width;
    rec.seed = c.seed;
    rec.failed = !slots[static_cast<std::size_t>(i)].has_value();
    rec.note = notes[static_cast<std::size_t>(i)];
    if (!rec.failed) {
      members.push_back(std::move(*slots[static_cast<std::size_t>(i)]));
    }
    if (ledger != nullptr) ledger->push_back(std::move(rec));
  }
  if (members.empty()) {
    throw TrainingError("every member in the sweep diverged; first failure: " +
                        (notes.empty() ? std::string("(none)") : notes[0]));
  }
  return members;
}

// ---------------------------------------------------------------------------
// polynomial baseline

namespace {

// All exponent vectors over k variables with total degree <= degree,
// constant included.
void enumerate_exponents(int k, int degree, std::vector<int>& current,
                         std::vector<std::vector<int>>& out) {
  if (static_cast<int>(current.size()) == k) {
    out.push_back(current);
    return;
  }
  for (int e = 0; e <= degree; ++e) {
    current.push_back(e);
    enumerate_exponents(k, degree - e, current, out);
    current.pop_back();
  }
}

long long monomial_count(int k, int degree) {
  // C(k + degree, degree)
  long long c = 1;
  for (int i = 1; i <= degree; ++i) {
    c = c * (k + i) / i;
  }
  return c;
}

Eigen::MatrixXd monomial_design(const Eigen::MatrixXd& X,
                                const std::vector<std::vector<int>>& expos) {
  Eigen::MatrixXd A(X.rows(), static_cast<Eigen::Index>(expos.size()));
  for (std::size_t j = 0; j < expos.size(); ++j) {
    Eigen::VectorXd col = Eigen::VectorXd::Ones(X.rows());
    for (int f = 0; f < static_cast<int>(expos[j].size()); ++f) {
      for (int e = 0; e < expos[j][static_cast<std::size_t>(f)]; ++e) {
        col.array() *= X.col(f).array();
      }
    }
    A.col(static_cast<Eigen::Index>(j)) = col;
  }
  return A;
}

}  // namespace

double fit_poly_baseline(const GridConfig& cfg, const Eigen::MatrixXd& X_train,
                         const Eigen::VectorXd& y_train,
                         const Eigen::MatrixXd& X_test,
                         const Eigen::VectorXd& y_test) {
  if (X_train.rows() != y_train.size() || X_test.rows() != y_test.size() ||
      X_train.rows() == 0 || X_test.rows() == 0 ||
      X_train.cols() != X_test.cols()) {
    throw UsageError("poly baseline: inconsistent shapes");
  }
  const int k = static_cast<int>(X_train.cols());
  int degree = cfg.baseline_degree;
  if (monomial_count(k, degree) > cfg.baseline_max_columns && degree > 2) {
    std::cerr << "warning: degree-" << degree << " baseline would need "
              << monomial_count(k, degree) << " columns (cap "
              << cfg.baseline_max_columns << "); degrading to degree-2\n";
    degree = 2;
  }

  std::vector<std::vector<int>> expos;
  std::vector<int> current;
  enumerate_exponents(k, degree, current, expos);

  const Eigen::MatrixXd A = monomial_design(X_train, expos);
  Eigen::MatrixXd gram = A.transpose() * A;
  gram.diagonal().array() += cfg.ridge;
  const Eigen::VectorXd w = gram.ldlt().solve(A.transpose() * y_train);

  const Eigen::MatrixXd At = monomial_design(X_test, expos);
  return (At * w - y_test).cwiseAbs().mean();
}

// ---------------------------------------------------------------------------
// filtering

void filter_members(const GridConfig& cfg, double baseline_mae,
                    std::vector<MLPModel>* members,
                    std::vector<MemberRecord>* ledger) {
  if (members == nullptr || ledger == nullptr) {
    throw UsageError("filter_members: null arguments");
  }
  // members[i] pairs with the i-th non-failed ledger entry.
  std::vector<MLPModel> kept;
  std::size_t mi = 0;
  bool classification = false;
  if (!members->empty()) {
    classification =
        (*members)[0].config().loss == Loss::kSoftmaxCrossEntropy;
  }
  for (auto& rec : *ledger) {
    if (rec.failed) continue;
    const bool survive = classification
                             ? rec.metric >= cfg.min_accuracy
                             : rec.metric < cfg.filter_ratio * baseline_mae;
    rec.kept = survive;
    if (survive) kept.push_back(std::move((*members)[mi]));
    ++mi;
  }
  if (mi != members->size()) {
    throw UsageError("filter_members: ledger does not match member list");
  }
  if (kept.empty()) {
    throw TrainingError(
        classification
            ? "no member reached the accuracy floor; grow the corpus or "
              "train longer"
            : "every member missed the baseline filter; grow the corpus or "
              "train longer");
  }
  *members = std::move(kept);
}

// ---------------------------------------------------------------------------
// ensemble model

void EnsembleModel::validate() const {
  if (members.empty()) throw ConfigError("ensemble: no members");
  if (raw_width < 1) throw ConfigError("ensemble: raw feature width unset");
  if (scenario.feature_width() != raw_width) {
    throw ConfigError("ensemble: scenario '" + scenario.name() +
                      "' does not match the raw feature width");
  }
  if (!(target_max > target_min)) {
    throw ConfigError("ensemble: bad target range");
  }
  const int stack_width = static_cast<int>(members.size()) *
                          (task == data::Task::kClassification ? 3 : 1);
  auto check_trees = [&](const std::vector<Tree>& trees) {
    for (const Tree& t : trees) {
      if (t.nodes.empty()) throw ConfigError("ensemble: empty blender tree");
      for (const TreeNode& nd : t.nodes) {
        if (!nd.is_leaf() && nd.feature >= stack_width) {
          throw ConfigError("ensemble: blender splits on a feature beyond "
                            "the member stack");
        }
      }
    }
  };
  if (has_blender) {
    if (task == data::Task::kRegression) {
      if (gbrt.trees().empty()) throw ConfigError("ensemble: blender unset");
      check_trees(gbrt.trees());
    } else {
      if (ert.trees().empty()) throw ConfigError("ensemble: blender unset");
      check_trees(ert.trees());
    }
  }
}

Eigen::MatrixXd EnsembleModel::expand(const Eigen::MatrixXd& X_raw) const {
  if (static_cast<int>(X_raw.cols()) != raw_width) {
    throw UsageError("ensemble: expected " + std::to_string(raw_width) +
                     " raw features, got " + std::to_string(X_raw.cols()));
  }
  return grid.poly2 ? data::poly2_features(X_raw) : X_raw;
}

Eigen::MatrixXd EnsembleModel::member_matrix(
    const Eigen::MatrixXd& X_expanded) const {
  const int count = static_cast<int>(members.size());
  if (count == 0) throw UsageError("ensemble: no members");
  if (task == data::Task::kRegression) {
    Eigen::MatrixXd F(X_expanded.rows(), count);
    for (int i = 0; i < count; ++i) {
      F.col(i) = members[static_cast<std::size_t>(i)].predict(X_expanded);
    }
    return F;
  }
  Eigen::MatrixXd F(X_expanded.rows(), 3 * count);
  for (int i = 0; i < count; ++i) {
    F.middleCols(3 * i, 3) =
        members[static_cast<std::size_t>(i)].predict_proba(X_expanded);
  }
  return F;
}

namespace {

// members[i] pairs with the i-th kept ledger entry once filtering ran;
// pick the strongest survivor for blender-less prediction.
std::size_t best_member_index(const EnsembleModel& model) {
  if (model.ledger.empty() || model.members.empty()) return 0;
  const bool classification = model.task == data::Task::kClassification;
  std::size_t best = 0, mi = 0;
  bool found = false;
  double best_metric = 0.0;
  for (const auto& rec : model.ledger) {
    if (rec.failed || !rec.kept) continue;
    if (mi >= model.members.size()) break;
    const bool better = !found || (classification ? rec.metric > best_metric
                                                  : rec.metric < best_metric);
    if (better) {
      best = mi;
      best_metric = rec.metric;
      found = true;
    }
    ++mi;
  }
  return best;
}

}  // namespace

Eigen::VectorXd EnsembleModel::predict(const Eigen::MatrixXd& X_raw) const {
  if (task != data::Task::kRegression) {
    throw UsageError("ensemble: predict() is for regression models");
  }
  const Eigen::MatrixXd Xe = expand(X_raw);
  if (!has_blender) {
    return members[best_member_index(*this)].predict(Xe);
  }
  Eigen::VectorXd out = gbrt.predict(member_matrix(Xe));
  return out.cwiseMax(target_min).cwiseMin(target_max);
}

Eigen::VectorXi EnsembleModel::predict_class(
    const Eigen::MatrixXd& X_raw) const {
  if (task != data::Task::kClassification) {
    throw UsageError("ensemble: predict_class() is for classifiers");
  }
  const Eigen::MatrixXd Xe = expand(X_raw);
  if (!has_blender) {
    return members[best_member_index(*this)].predict_class(Xe);
  }
  return ert.predict(member_matrix(Xe));
}

// ---------------------------------------------------------------------------
// blender + pipeline

void train_blender(const Eigen::MatrixXd& X_blend_expanded,
                   const Eigen::VectorXd& y_blend, EnsembleModel* model) {
  if (model == nullptr || model->members.empty()) {
    throw UsageError("train_blender: need a trained member set");
  }
  if (X_blend_expanded.rows() != y_blend.size() ||
      X_blend_expanded.rows() == 0) {
    throw UsageError("train_blender: bad blend fold shapes");
  }
  const Eigen::MatrixXd F = model->member_matrix(X_blend_expanded);
  if (model->task == data::Task::kRegression) {
    GBRTConfig cfg;  // 100 trees, depth 3, shrinkage 0.1
    model->gbrt = fit_gbrt(cfg, F, y_blend);
  } else {
    ERTConfig cfg;  // 100 trees, unlimited depth, random thresholds
    cfg.seed = model->grid.seed;
    Eigen::VectorXi labels(y_blend.size());
    for (Eigen::Index i = 0; i < y_blend.size(); ++i) {
      labels[i] = static_cast<int>(y_blend[i]);
    }
    model->ert = fit_ert(cfg, F, labels);
  }
  model->has_blender = true;
}

namespace {

double dataset_target_max(const data::Dataset& d) {
  auto it = d.metadata.find("target_max");
  if (it != d.metadata.end()) return std::stod(it->second);
  // No sidecar: infer the clamp range from the observed targets.
  return d.y.maxCoeff() <= 0.5 ? 0.5 : 1.0;
}

data::ScenarioSpec dataset_scenario(const data::Dataset& d) {
  const auto it = d.metadata.find("scenario");
  if (it == d.metadata.end()) {
    throw ConfigError(
        "dataset metadata lacks a scenario entry; regenerate with the "
        "sidecar or set one explicitly");
  }
  int m = 2;
  const auto mit = d.metadata.find("m");
  if (mit != d.metadata.end()) m = std::stoi(mit->second);
  return data::ScenarioSpec::parse(it->second, m);
}

}  // namespace

EnsembleModel train_pipeline(const data::Dataset& d, const GridConfig& cfg,
                             std::ostream* log, bool with_blender) {
  d.validate();
  cfg.validate();
  const bool classification = d.task == data::Task::kClassification;

  EnsembleModel model;
  model.task = d.task;
  model.scenario = dataset_scenario(d);
  model.grid = cfg;
  model.raw_width = d.width();
  model.target_min = 0.0;
  model.target_max = classification ? 2.0 : dataset_target_max(d);

  model.grid.base.loss =
      classification ? Loss::kSoftmaxCrossEntropy : Loss::kMse;
  model.grid.base.output_width = classification ? 3 : 1;
  model.grid.base.target_min = 0.0;
  model.grid.base.target_max = classification ? 1.0 : model.target_max;

  const FoldPlan folds = make_folds(d, cfg);
  const Eigen::MatrixXd Xe =
      cfg.poly2 ? data::poly2_features(d.X) : d.X;
  if (log != nullptr) {
    *log << "[folds] member_train=" << folds.member_train.size()
         << " member_val=" << folds.member_val.size()
         << " blend=" << folds.blend.size() << " test=" << folds.test.size()
         << "\n[features] raw=" << d.width() << " expanded=" << Xe.cols()
         << (cfg.poly2 ? " (degree-2 expansion)" : "") << "\n";
  }

  const Eigen::MatrixXd Xm = data::take_rows(Xe, folds.member_train);
  const Eigen::MatrixXd Xv = data::take_rows(Xe, folds.member_val);
  const Eigen::MatrixXd Xb = data::take_rows(Xe, folds.blend);
  const Eigen::MatrixXd Xt = data::take_rows(Xe, folds.test);
  const Eigen::VectorXd ym = data::take_rows(d.y, folds.member_train);
  const Eigen::VectorXd yv = data::take_rows(d.y, folds.member_val);
  const Eigen::VectorXd yb = data::take_rows(d.y, folds.blend);
  const Eigen::VectorXd yt = data::take_rows(d.y, folds.test);

  Eigen::MatrixXd Ym, Yv;
  if (classification) {
    Ym = MLPModel::one_hot(ym, 3);
    Yv = MLPModel::one_hot(yv, 3);
  } else {
    Ym = ym;
    Yv = yv;
  }

  model.members =
      train_members(model.grid, Xm, Ym, Xv, Yv, &model.ledger);

  // Ledger metrics come from the shared test partition, the same yardstick
  // the survivor filter threshold uses.
  {
    std::size_t mi = 0;
    for (auto& rec : model.ledger) {
      if (rec.failed) continue;
      const MLPModel& member = model.members[mi++];
      if (classification) {
        rec.metric =
            evaluate_classification(member.predict_class(Xt), yt).accuracy;
      } else {
        rec.metric = evaluate_regression(member.predict(Xt), yt).mae;
      }
    }
  }

  if (!classification) {
    const Eigen::MatrixXd Xraw_pool = data::take_rows(
        d.X, [&] {
          std::vector<int> pool = folds.member_train;
          pool.insert(pool.end(), folds.member_val.begin(),
                      folds.member_val.end());
          std::sort(pool.begin(), pool.end());
          return pool;
        }());
    const Eigen::VectorXd y_pool = [&] {
      std::vector<int> pool = folds.member_train;
      pool.insert(pool.end(), folds.member_val.begin(),
                  folds.member_val.end());
      std::sort(pool.begin(), pool.end());
      return data::take_rows(d.y, pool);
    }();
    const Eigen::MatrixXd Xraw_test = data::take_rows(d.X, folds.test);
    model.baseline_mae =
        fit_poly_baseline(cfg, Xraw_pool, y_pool, Xraw_test, yt);
    if (log != nullptr) {
      *log << "[baseline] degree-" << cfg.baseline_degree
           << " test MAE = " << num17(model.baseline_mae)
           << " (filter keeps MAE < "
           << num17(cfg.filter_ratio * model.baseline_mae) << ")\n";
    }
  }

  const auto log_members = [&] {
    if (log == nullptr) return;
    for (const auto& rec : model.ledger) {
      *log << "[member] layers=" << rec.hidden_layers
           << " width=" << rec.hidden_width;
      if (rec.failed) {
        *log << " FAILED (" << rec.note << ")\n";
      } else {
        *log << (classification ? " accuracy=" : " mae=")
             << num17(rec.metric) << (rec.kept ? " kept" : " dropped")
             << "\n";
      }
    }
  };
  try {
    filter_members(cfg, model.baseline_mae, &model.members, &model.ledger);
  } catch (const TrainingError&) {
    // Surface the per-member scores so a starved run can be diagnosed.
    log_members();
    throw;
  }
  log_members();
  if (log != nullptr) {
    *log << "[filter] kept " << model.members.size() << "/"
         << model.ledger.size() << " members\n";
  }

  if (with_blender) train_blender(Xb, yb, &model);
  model.validate();

  if (log != nullptr) {
    if (classification) {
      const Metrics m = evaluate_classification(model.predict_class(
                            data::take_rows(d.X, folds.test)), yt);
      *log << "[ensemble] test accuracy = " << num17(m.accuracy)
           << "\n[ensemble] confusion (rows = true class):\n";
      for (int r = 0; r < 3; ++r) {
        *log << "  " << m.confusion(r, 0) << " " << m.confusion(r, 1) << " "
             << m.confusion(r, 2) << "\n";
      }
    } else {
      const Metrics m = evaluate_regression(
          model.predict(data::take_rows(d.X, folds.test)), yt);
      double best = 0.0;
      bool first = true;
      for (const auto& rec : model.ledger) {
        if (rec.failed || !rec.kept) continue;
        if (first || rec.metric < best) best = rec.metric;
        first = false;
      }
      *log << "[ensemble] test MAE = " << num17(m.mae)
           << " (best member " << num17(best) << ")\n";
    }
  }
  return model;
}

Metrics evaluate(const EnsembleModel& model, const Eigen::MatrixXd& X_raw,
                 const Eigen::VectorXd& y) {
  if (model.task == data::Task::kClassification) {
    return evaluate_classification(model.predict_class(X_raw), y);
  }
  return evaluate_regression(model.predict(X_raw), y);
}

// ---------------------------------------------------------------------------
// learning curve

std::vector<CurvePoint> learning_curve(const data::Dataset& d,
                                       const std::vector<int>& sizes,
                                       const GridConfig& cfg) {
  if (d.task != data::Task::kRegression) {
    throw UsageError("learning curve: regression datasets only");
  }
  if (sizes.empty()) throw UsageError("learning curve: no sizes given");
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (sizes[i] < 1) {
      throw UsageError("learning curve: sizes must be positive");
    }
    if (i > 0 && sizes[i] <= sizes[i - 1]) {
      throw UsageError("learning curve: sizes must be strictly ascending");
    }
  }
  cfg.validate();

  const auto split = data::train_test_split(d, cfg.test_fraction, cfg.seed);
  std::vector<int> pool = split.train_rows;
  rng::Stream shuffler(cfg.seed, /*stream_id=*/0xcc42);
  shuffler.shuffle(pool);
  if (sizes.back() > static_cast<int>(pool.size())) {
    throw UsageError("learning curve: size " + std::to_string(sizes.back()) +
                     " exceeds the training partition (" +
                     std::to_string(pool.size()) + " rows)");
  }

  const Eigen::MatrixXd Xe =
      cfg.poly2 ? data::poly2_features(d.X) : d.X;
  const Eigen::MatrixXd Xt = data::take_rows(Xe, split.test_rows);
  const Eigen::VectorXd yt = data::take_rows(d.y, split.test_rows);

  MLPConfig base = cfg.base;
  base.input_width = static_cast<int>(Xe.cols());
  base.output_width = 1;
  base.loss = Loss::kMse;
  base.target_min = 0.0;
  base.target_max = dataset_target_max(d);
  base.validate();

  std::vector<CurvePoint> curve;
  for (int n : sizes) {
    std::vector<int> prefix(pool.begin(), pool.begin() + n);
    long n_val = std::lround(cfg.member_val_fraction * n);
    n_val = std::clamp(n_val, n > 1 ? 1L : 0L, static_cast<long>(n - 1));
    std::vector<int> val_rows(prefix.begin(), prefix.begin() + n_val);
    std::vector<int> train_rows(prefix.begin() + n_val, prefix.end());

    const MLPModel model = fit_mlp(
        base, data::take_rows(Xe, train_rows),
        Eigen::MatrixXd(data::take_rows(d.y, train_rows)),
        data::take_rows(Xe, val_rows),
        Eigen::MatrixXd(data::take_rows(d.y, val_rows)));
    curve.push_back({n, evaluate_regression(model.predict(Xt), yt).mae});
  }
  return curve;
}

// ---------------------------------------------------------------------------
// serialization

namespace {

constexpr const char* kMagic = "belltrace-model";
constexpr int kVersion = 1;

void expect(std::istream& is, const std::string& literal) {
  std::string tok;
  if (!(is >> tok) || tok != literal) {
    throw DataError("model file: expected '" + literal + "', got '" + tok +
                    "'");
  }
}

template <typename T>
T read_value(std::istream& is, const char* what) {
  T v;
  if (!(is >> v)) {
    throw DataError(std::string("model file: cannot read ") + what);
  }
  return v;
}

const char* loss_name(Loss l) {
  return l == Loss::kMse ? "mse" : "ce";
}

Loss loss_from_name(const std::string& s) {
  if (s == "mse") return Loss::kMse;
  if (s == "ce") return Loss::kSoftmaxCrossEntropy;
  throw DataError("model file: unknown loss '" + s + "'");
}

void write_mlp(std::ostream& os, const MLPModel& m) {
  const MLPConfig& c = m.config();
  os << "mlp " << c.input_width << ' ' << c.output_width << ' '
     << c.hidden_layers << ' ' << c.hidden_width << ' '
     << num17(c.learning_rate) << ' ' << c.batch_size << ' ' << c.max_epochs
     << ' ' << c.patience << ' ' << loss_name(c.loss) << ' ' << c.seed << ' '
     << num17(c.target_min) << ' ' << num17(c.target_max) << '\n';
  for (int l = 0; l < m.layer_count(); ++l) {
    const auto& W = m.weights()[static_cast<std::size_t>(l)];
    const auto& b = m.biases()[static_cast<std::size_t>(l)];
    os << "W " << W.rows() << ' ' << W.cols() << '\n';
    for (Eigen::Index r = 0; r < W.rows(); ++r) {
      for (Eigen::Index cc = 0; cc < W.cols(); ++cc) {
        os << (cc ? " " : "") << num17(W(r, cc));
      }
      os << '\n';
    }
    os << "b " << b.size() << '\n';
    for (Eigen::Index r = 0; r < b.size(); ++r) {
      os << (r ? " " : "") << num17(b[r]);
    }
    os << '\n';
  }
}

MLPModel read_mlp(std::istream& is) {
  expect(is, "mlp");
  MLPConfig c;
  c.input_width = read_value<int>(is, "input width");
  c.output_width = read_value<int>(is, "output width");
  c.hidden_layers = read_value<int>(is, "hidden layers");
  c.hidden_width = read_value<int>(is, "hidden width");
  c.learning_rate = read_value<double>(is, "learning rate");
  c.batch_size = read_value<int>(is, "batch size");
  c.max_epochs = read_value<int>(is, "max epochs");
  c.patience = read_value<int>(is, "patience");
  c.loss = loss_from_name(read_value<std::string>(is, "loss"));
  c.seed = read_value<std::uint64_t>(is, "seed");
  c.target_min = read_value<double>(is, "target min");
  c.target_max = read_value<double>(is, "target max");
  c.validate();

  MLPModel m(c);
  for (int l = 0; l < m.layer_count(); ++l) {
    expect(is, "W");
    const auto rows = read_value<Eigen::Index>(is, "weight rows");
    const auto cols = read_value<Eigen::Index>(is, "weight cols");
    auto& W = m.weights()[static_cast<std::size_t>(l)];
    if (rows != W.rows() || cols != W.cols()) {
      throw DataError("model file: layer " + std::to_string(l) +
                      " shape mismatch");
    }
    for (Eigen::Index r = 0; r < rows; ++r) {
      for (Eigen::Index cc = 0; cc < cols; ++cc) {
        W(r, cc) = read_value<double>(is, "weight");
      }
    }
    expect(is, "b");
    const auto bn = read_value<Eigen::Index>(is, "bias size");
    auto& b = m.biases()[static_cast<std::size_t>(l)];
    if (bn != b.size()) {
      throw DataError("model file: bias " + std::to_string(l) +
                      " shape mismatch");
    }
    for (Eigen::Index r = 0; r < bn; ++r) {
      b[r] = read_value<double>(is, "bias");
    }
  }
  return m;
}

void write_trees(std::ostream& os, const std::vector<Tree>& trees,
                 int dist_width) {
  for (const Tree& t : trees) {
    os << "tree " << t.nodes.size() << '\n';
    for (const TreeNode& nd : t.nodes) {
      os << nd.feature << ' ' << num17(nd.threshold) << ' ' << nd.left << ' '
         << nd.right << ' ' << num17(nd.value);
      for (int c = 0; c < dist_width; ++c) {
        os << ' ' << num17(nd.dist.size() == dist_width ? nd.dist[c] : 0.0);
      }
      os << '\n';
    }
  }
}

std::vector<Tree> read_trees(std::istream& is, int count, int dist_width) {
  std::vector<Tree> trees;
  trees.reserve(static_cast<std::size_t>(count));
  for (int t = 0; t < count; ++t) {
    expect(is, "tree");
    const int n = read_value<int>(is, "node count");
    if (n < 1) throw DataError("model file: empty tree");
    Tree tree;
    tree.nodes.resize(static_cast<std::size_t>(n));
    for (TreeNode& nd : tree.nodes) {
      nd.feature = read_value<int>(is, "node feature");
      nd.threshold = read_value<double>(is, "node threshold");
      nd.left = read_value<int>(is, "node left");
      nd.right = read_value<int>(is, "node right");
      nd.value = read_value<double>(is, "node value");
      Eigen::VectorXd dist(dist_width);
      for (int c = 0; c < dist_width; ++c) {
        dist[c] = read_value<double>(is, "node distribution");
      }
      if (nd.is_leaf() && dist_width > 0) nd.dist = dist;
      if (nd.left >= n || nd.right >= n) {
        throw DataError("model file: tree child index out of range");
      }
    }
    trees.push_back(std::move(tree));
  }
  return trees;
}

template <typename T>
void write_list(std::ostream& os, const char* key, const std::vector<T>& v) {
  os << key << ' ' << v.size();
  for (const T& x : v) os << ' ' << x;
  os << '\n';
}

template <typename T>
std::vector<T> read_list(std::istream& is, const char* key) {
  expect(is, key);
  const int n = read_value<int>(is, key);
  if (n < 0) throw DataError(std::string("model file: bad ") + key);
  std::vector<T> v(static_cast<std::size_t>(n));
  for (auto& x : v) x = read_value<T>(is, key);
  return v;
}

}  // namespace

void save_ensemble(const EnsembleModel& model, const std::string& path) {
  model.validate();
  std::ofstream os(path);
  if (!os) throw DataError("cannot open '" + path + "' for writing");

  os << kMagic << ' ' << kVersion << '\n';
  os << "task " << data::to_string(model.task) << '\n';
  os << "scenario " << model.scenario.name() << ' ' << model.scenario.m
     << '\n';
  os << "raw_width " << model.raw_width << '\n';
  os << "target " << num17(model.target_min) << ' ' << num17(model.target_max)
     << '\n';
  os << "baseline " << num17(model.baseline_mae) << '\n';

  const GridConfig& g = model.grid;
  write_list(os, "layers", g.layer_counts);
  write_list(os, "widths", g.widths);
  os << "base " << num17(g.base.learning_rate) << ' ' << g.base.batch_size
     << ' ' << g.base.max_epochs << ' ' << g.base.patience << '\n';
  os << "split " << num17(g.test_fraction) << ' ' << num17(g.blend_fraction)
     << ' ' << num17(g.member_val_fraction) << '\n';
  os << "filter " << num17(g.filter_ratio) << ' ' << num17(g.min_accuracy)
     << ' ' << g.baseline_degree << ' ' << g.baseline_max_columns << ' '
     << num17(g.ridge) << '\n';
  os << "opts " << (g.poly2 ? 1 : 0) << ' ' << g.workers << ' ' << g.seed
     << '\n';

  os << "ledger " << model.ledger.size() << '\n';
  for (const auto& rec : model.ledger) {
    os << "entry " << rec.hidden_layers << ' ' << rec.hidden_width << ' '
       << rec.seed << ' ' << num17(rec.metric) << ' ' << (rec.kept ? 1 : 0)
       << ' ' << (rec.failed ? 1 : 0) << ' '
       << std::quoted(rec.note.empty() ? "-" : rec.note) << '\n';
  }

  os << "members " << model.members.size() << '\n';
  for (const auto& m : model.members) write_mlp(os, m);

  if (!model.has_blender) {
    os << "blender none\n";
  } else if (model.task == data::Task::kRegression) {
    const auto& c = model.gbrt.config();
    os << "blender gbrt " << c.n_trees << ' ' << c.max_depth << ' '
       << num17(c.shrinkage) << ' ' << c.min_samples_leaf << ' '
       << num17(model.gbrt.init_value()) << '\n';
    write_trees(os, model.gbrt.trees(), 0);
  } else {
    const auto& c = model.ert.config();
    os << "blender ert " << c.n_trees << ' ' << c.max_depth << ' '
       << c.min_samples_split << ' ' << c.num_classes << ' ' << c.seed
       << '\n';
    write_trees(os, model.ert.trees(), c.num_classes);
  }
  os << "end\n";
  if (!os) throw DataError("failed writing '" + path + "'");
}

EnsembleModel load_ensemble(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw DataError("cannot open '" + path + "'");

  expect(is, kMagic);
  const int version = read_value<int>(is, "version");
  if (version != kVersion) {
    throw DataError("model file: unsupported version " +
                    std::to_string(version));
  }

  EnsembleModel model;
  expect(is, "task");
  model.task = data::task_from_string(read_value<std::string>(is, "task"));
  expect(is, "scenario");
  {
    const auto name = read_value<std::string>(is, "scenario name");
    const int m = read_value<int>(is, "scenario m");
    model.scenario = data::ScenarioSpec::parse(name, m);
  }
  expect(is, "raw_width");
  model.raw_width = read_value<int>(is, "raw width");
  expect(is, "target");
  model.target_min = read_value<double>(is, "target min");
  model.target_max = read_value<double>(is, "target max");
  expect(is, "baseline");
  model.baseline_mae = read_value<double>(is, "baseline");

  GridConfig& g = model.grid;
  g.layer_counts = read_list<int>(is, "layers");
  g.widths = read_list<int>(is, "widths");
  expect(is, "base");
  g.base.learning_rate = read_value<double>(is, "learning rate");
  g.base.batch_size = read_value<int>(is, "batch size");
  g.base.max_epochs = read_value<int>(is, "max epochs");
  g.base.patience = read_value<int>(is, "patience");
  expect(is, "split");
  g.test_fraction = read_value<double>(is, "test fraction");
  g.blend_fraction = read_value<double>(is, "blend fraction");
  g.member_val_fraction = read_value<double>(is, "val fraction");
  expect(is, "filter");
  g.filter_ratio = read_value<double>(is, "filter ratio");
  g.min_accuracy = read_value<double>(is, "accuracy floor");
  g.baseline_degree = read_value<int>(is, "baseline degree");
  g.baseline_max_columns = read_value<int>(is, "baseline cap");
  g.ridge = read_value<double>(is, "ridge");
  expect(is, "opts");
  g.poly2 = read_value<int>(is, "poly2 flag") != 0;
  g.workers = read_value<int>(is, "workers");
  g.seed = read_value<std::uint64_t>(is, "seed");

  expect(is, "ledger");
  const int ledger_n = read_value<int>(is, "ledger size");
  for (int i = 0; i < ledger_n; ++i) {
    expect(is, "entry");
    MemberRecord rec;
    rec.hidden_layers = read_value<int>(is, "entry layers");
    rec.hidden_width = read_value<int>(is, "entry width");
    rec.seed = read_value<std::uint64_t>(is, "entry seed");
    rec.metric = read_value<double>(is, "entry metric");
    rec.kept = read_value<int>(is, "entry kept") != 0;
    rec.failed = read_value<int>(is, "entry failed") != 0;
    is >> std::ws;
    std::string note;
    is >> std::quoted(note);
    if (!is) throw DataError("model file: cannot read entry note");
    rec.note = (note == "-") ? "" : note;
    model.ledger.push_back(std::move(rec));
  }

  expect(is, "members");
  const int member_n = read_value<int>(is, "member count");
  for (int i = 0; i < member_n; ++i) model.members.push_back(read_mlp(is));

  expect(is, "blender");
  const auto kind = read_value<std::string>(is, "blender kind");
  if (kind == "none") {
    model.has_blender = false;
  } else if (kind == "gbrt") {
    GBRTConfig c;
    c.n_trees = read_value<int>(is, "tree count");
    c.max_depth = read_value<int>(is, "depth");
    c.shrinkage = read_value<double>(is, "shrinkage");
    c.min_samples_leaf = read_value<int>(is, "min leaf");
    const double init = read_value<double>(is, "init value");
    model.gbrt = GBRTModel(c, init, read_trees(is, c.n_trees, 0));
    model.has_blender = true;
  } else if (kind == "ert") {
    ERTConfig c;
    c.n_trees = read_value<int>(is, "tree count");
    c.max_depth = read_value<int>(is, "depth");
    c.min_samples_split = read_value<int>(is, "min split");
    c.num_classes = read_value<int>(is, "classes");
    c.seed = read_value<std::uint64_t>(is, "seed");
    model.ert = ERTModel(c, read_trees(is, c.n_trees, c.num_classes));
    model.has_blender = true;
  } else {
    throw DataError("model file: unknown blender '" + kind + "'");
  }
  expect(is, "end");

  model.validate();
  return model;
}

}  // namespace belltrace::learn
