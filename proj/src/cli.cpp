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

#include "belltrace/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "belltrace/classifier.hpp"
#include "belltrace/dataset.hpp"
#include "belltrace/ensemble.hpp"
#include "belltrace/errors.hpp"
#include "belltrace/optimize.hpp"
#include "belltrace/oracles.hpp"
#include "belltrace/quantum.hpp"
#include "belltrace/rng.hpp"
#include "belltrace/sampler.hpp"
#include "belltrace/scenario.hpp"

namespace belltrace::cli {

namespace {

std::string num17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Eigen::VectorXd to_vector(const std::vector<double>& v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) {
    out[static_cast<Eigen::Index>(i)] = v[i];
  }
  return out;
}

// Effective option values of a parsed subcommand, one "# key=value" line
// each, so every emitted file carries the configuration that produced it.
void echo_config(const CLI::App& sub, std::ostream& os) {
  std::istringstream lines(sub.config_to_str(/*default_also=*/true,
                                             /*write_description=*/false));
  std::string line;
  os << "# command=" << sub.get_name() << '\n';
  while (std::getline(lines, line)) {
    if (!line.empty()) os << "# " << line << '\n';
  }
}

double median_of(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 == 1 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw DataError("cannot open '" + path + "' for writing");
  return os;
}

// ---------------------------------------------------------------------------
// gen

struct GenOpts {
  std::string scenario = "bipartite";
  int m = 2;
  std::string task = "regression";
  int n = 1000;
  std::uint64_t seed = 0;
  int nu_grid = 1000;
  int workers = 1;
  std::uint64_t max_attempts = sampler::kDefaultMaxAttempts;
  bool no_probes = false;
  std::string out_path;
};

int cmd_gen(const GenOpts& o, std::ostream& out) {
  data::GenConfig cfg;
  cfg.scenario = data::ScenarioSpec::parse(o.scenario, o.m);
  cfg.task = data::task_from_string(o.task);
  cfg.n = o.n;
  cfg.seed = o.seed;
  cfg.nu_grid = o.nu_grid;
  cfg.workers = o.workers;
  cfg.max_attempts = o.max_attempts;
  cfg.probes = !o.no_probes;

  data::GenReport report;
  const data::Dataset d = data::generate(cfg, &report);
  data::write_csv(d, o.out_path);

  out << "wrote " << o.out_path << ": " << d.n() << " rows x " << d.width()
      << " features (" << d.probe_rows.size() << " probe rows)\n";
  out << "sampling: " << report.stats.attempts << " attempts, acceptance rate "
      << num17(report.stats.acceptance_rate()) << "\n";
  out << "oracle: " << num17(report.oracle_seconds) << " s total, "
      << num17(1e3 * report.oracle_seconds /
               std::max(1, report.oracle_calls))
      << " ms per record\n";
  return 0;
}

// ---------------------------------------------------------------------------
// oracle

struct OracleOpts {
  std::string mode;  // nl | nbl | class
  int m = 2;
  std::vector<double> point;
  std::vector<double> ij;
  double werner = -1.0;  // <0 = unset
  int grid = 1000;
  std::string dump_lp;
  std::string profile_out;
};

int cmd_oracle(const OracleOpts& o, const CLI::App& sub, std::ostream& out) {
  if (o.mode == "nl") {
    if (o.point.empty()) {
      throw UsageError("oracle nl needs --point with m*m correlators");
    }
    const auto c = scenario::make_correlators(o.m, to_vector(o.point));
    if (!o.dump_lp.empty()) {
      auto os = open_out(o.dump_lp);
      lp::write_lp_text(lp::build_nl_lp(c), os);
      out << "wrote LP to " << o.dump_lp << "\n";
    }
    const auto r = lp::nl_distance(c);
    out << "NL = " << num17(r.nl) << "\n";
    out << "lp iterations = " << r.lp_iterations << "\n";
    return 0;
  }

  if (o.mode == "nbl") {
    lp::NBLOptions opts;
    opts.grid_points = o.grid;
    opts.record_profile = !o.profile_out.empty();

    lp::NBLResult r;
    bool ij_mode = false;
    std::array<double, 4> ij{};
    scenario::TripartiteCorrelators t;
    if (o.werner >= 0.0) {
      t = quantum::werner_swap_correlators(o.werner);
      r = lp::nbl_distance(t, opts);
    } else if (!o.ij.empty()) {
      if (o.ij.size() != 4) {
        throw UsageError("--ij needs exactly I,J,<A0>,<A1>");
      }
      ij = {o.ij[0], o.ij[1], o.ij[2], o.ij[3]};
      ij_mode = true;
      r = lp::nbl_distance_ij(ij[0], ij[1], ij[2], ij[3], opts);
    } else if (!o.point.empty()) {
      if (o.point.size() != 10) {
        throw UsageError("--point for the three-party quantifier needs the "
                         "10-feature vector");
      }
      t = scenario::TripartiteCorrelators::from_features(to_vector(o.point));
      r = lp::nbl_distance(t, opts);
    } else {
      throw UsageError("oracle nbl needs --point, --ij, or --werner");
    }

    out << "NBL = " << num17(r.nbl) << "\n";
    out << "nu* = " << num17(r.nu_star) << "\n";
    out << "nu range = [" << num17(r.nu_range.lo) << ", "
        << num17(r.nu_range.hi) << "]\n";
    out << "lp solves = " << r.lp_solves
        << ", iterations = " << r.lp_iterations << "\n";
    out << "early exit = " << (r.early_exit ? "yes" : "no") << "\n";

    if (!o.profile_out.empty()) {
      auto os = open_out(o.profile_out);
      echo_config(sub, os);
      os << "nu,distance\n";
      for (const auto& [nu, dist] : r.profile) {
        os << num17(nu) << ',' << num17(dist) << '\n';
      }
      out << "wrote profile to " << o.profile_out << "\n";
    }
    if (!o.dump_lp.empty()) {
      auto os = open_out(o.dump_lp);
      lp::write_lp_text(ij_mode ? lp::build_nbl_lp_ij(ij[0], ij[1], ij[2],
                                                      ij[3], r.nu_star)
                                : lp::build_nbl_lp(t, r.nu_star),
                        os);
      out << "wrote LP (at nu*) to " << o.dump_lp << "\n";
    }
    return 0;
  }

  // class
  if (o.point.size() != 4) {
    throw UsageError("oracle class needs --point with the four two-setting "
                     "correlators");
  }
  const auto c = scenario::make_correlators(2, to_vector(o.point));
  const auto region = classifier::classify(c);
  const auto sym = scenario::chsh_symmetries(c);
  out << "region = " << classifier::to_string(region) << "\n";
  out << "max facet value = "
      << num17(*std::max_element(sym.begin(), sym.end())) << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// train / blend / eval shared plumbing

struct TrainOpts {
  std::string data_path;
  std::string out_path;
  std::string task;      // optional override
  std::string scenario;  // optional override when the sidecar is missing
  int m = 2;
  std::uint64_t seed = 1;
  std::vector<int> layers = {2, 3, 4, 5};
  std::vector<int> widths = {100, 150, 200, 250, 300, 350, 400, 450, 500};
  double lr = 1e-3;
  int batch = 200;
  int epochs = 200;
  int patience = 10;
  double test_fraction = 0.25;
  double blend_fraction = 0.2;
  double val_fraction = 0.15;
  bool no_poly2 = false;
  double filter_ratio = 0.7;
  double min_accuracy = 0.985;
  int baseline_degree = 4;
  int baseline_cap = 5000;
  double ridge = 1e-8;
  int workers = 1;
  bool skip_blend = false;
  std::vector<int> curve_sizes;
  std::string curve_out;
};

learn::GridConfig grid_from(const TrainOpts& o) {
  learn::GridConfig cfg;
  cfg.layer_counts = o.layers;
  cfg.widths = o.widths;
  cfg.base.learning_rate = o.lr;
  cfg.base.batch_size = o.batch;
  cfg.base.max_epochs = o.epochs;
  cfg.base.patience = o.patience;
  cfg.test_fraction = o.test_fraction;
  cfg.blend_fraction = o.blend_fraction;
  cfg.member_val_fraction = o.val_fraction;
  cfg.poly2 = !o.no_poly2;
  cfg.filter_ratio = o.filter_ratio;
  cfg.min_accuracy = o.min_accuracy;
  cfg.baseline_degree = o.baseline_degree;
  cfg.baseline_max_columns = o.baseline_cap;
  cfg.ridge = o.ridge;
  cfg.workers = o.workers;
  cfg.seed = o.seed;
  return cfg;
}

data::Dataset load_dataset(const std::string& path, const std::string& task,
                           const std::string& scenario, int m) {
  data::Dataset d = data::read_csv(path);
  if (!task.empty()) d.task = data::task_from_string(task);
  if (!scenario.empty()) {
    const auto spec = data::ScenarioSpec::parse(scenario, m);
    d.metadata["scenario"] = spec.name();
    d.metadata["m"] = std::to_string(spec.m);
  }
  return d;
}

void check_schema(const learn::EnsembleModel& model, const data::Dataset& d) {
  if (d.width() != model.raw_width) {
    throw DataError("dataset has " + std::to_string(d.width()) +
                    " features but the model expects " +
                    std::to_string(model.raw_width));
  }
  if (d.task != model.task) {
    throw DataError("dataset task does not match the model's task");
  }
}

void print_metrics(const learn::EnsembleModel& model,
                   const learn::Metrics& metrics, std::ostream& out) {
  if (model.task == data::Task::kClassification) {
    out << "accuracy = " << num17(metrics.accuracy) << "\n";
    out << "confusion matrix (rows true, columns predicted; "
        << "local / quantum / post-quantum):\n";
    for (int r = 0; r < 3; ++r) {
      out << "  " << classifier::to_string(classifier::region_from_index(r))
          << ":";
      for (int c = 0; c < 3; ++c) out << ' ' << metrics.confusion(r, c);
      out << "\n";
    }
  } else {
    out << "mae = " << num17(metrics.mae) << "\n";
  }
}

void print_member_table(const learn::EnsembleModel& model,
                        std::ostream& out) {
  const bool cls = model.task == data::Task::kClassification;
  out << "members (" << (cls ? "test accuracy" : "test MAE") << "):\n";
  for (const auto& rec : model.ledger) {
    out << "  layers=" << rec.hidden_layers << " width=" << rec.hidden_width;
    if (rec.failed) {
      out << "  FAILED " << rec.note << "\n";
    } else {
      out << "  " << num17(rec.metric) << (rec.kept ? "  kept" : "  dropped")
          << "\n";
    }
  }
  if (!cls && model.baseline_mae > 0.0) {
    out << "baseline mae = " << num17(model.baseline_mae) << " (filter < "
        << num17(model.grid.filter_ratio * model.baseline_mae) << ")\n";
  }
}

int cmd_train(const TrainOpts& o, const CLI::App& sub, std::ostream& out) {
  data::Dataset d = load_dataset(o.data_path, o.task, o.scenario, o.m);
  learn::GridConfig cfg = grid_from(o);

  if (!o.curve_sizes.empty()) {
    const auto curve = learn::learning_curve(d, o.curve_sizes, cfg);
    std::ostream* os = &out;
    std::ofstream file;
    if (!o.curve_out.empty()) {
      file = open_out(o.curve_out);
      os = &file;
    }
    echo_config(sub, *os);
    *os << "train_size,mae\n";
    for (const auto& p : curve) {
      *os << p.train_size << ',' << num17(p.mae) << '\n';
    }
    if (!o.curve_out.empty()) {
      out << "wrote learning curve to " << o.curve_out << "\n";
    }
    return 0;
  }

  if (o.out_path.empty()) {
    throw UsageError("train needs --out for the model file");
  }
  const auto model =
      learn::train_pipeline(d, cfg, &out, /*with_blender=*/!o.skip_blend);
  learn::save_ensemble(model, o.out_path);
  out << "saved model to " << o.out_path << "\n";
  return 0;
}

struct BlendOpts {
  std::string model_path;
  std::string data_path;
  std::string out_path;
};

int cmd_blend(const BlendOpts& o, std::ostream& out) {
  learn::EnsembleModel model = learn::load_ensemble(o.model_path);
  const data::Dataset d = load_dataset(o.data_path, "", "", 2);
  check_schema(model, d);

  const auto folds = learn::make_folds(d, model.grid);
  learn::train_blender(model.expand(data::take_rows(d.X, folds.blend)),
                       data::take_rows(d.y, folds.blend), &model);

  print_member_table(model, out);
  const auto metrics = learn::evaluate(
      model, data::take_rows(d.X, folds.test), data::take_rows(d.y, folds.test));
  out << "ensemble on the test partition:\n";
  print_metrics(model, metrics, out);

  learn::save_ensemble(model, o.out_path);
  out << "saved model to " << o.out_path << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// eval

struct EvalOpts {
  std::string model_path;
  std::string data_path;
  std::string curve;  // "", "chsh", "werner"
  int curve_points = 50;
  std::string curve_out;
  std::string dump_predictions;
  int nu_grid = 1000;
};

void eval_chsh_curve(const learn::EnsembleModel& model, const EvalOpts& o,
                     const CLI::App& sub, std::ostream& out) {
  if (model.task != data::Task::kRegression ||
      model.scenario.kind != data::ScenarioKind::kBipartite ||
      model.scenario.m != 2) {
    throw UsageError("the chsh curve needs a two-setting two-party "
                     "regression model");
  }
  std::ostream* os = &out;
  std::ofstream file;
  if (!o.curve_out.empty()) {
    file = open_out(o.curve_out);
    os = &file;
  }
  echo_config(sub, *os);
  *os << "theta,facet_value,oracle,predicted\n";

  lp::SimplexSolver solver;
  double total_err = 0.0;
  for (int i = 0; i < o.curve_points; ++i) {
    const double theta = std::numbers::pi / 4.0 *
                         static_cast<double>(i + 1) /
                         static_cast<double>(o.curve_points);
    const auto s = quantum::chsh_optimal_settings(theta);
    const auto c = quantum::pair_correlators(
        theta, {s.alice[0], s.alice[1]}, {s.bob[0], s.bob[1]});
    const double oracle = lp::nl_distance(c, &solver).nl;
    Eigen::MatrixXd x(1, 4);
    x.row(0) = c.values.transpose();
    const double predicted = model.predict(x)[0];
    total_err += std::abs(oracle - predicted);
    *os << num17(theta) << ',' << num17(s.chsh) << ',' << num17(oracle)
        << ',' << num17(predicted) << '\n';
  }
  out << "curve points = " << o.curve_points << "\n";
  out << "curve MAE vs oracle = " << num17(total_err / o.curve_points)
      << "\n";
}

void eval_werner_curve(const learn::EnsembleModel& model, const EvalOpts& o,
                       const CLI::App& sub, std::ostream& out) {
  if (model.task != data::Task::kRegression ||
      model.scenario.kind == data::ScenarioKind::kBipartite) {
    throw UsageError("the werner curve needs a three-party regression model");
  }
  std::ostream* os = &out;
  std::ofstream file;
  if (!o.curve_out.empty()) {
    file = open_out(o.curve_out);
    os = &file;
  }
  echo_config(sub, *os);
  *os << "v,oracle,predicted\n";

  lp::NBLOptions opts;
  opts.grid_points = o.nu_grid;
  double total_err = 0.0;
  for (int i = 0; i < o.curve_points; ++i) {
    const double v = o.curve_points == 1
                         ? 1.0
                         : static_cast<double>(i) /
                               static_cast<double>(o.curve_points - 1);
    const auto t = quantum::werner_swap_correlators(v);
    double oracle = 0.0;
    Eigen::MatrixXd x;
    if (model.scenario.kind == data::ScenarioKind::kBilocal4) {
      const auto ij = scenario::ij_functionals(t);
      oracle = lp::nbl_distance_ij(ij.i, ij.j, t.a0, t.a1, opts).nbl;
      x.resize(1, 4);
      x << ij.i, ij.j, t.a0, t.a1;
    } else {
      oracle = lp::nbl_distance(t, opts).nbl;
      x.resize(1, 10);
      x.row(0) = t.features().transpose();
    }
    const double predicted = model.predict(x)[0];
    total_err += std::abs(oracle - predicted);
    *os << num17(v) << ',' << num17(oracle) << ',' << num17(predicted)
        << '\n';
  }
  out << "curve points = " << o.curve_points << "\n";
  out << "curve MAE vs oracle = " << num17(total_err / o.curve_points)
      << "\n";
}

int cmd_eval(const EvalOpts& o, const CLI::App& sub, std::ostream& out) {
  const learn::EnsembleModel model = learn::load_ensemble(o.model_path);

  if (!o.curve.empty()) {
    if (o.curve_points < 1) throw UsageError("curve needs at least 1 point");
    if (o.curve == "chsh") {
      eval_chsh_curve(model, o, sub, out);
    } else {
      eval_werner_curve(model, o, sub, out);
    }
    if (!o.curve_out.empty()) {
      out << "wrote curve to " << o.curve_out << "\n";
    }
    if (o.data_path.empty()) return 0;
  }

  if (o.data_path.empty()) {
    throw UsageError("eval needs --data (or --curve)");
  }
  const data::Dataset d = load_dataset(o.data_path, "", "", 2);
  check_schema(model, d);
  const auto folds = learn::make_folds(d, model.grid);

  const auto metrics = learn::evaluate(
      model, data::take_rows(d.X, folds.test), data::take_rows(d.y, folds.test));
  out << "test rows = " << folds.test.size() << "\n";
  print_metrics(model, metrics, out);

  if (!d.probe_rows.empty()) {
    std::vector<std::string> names;
    const auto it = d.metadata.find("probe_names");
    if (it != d.metadata.end()) {
      std::istringstream ss(it->second);
      std::string tok;
      while (std::getline(ss, tok, ';')) names.push_back(tok);
    }
    out << "probe rows:\n";
    for (std::size_t i = 0; i < d.probe_rows.size(); ++i) {
      const int r = d.probe_rows[i];
      const Eigen::MatrixXd x = d.X.row(r);
      const double target = d.y[r];
      double predicted = 0.0;
      if (model.task == data::Task::kClassification) {
        predicted = static_cast<double>(model.predict_class(x)[0]);
      } else {
        predicted = model.predict(x)[0];
      }
      out << "  " << (i < names.size() ? names[i] : "probe") << ": target "
          << num17(target) << ", predicted " << num17(predicted) << "\n";
    }
  }

  if (!o.dump_predictions.empty()) {
    auto os = open_out(o.dump_predictions);
    echo_config(sub, os);
    os << "row,target,predicted,in_test\n";
    std::vector<char> in_test(static_cast<std::size_t>(d.n()), 0);
    for (int r : folds.test) in_test[static_cast<std::size_t>(r)] = 1;
    Eigen::VectorXd preds;
    Eigen::VectorXi classes;
    if (model.task == data::Task::kClassification) {
      classes = model.predict_class(d.X);
    } else {
      preds = model.predict(d.X);
    }
    for (int r = 0; r < d.n(); ++r) {
      const double p = model.task == data::Task::kClassification
                           ? static_cast<double>(classes[r])
                           : preds[r];
      os << r << ',' << num17(d.y[r]) << ',' << num17(p) << ','
         << static_cast<int>(in_test[static_cast<std::size_t>(r)]) << '\n';
    }
    out << "wrote predictions to " << o.dump_predictions << "\n";
  }
  return 0;
}

// ---------------------------------------------------------------------------
// search

struct SearchOpts {
  std::string model_path;
  int restarts = 50;
  int max_evals = 2000;
  std::uint64_t seed = 0;
  int nu_grid = 1000;
  double threshold = 1e-3;
  int certify = 10;
  std::string out_path;
};

struct SearchCandidate {
  Eigen::VectorXd x;  // theta, alpha0, alpha1, gamma0, gamma1
  double predicted = 0.0;
  double inequality = 0.0;  // sqrt|I| + sqrt|J|
};

int cmd_search(const SearchOpts& o, const CLI::App& sub, std::ostream& out,
               std::ostream& err) {
  const learn::EnsembleModel model = learn::load_ensemble(o.model_path);
  if (model.task != data::Task::kRegression ||
      model.scenario.kind == data::ScenarioKind::kBipartite) {
    throw UsageError("search needs a three-party regression model");
  }
  if (o.restarts < 1) throw UsageError("search needs at least one restart");
  const bool ij_model = model.scenario.kind == data::ScenarioKind::kBilocal4;

  // Measurement family: two pure pair sources of parameter theta, planar
  // end-observer angles. The middle party's two joint readouts are fixed.
  auto point_of = [&](const Eigen::VectorXd& x) {
    return quantum::swap_correlators(x[0], {x[1], x[2]}, {x[3], x[4]});
  };
  auto features_of = [&](const scenario::TripartiteCorrelators& t) {
    Eigen::MatrixXd f;
    if (ij_model) {
      const auto ij = scenario::ij_functionals(t);
      f.resize(1, 4);
      f << ij.i, ij.j, t.a0, t.a1;
    } else {
      f.resize(1, 10);
      f.row(0) = t.features().transpose();
    }
    return f;
  };
  auto predicted_of = [&](const scenario::TripartiteCorrelators& t) {
    return model.predict(features_of(t))[0];
  };
  auto inequality_of = [&](const scenario::TripartiteCorrelators& t) {
    const auto ij = scenario::ij_functionals(t);
    return scenario::bilocal_inequality_value(ij.i, ij.j);
  };

  // Maximize the model's predicted distance, softly penalizing points that
  // already violate the two-source facet (those are not interesting: the
  // facet itself certifies them).
  auto objective = [&](const Eigen::VectorXd& x) {
    const auto t = point_of(x);
    const double excess = std::max(0.0, inequality_of(t) - 1.0);
    return -predicted_of(t) + 10.0 * excess * excess;
  };

  rng::Stream rs(o.seed, /*stream_id=*/0x5ea4c4);
  optimize::NelderMeadOptions nm_opts;
  nm_opts.max_evals = o.max_evals;
  nm_opts.initial_step = 0.3;

  std::vector<SearchCandidate> candidates;
  int boundary_hits = 0;
  for (int r = 0; r < o.restarts; ++r) {
    Eigen::VectorXd x0(5);
    x0[0] = rs.uniform(0.05, std::numbers::pi / 4.0);
    for (int i = 1; i < 5; ++i) {
      x0[i] = rs.uniform(-std::numbers::pi, std::numbers::pi);
    }
    const auto res = optimize::nelder_mead(objective, x0, nm_opts);
    const auto t = point_of(res.x);
    SearchCandidate cand;
    cand.x = res.x;
    cand.predicted = predicted_of(t);
    cand.inequality = inequality_of(t);
    if (cand.inequality > 1.0 + 1e-9) {
      ++boundary_hits;  // penalty-active: facet already violated
      continue;
    }
    candidates.push_back(std::move(cand));
  }
  std::sort(candidates.begin(), candidates.end(),
            [](const SearchCandidate& a, const SearchCandidate& b) {
              return a.predicted > b.predicted;
            });

  std::ostream* os = &out;
  std::ofstream file;
  if (!o.out_path.empty()) {
    file = open_out(o.out_path);
    os = &file;
  }
  echo_config(sub, *os);
  *os << "restarts = " << o.restarts << ", facet-violating optima skipped = "
      << boundary_hits << "\n";

  double best_pred = 0.0;
  for (const auto& c : candidates) best_pred = std::max(best_pred, c.predicted);
  if (candidates.empty() || best_pred <= o.threshold) {
    *os << "ensemble refuted: no predicted distance above "
        << num17(o.threshold) << " inside the facet (best predicted = "
        << num17(best_pred) << ")\n";
    if (!o.out_path.empty()) err << "search refuted; see " << o.out_path
                                 << "\n";
    return 5;
  }

  lp::NBLOptions nbl_opts;
  nbl_opts.grid_points = o.nu_grid;
  const int to_certify =
      std::min<int>(o.certify, static_cast<int>(candidates.size()));
  double best_exact = 0.0;
  for (int i = 0; i < to_certify; ++i) {
    const auto& c = candidates[static_cast<std::size_t>(i)];
    if (c.predicted <= o.threshold) break;
    const auto t = point_of(c.x);
    double exact = 0.0;
    if (ij_model) {
      const auto ij = scenario::ij_functionals(t);
      exact = lp::nbl_distance_ij(ij.i, ij.j, t.a0, t.a1, nbl_opts).nbl;
    } else {
      exact = lp::nbl_distance(t, nbl_opts).nbl;
    }
    best_exact = std::max(best_exact, exact);
    *os << "candidate " << i << ": theta=" << num17(c.x[0]) << " alpha=("
        << num17(c.x[1]) << ", " << num17(c.x[2]) << ") gamma=("
        << num17(c.x[3]) << ", " << num17(c.x[4]) << ")\n";
    *os << "  facet value = " << num17(c.inequality)
        << ", predicted = " << num17(c.predicted)
        << ", exact = " << num17(exact) << "\n";
    if (exact > o.threshold) {
      *os << "certified: nonclassical two-source distance " << num17(exact)
          << " at a point the facet does not detect (value "
          << num17(c.inequality) << " <= 1)\n";
      if (!o.out_path.empty()) {
        out << "certified discovery; see " << o.out_path << "\n";
      }
      return 0;
    }
  }
  *os << "ensemble refuted: " << to_certify
      << " predicted violations failed oracle certification (best exact = "
      << num17(best_exact) << ")\n";
  if (!o.out_path.empty()) err << "search refuted; see " << o.out_path << "\n";
  return 5;
}

// ---------------------------------------------------------------------------
// bench

struct BenchOpts {
  std::string model_path;
  int n = 20;
  std::uint64_t seed = 0;
  int nu_grid = 1000;
  int reps = 100;
  std::string out_path;
};

int cmd_bench(const BenchOpts& o, const CLI::App& sub, std::ostream& out) {
  if (o.n < 1) throw UsageError("bench needs n >= 1 points");
  const learn::EnsembleModel model = learn::load_ensemble(o.model_path);

  rng::Stream base(o.seed, /*stream_id=*/0xbe7c);
  lp::NBLOptions opts;
  opts.grid_points = o.nu_grid;

  std::vector<double> oracle_s, predict_s;
  std::vector<Eigen::VectorXd> rows;
  lp::SimplexSolver solver;
  for (int i = 0; i < o.n; ++i) {
    rng::Stream rs = base.substream(static_cast<std::uint64_t>(i));
    Eigen::VectorXd f;
    const auto t0 = std::chrono::steady_clock::now();
    switch (model.scenario.kind) {
      case data::ScenarioKind::kBipartite: {
        const auto c = sampler::sample_bipartite(model.scenario.m, rs);
        f = c.values;
        lp::nl_distance(c, &solver);
        break;
      }
      case data::ScenarioKind::kBilocal4: {
        const Eigen::Vector4d v = sampler::sample_ij(rs);
        f = v;
        lp::nbl_distance_ij(v[0], v[1], v[2], v[3], opts);
        break;
      }
      case data::ScenarioKind::kBilocal10: {
        const auto t = sampler::sample_tripartite(rs);
        f = t.features();
        lp::nbl_distance(t, opts);
        break;
      }
    }
    oracle_s.push_back(std::chrono::duration<double>(
                           std::chrono::steady_clock::now() - t0)
                           .count());
    rows.push_back(f);
  }

  Eigen::MatrixXd x(1, model.raw_width);
  for (const auto& f : rows) {
    x.row(0) = f.transpose();
    const auto t0 = std::chrono::steady_clock::now();
    for (int rep = 0; rep < o.reps; ++rep) {
      if (model.task == data::Task::kClassification) {
        model.predict_class(x);
      } else {
        model.predict(x);
      }
    }
    predict_s.push_back(std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - t0)
                            .count() /
                        std::max(1, o.reps));
  }

  const double om = median_of(oracle_s);
  const double pm = median_of(predict_s);
  std::ostream* os = &out;
  std::ofstream file;
  if (!o.out_path.empty()) {
    file = open_out(o.out_path);
    os = &file;
    echo_config(sub, *os);
    *os << "point,oracle_seconds,predict_seconds\n";
    for (int i = 0; i < o.n; ++i) {
      *os << i << ',' << num17(oracle_s[static_cast<std::size_t>(i)]) << ','
          << num17(predict_s[static_cast<std::size_t>(i)]) << '\n';
    }
    os = &out;
  }
  *os << "points = " << o.n << "\n";
  *os << "median oracle seconds = " << num17(om) << "\n";
  *os << "median prediction seconds = " << num17(pm) << "\n";
  *os << "speedup = " << num17(pm > 0.0 ? om / pm : 0.0) << "\n";
  if (!o.out_path.empty()) out << "wrote timings to " << o.out_path << "\n";
  return 0;
}

void configure_common(CLI::App* sub) {
  sub->set_config("--config", "",
                  "key=value file; keys are the long option names");
  sub->allow_config_extras(CLI::config_extras_mode::error);
}

// A config registered on a subcommand is only consulted when that subcommand
// carries a parse-complete callback, which the dispatch below does not use,
// so the file would be silently ignored.  Expand it by hand before parsing:
// each key becomes "--key=value", and keys the command line already names
// explicitly are skipped so direct flags keep precedence.
bool expand_config_tokens(std::vector<std::string>& args, std::ostream& err) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[i + 1];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    }
  }
  if (path.empty()) return true;
  std::ifstream in(path);
  if (!in) {
    err << "error: cannot read config file " << path << "\n";
    return false;
  }
  const auto strip = [](const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  std::vector<std::string> extra;
  std::string line;
  while (std::getline(in, line)) {
    line = strip(line);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    const auto eq = line.find('=');
    const std::string key = eq == std::string::npos ? "" : strip(line.substr(0, eq));
    if (key.empty()) {
      err << "error: malformed config line in " << path << ": " << line << "\n";
      return false;
    }
    std::string value = strip(line.substr(eq + 1));
    if (value.size() >= 2 && (value.front() == '"' || value.front() == '\'') &&
        value.back() == value.front()) {
      value = value.substr(1, value.size() - 2);
    }
    const std::string flag = "--" + key;
    const bool given = std::any_of(
        args.begin(), args.end(), [&flag](const std::string& tok) {
          return tok == flag || tok.rfind(flag + "=", 0) == 0;
        });
    if (!given) extra.push_back(flag + "=" + value);
  }
  args.insert(args.end(), extra.begin(), extra.end());
  return true;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"exact nonclassicality quantifiers and learned surrogates"};
  app.require_subcommand(1);

  GenOpts gen_opts;
  auto* gen = app.add_subcommand(
      "gen", "sample labeled correlator corpora with exact targets");
  configure_common(gen);
  gen->add_option("--scenario", gen_opts.scenario,
                  "bipartite | bilocal4 | bilocal10")
      ->check(CLI::IsMember({"bipartite", "bilocal4", "bilocal10"}));
  gen->add_option("--m", gen_opts.m, "settings per party (bipartite)");
  gen->add_option("--task", gen_opts.task, "regression | classification")
      ->check(CLI::IsMember({"regression", "classification"}));
  gen->add_option("--n", gen_opts.n, "sampled rows")->required();
  gen->add_option("--seed", gen_opts.seed, "rng seed");
  gen->add_option("--nu-grid", gen_opts.nu_grid,
                  "three-party sweep resolution");
  gen->add_option("--workers", gen_opts.workers, "threads (0 = hardware)");
  gen->add_option("--max-attempts", gen_opts.max_attempts,
                  "rejection sampling budget");
  gen->add_flag("--no-probes", gen_opts.no_probes,
                "skip the known-answer probe rows");
  gen->add_option("--out", gen_opts.out_path, "output CSV path")->required();

  OracleOpts oracle_opts;
  auto* oracle = app.add_subcommand(
      "oracle", "evaluate the exact quantifiers at one point");
  configure_common(oracle);
  oracle->add_option("mode", oracle_opts.mode, "nl | nbl | class")
      ->required()
      ->check(CLI::IsMember({"nl", "nbl", "class"}));
  oracle->add_option("--m", oracle_opts.m, "settings per party (nl)");
  oracle->add_option("--point", oracle_opts.point,
                     "comma-separated correlators")
      ->delimiter(',');
  oracle->add_option("--ij", oracle_opts.ij, "I,J,<A0>,<A1> aggregates")
      ->delimiter(',');
  oracle->add_option("--werner", oracle_opts.werner,
                     "two-source network visibility point");
  oracle->add_option("--grid", oracle_opts.grid, "nu sweep resolution");
  oracle->add_option("--dump-lp", oracle_opts.dump_lp,
                     "write the LP in text form");
  oracle->add_option("--profile-out", oracle_opts.profile_out,
                     "write the per-nu distance profile CSV");

  TrainOpts train_opts;
  auto* train = app.add_subcommand(
      "train", "train the member sweep and blender on a dataset");
  configure_common(train);
  train->add_option("--data", train_opts.data_path, "dataset CSV")
      ->required();
  train->add_option("--out", train_opts.out_path, "model file path");
  train->add_option("--task", train_opts.task,
                    "override the dataset task label")
      ->check(CLI::IsMember({"regression", "classification"}));
  train->add_option("--scenario", train_opts.scenario,
                    "override when the sidecar is missing")
      ->check(CLI::IsMember({"bipartite", "bilocal4", "bilocal10"}));
  train->add_option("--m", train_opts.m, "settings per party (bipartite)");
  train->add_option("--seed", train_opts.seed, "fold + init seed");
  train->add_option("--layers", train_opts.layers, "hidden layer counts")
      ->delimiter(',');
  train->add_option("--widths", train_opts.widths, "hidden widths")
      ->delimiter(',');
  train->add_option("--lr", train_opts.lr, "learning rate");
  train->add_option("--batch", train_opts.batch, "minibatch size");
  train->add_option("--epochs", train_opts.epochs, "max epochs");
  train->add_option("--patience", train_opts.patience,
                    "early-stop patience (epochs)");
  train->add_option("--test-fraction", train_opts.test_fraction,
                    "held-out test share");
  train->add_option("--blend-fraction", train_opts.blend_fraction,
                    "blending fold share of the training partition");
  train->add_option("--val-fraction", train_opts.val_fraction,
                    "member validation share of the member pool");
  train->add_flag("--no-poly2", train_opts.no_poly2,
                  "skip the degree-2 feature expansion");
  train->add_option("--filter-ratio", train_opts.filter_ratio,
                    "keep members with MAE below ratio x baseline");
  train->add_option("--min-accuracy", train_opts.min_accuracy,
                    "classification survivor floor");
  train->add_option("--baseline-degree", train_opts.baseline_degree,
                    "polynomial baseline degree");
  train->add_option("--baseline-cap", train_opts.baseline_cap,
                    "baseline column cap before degrading");
  train->add_option("--ridge", train_opts.ridge, "baseline ridge term");
  train->add_option("--workers", train_opts.workers,
                    "parallel member trainings (0 = hardware)");
  train->add_flag("--skip-blend", train_opts.skip_blend,
                  "stop after the member filter");
  train->add_option("--learning-curve", train_opts.curve_sizes,
                    "train one model per size instead of the pipeline")
      ->delimiter(',');
  train->add_option("--curve-out", train_opts.curve_out,
                    "learning curve CSV path");

  BlendOpts blend_opts;
  auto* blend = app.add_subcommand(
      "blend", "(re)fit the blender of a trained member set");
  configure_common(blend);
  blend->add_option("--model", blend_opts.model_path, "model file")
      ->required();
  blend->add_option("--data", blend_opts.data_path, "dataset CSV")
      ->required();
  blend->add_option("--out", blend_opts.out_path, "output model file")
      ->required();

  EvalOpts eval_opts;
  auto* eval = app.add_subcommand(
      "eval", "metrics, probe checks, and figure curves for a model");
  configure_common(eval);
  eval->add_option("--model", eval_opts.model_path, "model file")->required();
  eval->add_option("--data", eval_opts.data_path, "dataset CSV");
  eval->add_option("--curve", eval_opts.curve,
                   "emit a quantum-family curve (chsh | werner)")
      ->check(CLI::IsMember({"chsh", "werner"}));
  eval->add_option("--curve-points", eval_opts.curve_points,
                   "points on the curve");
  eval->add_option("--curve-out", eval_opts.curve_out, "curve CSV path");
  eval->add_option("--dump-predictions", eval_opts.dump_predictions,
                   "per-row prediction CSV path");
  eval->add_option("--nu-grid", eval_opts.nu_grid,
                   "oracle sweep resolution for the werner curve");

  SearchOpts search_opts;
  auto* search = app.add_subcommand(
      "search", "hunt for facet-invisible nonclassical quantum points");
  configure_common(search);
  search->add_option("--model", search_opts.model_path,
                     "three-party regression model")
      ->required();
  search->add_option("--restarts", search_opts.restarts,
                     "simplex-search restarts");
  search->add_option("--max-evals", search_opts.max_evals,
                     "objective evaluations per restart");
  search->add_option("--seed", search_opts.seed, "restart seed");
  search->add_option("--nu-grid", search_opts.nu_grid,
                     "certification sweep resolution");
  search->add_option("--threshold", search_opts.threshold,
                     "minimum certified distance");
  search->add_option("--certify", search_opts.certify,
                     "candidates to check with the exact oracle");
  search->add_option("--out", search_opts.out_path, "report path");

  BenchOpts bench_opts;
  auto* bench = app.add_subcommand(
      "bench", "compare oracle and model latency on random points");
  configure_common(bench);
  bench->add_option("--model", bench_opts.model_path, "model file")
      ->required();
  bench->add_option("--n", bench_opts.n, "points to time");
  bench->add_option("--seed", bench_opts.seed, "sampling seed");
  bench->add_option("--nu-grid", bench_opts.nu_grid,
                    "oracle sweep resolution");
  bench->add_option("--reps", bench_opts.reps,
                    "prediction repetitions per timing");
  bench->add_option("--out", bench_opts.out_path, "per-point timing CSV");

  std::vector<std::string> argv(args);
  if (!expand_config_tokens(argv, err)) return 2;

  try {
    std::vector<std::string> reversed(argv.rbegin(), argv.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (gen->parsed()) return cmd_gen(gen_opts, out);
    if (oracle->parsed()) return cmd_oracle(oracle_opts, *oracle, out);
    if (train->parsed()) return cmd_train(train_opts, *train, out);
    if (blend->parsed()) return cmd_blend(blend_opts, out);
    if (eval->parsed()) return cmd_eval(eval_opts, *eval, out);
    if (search->parsed()) return cmd_search(search_opts, *search, out, err);
    if (bench->parsed()) return cmd_bench(bench_opts, *bench, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const DataError& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  } catch (const NumericError& e) {
    err << "error: " << e.what() << "\n";
    return 4;
  } catch (const TrainingError& e) {
    err << "error: " << e.what() << "\n";
    return 4;
  } catch (const SamplingError& e) {
    err << "error: " << e.what() << "\n";
    return 4;
  }
  err << "error: no subcommand\n";
  return 2;
}

}  // namespace belltrace::cli
