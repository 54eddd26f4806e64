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

#include "belltrace/dataset.hpp"

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <sstream>
#include <thread>

#include "belltrace/classifier.hpp"
#include "belltrace/errors.hpp"
#include "belltrace/oracles.hpp"
#include "belltrace/quantum.hpp"

namespace belltrace::data {

namespace {

std::string num17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& tok, int line_no) {
  char* end = nullptr;
  const double v = std::strtod(tok.c_str(), &end);
  if (end == tok.c_str() || *end != '\0' || tok.empty()) {
    throw DataError("csv line " + std::to_string(line_no) +
                    ": cannot parse number '" + tok + "'");
  }
  return v;
}

}  // namespace

const char* to_string(Task t) {
  return t == Task::kRegression ? "regression" : "classification";
}

Task task_from_string(const std::string& s) {
  if (s == "regression") return Task::kRegression;
  if (s == "classification") return Task::kClassification;
  throw ConfigError("unknown task '" + s + "'");
}

int ScenarioSpec::feature_width() const {
  switch (kind) {
    case ScenarioKind::kBipartite: return m * m;
    case ScenarioKind::kBilocal4: return 4;
    case ScenarioKind::kBilocal10: return 10;
  }
  return 0;
}

double ScenarioSpec::target_max() const {
  return kind == ScenarioKind::kBipartite ? 1.0 : 0.5;
}

std::string ScenarioSpec::name() const {
  switch (kind) {
    case ScenarioKind::kBipartite: return "bipartite";
    case ScenarioKind::kBilocal4: return "bilocal4";
    case ScenarioKind::kBilocal10: return "bilocal10";
  }
  return "?";
}

ScenarioSpec ScenarioSpec::parse(const std::string& name, int m) {
  ScenarioSpec s;
  s.m = m;
  if (name == "bipartite") {
    s.kind = ScenarioKind::kBipartite;
  } else if (name == "bilocal4") {
    s.kind = ScenarioKind::kBilocal4;
  } else if (name == "bilocal10") {
    s.kind = ScenarioKind::kBilocal10;
  } else {
    throw ConfigError("unknown scenario '" + name +
                      "' (expected bipartite, bilocal4 or bilocal10)");
  }
  if (s.kind == ScenarioKind::kBipartite &&
      (m < scenario::kMinSettings || m > scenario::kMaxSettings)) {
    throw ConfigError("bipartite scenario: m=" + std::to_string(m) +
                      " outside [" + std::to_string(scenario::kMinSettings) +
                      ", " + std::to_string(scenario::kMaxSettings) + "]");
  }
  return s;
}

void Dataset::validate() const {
  if (X.rows() != y.size()) throw DataError("dataset: X/y row mismatch");
  if (X.rows() == 0 || X.cols() == 0) throw DataError("dataset: empty");
  if (!X.allFinite() || !y.allFinite()) {
    throw DataError("dataset: non-finite entries");
  }
  if (task == Task::kClassification) {
    for (Eigen::Index i = 0; i < y.size(); ++i) {
      if (y[i] != std::floor(y[i]) || y[i] < 0 || y[i] > 2) {
        throw DataError("dataset: classification label " +
                        std::to_string(y[i]) + " at row " + std::to_string(i));
      }
    }
  }
  for (int r : probe_rows) {
    if (r < 0 || r >= n()) throw DataError("dataset: probe row out of range");
  }
}

void GenConfig::validate() const {
  if (n < 1) throw ConfigError("gen: n must be positive");
  if (nu_grid < 2) throw ConfigError("gen: nu-grid must be at least 2");
  if (workers < 0) throw ConfigError("gen: workers must be >= 0");
  if (max_attempts < 1) throw ConfigError("gen: max-attempts must be >= 1");
  if (task == Task::kClassification) {
    if (scenario.kind != ScenarioKind::kBipartite || scenario.m != 2) {
      throw ConfigError(
          "gen: classification labels are defined for the bipartite m=2 "
          "scenario only");
    }
    if (n % 3 != 0) {
      throw ConfigError(
          "gen: classification needs n divisible by 3 (balanced classes)");
    }
  }
  if (scenario.kind != ScenarioKind::kBipartite &&
      task != Task::kRegression) {
    throw ConfigError("gen: three-party scenarios are regression-only");
  }
  // feature_width() re-checks the m range via ScenarioSpec::parse upstream;
  // enforce here too for programmatic configs.
  if (scenario.kind == ScenarioKind::kBipartite &&
      (scenario.m < scenario::kMinSettings ||
       scenario.m > scenario::kMaxSettings)) {
    throw ConfigError("gen: bipartite m outside supported range");
  }
}

namespace {

struct ProbeRow {
  std::string name;
  Eigen::VectorXd features;
};

std::vector<ProbeRow> probe_rows_for(const ScenarioSpec& sc) {
  std::vector<ProbeRow> out;
  if (sc.kind == ScenarioKind::kBipartite) {
    if (sc.m != 2) return out;  // no canonical probes beyond m=2
    Eigen::VectorXd pr(4), noise(4), tsir(4);
    pr << 1, 1, 1, -1;
    noise << 0, 0, 0, 0;
    const double r = 1.0 / std::sqrt(2.0);
    tsir << r, r, r, -r;
    out.push_back({"pr_box", pr});
    out.push_back({"white_noise", noise});
    out.push_back({"tsirelson", tsir});
    return out;
  }
  const double vs[3] = {1.0, 0.0, std::sqrt(3.0) / 2.0};
  const char* names[3] = {"swap_v1", "swap_v0", "swap_v0.866"};
  for (int i = 0; i < 3; ++i) {
    const auto t = quantum::werner_swap_correlators(vs[i]);
    Eigen::VectorXd f;
    if (sc.kind == ScenarioKind::kBilocal10) {
      f = t.features();
    } else {
      const auto ij = scenario::ij_functionals(t);
      f.resize(4);
      f << ij.i, ij.j, t.a0, t.a1;
    }
    out.push_back({names[i], f});
  }
  return out;
}

// Per-record work: draw features from the record's substream and evaluate
// the target. `solver` lets the two-party quantifier warm-start across a
// worker's records.
using RowRef = Eigen::Ref<Eigen::RowVectorXd, 0, Eigen::InnerStride<>>;

void fill_record(const GenConfig& cfg, std::uint64_t record,
                 const rng::Stream& base, lp::SimplexSolver* solver,
                 RowRef features, double* target,
                 sampler::SampleStats* stats) {
  rng::Stream rs = base.substream(record);
  switch (cfg.scenario.kind) {
    case ScenarioKind::kBipartite: {
      const auto c = sampler::sample_bipartite(cfg.scenario.m, rs);
      if (stats != nullptr) {
        ++stats->attempts;
        ++stats->accepted;
      }
      features = c.values.transpose();
      if (cfg.task == Task::kClassification) {
        *target = static_cast<double>(classifier::classify(c));
      } else {
        *target = lp::nl_distance(c, solver).nl;
      }
      break;
    }
    case ScenarioKind::kBilocal4: {
      const Eigen::Vector4d v =
          sampler::sample_ij(rs, cfg.max_attempts, stats);
      features = v.transpose();
      lp::NBLOptions opts;
      opts.grid_points = cfg.nu_grid;
      *target = lp::nbl_distance_ij(v[0], v[1], v[2], v[3], opts).nbl;
      break;
    }
    case ScenarioKind::kBilocal10: {
      const auto t = sampler::sample_tripartite(rs, cfg.max_attempts, stats);
      features = t.features().transpose();
      lp::NBLOptions opts;
      opts.grid_points = cfg.nu_grid;
      *target = lp::nbl_distance(t, opts).nbl;
      break;
    }
  }
}

double probe_target(const GenConfig& cfg, const Eigen::VectorXd& f) {
  switch (cfg.scenario.kind) {
    case ScenarioKind::kBipartite: {
      const auto c = scenario::make_correlators(cfg.scenario.m, f);
      if (cfg.task == Task::kClassification) {
        return static_cast<double>(classifier::classify(c));
      }
      return lp::nl_distance(c).nl;
    }
    case ScenarioKind::kBilocal4: {
      lp::NBLOptions opts;
      opts.grid_points = cfg.nu_grid;
      return lp::nbl_distance_ij(f[0], f[1], f[2], f[3], opts).nbl;
    }
    case ScenarioKind::kBilocal10: {
      lp::NBLOptions opts;
      opts.grid_points = cfg.nu_grid;
      return lp::nbl_distance(scenario::TripartiteCorrelators::from_features(f),
                              opts)
          .nbl;
    }
  }
  return 0.0;
}

}  // namespace

Dataset generate(const GenConfig& cfg, GenReport* report) {
  cfg.validate();
  const auto t_start = std::chrono::steady_clock::now();

  const int k = cfg.scenario.feature_width();
  const auto probes = cfg.probes ? probe_rows_for(cfg.scenario)
                                 : std::vector<ProbeRow>{};
  const int n_total = cfg.n + static_cast<int>(probes.size());

  Dataset d;
  d.task = cfg.task;
  d.X.resize(n_total, k);
  d.y.resize(n_total);

  const rng::Stream base(cfg.seed);
  sampler::SampleStats total;
  std::array<long long, 3> class_kept{0, 0, 0};
  std::array<long long, 3> class_seen{0, 0, 0};

  if (cfg.task == Task::kClassification) {
    // Balanced buckets: walk a candidate sequence (pure function of
    // seed + candidate index, so the result is worker-count independent)
    // and keep each sample only while its region bucket has room. Labels
    // are analytic, so this loop is cheap enough to stay sequential.
    const int per_class = cfg.n / 3;
    Eigen::MatrixXd bx(cfg.n, k);
    Eigen::VectorXd by(cfg.n);
    int row = 0;
    std::uint64_t candidate = 0;
    while (row < cfg.n) {
      if (total.attempts >= static_cast<std::uint64_t>(cfg.max_attempts)) {
        throw SamplingError(
            "class balancing exhausted " + std::to_string(total.attempts) +
            " candidates before filling all buckets; raise max-attempts");
      }
      rng::Stream rs = base.substream(candidate++);
      const auto c = sampler::sample_bipartite(cfg.scenario.m, rs);
      const int region = static_cast<int>(classifier::classify(c));
      ++total.attempts;
      ++class_seen[static_cast<std::size_t>(region)];
      if (class_kept[static_cast<std::size_t>(region)] < per_class) {
        bx.row(row) = c.values.transpose();
        by[row] = static_cast<double>(region);
        ++class_kept[static_cast<std::size_t>(region)];
        ++total.accepted;
        ++row;
      }
    }
    // Shuffle away the bucket-fill ordering.
    std::vector<int> perm(static_cast<std::size_t>(cfg.n));
    std::iota(perm.begin(), perm.end(), 0);
    rng::Stream shuffler(cfg.seed, /*stream_id=*/0xba1a);
    shuffler.shuffle(perm);
    for (int i = 0; i < cfg.n; ++i) {
      d.X.row(i) = bx.row(perm[static_cast<std::size_t>(i)]);
      d.y[i] = by[perm[static_cast<std::size_t>(i)]];
    }
  } else {
    int workers = cfg.workers;
    if (workers == 0) {
      workers = static_cast<int>(std::thread::hardware_concurrency());
      if (workers < 1) workers = 1;
    }
    workers = std::min(workers, cfg.n);

    std::vector<sampler::SampleStats> stats(static_cast<std::size_t>(workers));
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
    auto run_chunk = [&](int w, int begin, int end) {
      try {
        lp::SimplexSolver solver;  // warm-start carrier for two-party calls
        for (int i = begin; i < end; ++i) {
          double target = 0.0;
          fill_record(cfg, static_cast<std::uint64_t>(i), base, &solver,
                      d.X.row(i), &target, &stats[static_cast<std::size_t>(w)]);
          d.y[i] = target;
        }
      } catch (...) {
        errors[static_cast<std::size_t>(w)] = std::current_exception();
      }
    };

    if (workers <= 1) {
      run_chunk(0, 0, cfg.n);
    } else {
      std::vector<std::thread> threads;
      const int chunk = (cfg.n + workers - 1) / workers;
      for (int w = 0; w < workers; ++w) {
        const int begin = w * chunk;
        const int end = std::min(cfg.n, begin + chunk);
        if (begin >= end) break;
        threads.emplace_back(run_chunk, w, begin, end);
      }
      for (auto& t : threads) t.join();
    }
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }

    for (const auto& s : stats) {
      total.attempts += s.attempts;
      total.accepted += s.accepted;
    }
  }

  std::string probe_idx, probe_names;
  for (std::size_t p = 0; p < probes.size(); ++p) {
    const int row = cfg.n + static_cast<int>(p);
    d.X.row(row) = probes[p].features.transpose();
    d.y[row] = probe_target(cfg, probes[p].features);
    d.probe_rows.push_back(row);
    if (p > 0) {
      probe_idx += ',';
      probe_names += ';';
    }
    probe_idx += std::to_string(row);
    probe_names += probes[p].name;
  }

  d.metadata["schema"] = "1";
  d.metadata["generator"] = "belltrace/1";
  d.metadata["scenario"] = cfg.scenario.name();
  if (cfg.scenario.kind == ScenarioKind::kBipartite) {
    d.metadata["m"] = std::to_string(cfg.scenario.m);
  }
  d.metadata["task"] = to_string(cfg.task);
  d.metadata["target"] =
      cfg.task == Task::kClassification
          ? "region"
          : (cfg.scenario.kind == ScenarioKind::kBipartite ? "nl" : "nbl");
  if (cfg.task == Task::kRegression) {
    d.metadata["target_max"] = num17(cfg.scenario.target_max());
  }
  d.metadata["n_requested"] = std::to_string(cfg.n);
  d.metadata["n_rows"] = std::to_string(n_total);
  d.metadata["seed"] = std::to_string(cfg.seed);
  if (cfg.scenario.kind != ScenarioKind::kBipartite) {
    d.metadata["nu_grid"] = std::to_string(cfg.nu_grid);
  }
  d.metadata["max_attempts"] = std::to_string(cfg.max_attempts);
  d.metadata["attempts"] = std::to_string(total.attempts);
  d.metadata["accepted"] = std::to_string(total.accepted);
  d.metadata["acceptance_rate"] = num17(total.acceptance_rate());
  if (cfg.task == Task::kClassification) {
    auto join3 = [](const std::array<long long, 3>& a) {
      return std::to_string(a[0]) + "," + std::to_string(a[1]) + "," +
             std::to_string(a[2]);
    };
    d.metadata["class_counts"] = join3(class_kept);
    d.metadata["class_seen"] = join3(class_seen);
  }
  if (!probes.empty()) {
    d.metadata["probe_rows"] = probe_idx;
    d.metadata["probe_names"] = probe_names;
  }

  if (report != nullptr) {
    report->stats = total;
    report->oracle_calls = n_total;
    report->oracle_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                      t_start)
            .count();
  }
  d.validate();
  return d;
}

void write_csv(const Dataset& d, const std::string& path) {
  d.validate();
  std::ofstream os(path);
  if (!os) throw DataError("cannot open '" + path + "' for writing");
  for (int j = 0; j < d.width(); ++j) os << 'f' << j << ',';
  os << "target\n";
  for (int i = 0; i < d.n(); ++i) {
    for (int j = 0; j < d.width(); ++j) os << num17(d.X(i, j)) << ',';
    if (d.task == Task::kClassification) {
      os << static_cast<int>(d.y[i]) << '\n';
    } else {
      os << num17(d.y[i]) << '\n';
    }
  }
  if (!os) throw DataError("failed writing '" + path + "'");
  os.close();

  std::ofstream ms(path + ".meta");
  if (!ms) throw DataError("cannot open '" + path + ".meta' for writing");
  for (const auto& [key, value] : d.metadata) {
    ms << key << '=' << value << '\n';
  }
  if (!ms) throw DataError("failed writing '" + path + ".meta'");
}

Dataset read_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw DataError("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(is, line)) throw DataError("'" + path + "': empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();

  // Header must be f0,...,f{k-1},target.
  std::vector<std::string> cols;
  {
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) cols.push_back(tok);
  }
  if (cols.size() < 2 || cols.back() != "target") {
    throw DataError("'" + path + "': header must end in 'target'");
  }
  const int k = static_cast<int>(cols.size()) - 1;
  for (int j = 0; j < k; ++j) {
    if (cols[static_cast<std::size_t>(j)] != "f" + std::to_string(j)) {
      throw DataError("'" + path + "': expected feature column f" +
                      std::to_string(j) + ", found '" +
                      cols[static_cast<std::size_t>(j)] + "'");
    }
  }

  std::vector<double> values;
  int rows = 0, line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string tok;
    int found = 0;
    while (std::getline(ss, tok, ',')) {
      values.push_back(parse_double(tok, line_no));
      ++found;
    }
    if (found != k + 1) {
      throw DataError("'" + path + "' line " + std::to_string(line_no) +
                      ": expected " + std::to_string(k + 1) +
                      " fields, found " + std::to_string(found));
    }
    ++rows;
  }
  if (rows == 0) throw DataError("'" + path + "': no data rows");

  Dataset d;
  d.X.resize(rows, k);
  d.y.resize(rows);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < k; ++j) {
      d.X(i, j) = values[static_cast<std::size_t>(i * (k + 1) + j)];
    }
    d.y[i] = values[static_cast<std::size_t>(i * (k + 1) + k)];
  }

  // Sidecar metadata is optional.
  std::ifstream ms(path + ".meta");
  if (ms) {
    while (std::getline(ms, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty() || line[0] == '#') continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos) {
        throw DataError("'" + path + ".meta': malformed line '" + line + "'");
      }
      d.metadata[line.substr(0, eq)] = line.substr(eq + 1);
    }
    if (auto it = d.metadata.find("task"); it != d.metadata.end()) {
      d.task = task_from_string(it->second);
    }
    if (auto it = d.metadata.find("probe_rows"); it != d.metadata.end()) {
      std::stringstream ss(it->second);
      std::string tok;
      while (std::getline(ss, tok, ',')) {
        if (!tok.empty()) d.probe_rows.push_back(std::stoi(tok));
      }
    }
  }
  d.validate();
  return d;
}

Split train_test_split(const Dataset& d, double test_fraction,
                       std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw ConfigError("train_test_split: test fraction must be in (0, 1)");
  }
  std::vector<bool> is_probe(static_cast<std::size_t>(d.n()), false);
  for (int r : d.probe_rows) is_probe[static_cast<std::size_t>(r)] = true;
  std::vector<int> pool;
  pool.reserve(static_cast<std::size_t>(d.n()));
  for (int i = 0; i < d.n(); ++i) {
    if (!is_probe[static_cast<std::size_t>(i)]) pool.push_back(i);
  }
  if (pool.size() < 2) {
    throw ConfigError("train_test_split: need at least two non-probe rows");
  }
  rng::Stream rs(seed, /*stream_id=*/0x5117);
  rs.shuffle(pool);
  const int n_test =
      std::max(1, static_cast<int>(std::lround(test_fraction *
                                               static_cast<double>(pool.size()))));
  Split s;
  s.test_rows.assign(pool.begin(), pool.begin() + n_test);
  s.train_rows.assign(pool.begin() + n_test, pool.end());
  if (s.train_rows.empty()) {
    throw ConfigError("train_test_split: split leaves no training rows");
  }
  for (int r : d.probe_rows) s.test_rows.push_back(r);
  return s;
}

Eigen::MatrixXd take_rows(const Eigen::MatrixXd& X,
                          const std::vector<int>& rows) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), X.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) = X.row(rows[i]);
  }
  return out;
}

Eigen::VectorXd take_rows(const Eigen::VectorXd& v,
                          const std::vector<int>& rows) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out[static_cast<Eigen::Index>(i)] = v[rows[i]];
  }
  return out;
}

int poly2_width(int k) { return k + k * (k + 1) / 2; }

Eigen::MatrixXd poly2_features(const Eigen::MatrixXd& X) {
  const int n = static_cast<int>(X.rows());
  const int k = static_cast<int>(X.cols());
  Eigen::MatrixXd out(n, poly2_width(k));
  out.leftCols(k) = X;
  int col = k;
  for (int i = 0; i < k; ++i) {
    for (int j = i; j < k; ++j) {
      out.col(col++) = X.col(i).cwiseProduct(X.col(j));
    }
  }
  return out;
}

}  // namespace belltrace::data
