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

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>

#include "belltrace/classifier.hpp"
#include "belltrace/dataset.hpp"
#include "belltrace/ensemble.hpp"
#include "belltrace/errors.hpp"
#include "belltrace/oracles.hpp"
#include "belltrace/quantum.hpp"
#include "belltrace/scenario.hpp"

namespace py = pybind11;
using namespace belltrace;

namespace {

scenario::TripartiteCorrelators tri_from(const Eigen::VectorXd& features) {
  return scenario::TripartiteCorrelators::from_features(features);
}

lp::NBLOptions nbl_options(int grid_points) {
  lp::NBLOptions opts;
  opts.grid_points = grid_points;
  return opts;
}

py::dict nbl_dict(const lp::NBLResult& r) {
  py::dict d;
  d["nbl"] = r.nbl;
  d["nu_star"] = r.nu_star;
  d["nu_range"] = py::make_tuple(r.nu_range.lo, r.nu_range.hi);
  d["lp_solves"] = r.lp_solves;
  d["early_exit"] = r.early_exit;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, mod) {
  mod.doc() =
      "Exact nonclassicality quantifiers for two-party and two-source "
      "network correlations, plus their trained surrogate ensembles.";

  // Domain errors map to ValueError; genuine numeric failures stay fatal.
  py::register_exception<UsageError>(mod, "UsageError", PyExc_ValueError);
  py::register_exception<ConfigError>(mod, "ConfigError", PyExc_ValueError);
  py::register_exception<DataError>(mod, "DataError", PyExc_ValueError);

  // --- exact quantifiers ---------------------------------------------------

  mod.def(
      "nl_distance",
      [](const Eigen::VectorXd& correlators, int m) {
        return lp::nl_distance(scenario::make_correlators(m, correlators)).nl;
      },
      py::arg("correlators"), py::arg("m") = 2,
      "Trace distance from an m-setting correlator vector (length m*m, "
      "row-major in the two setting indices) to the local set.");

  mod.def(
      "nbl_distance",
      [](const Eigen::VectorXd& features, int grid_points) {
        return nbl_dict(lp::nbl_distance(tri_from(features),
                                         nbl_options(grid_points)));
      },
      py::arg("features"), py::arg("grid_points") = 1000,
      "Distance from a ten-feature three-party point (eight three-way "
      "correlators then the two first-party marginals) to the two-source "
      "set, minimized over the sweep parameter grid.");

  mod.def(
      "nbl_distance_ij",
      [](double i, double j, double a0, double a1, int grid_points) {
        return nbl_dict(
            lp::nbl_distance_ij(i, j, a0, a1, nbl_options(grid_points)));
      },
      py::arg("i"), py::arg("j"), py::arg("a0"), py::arg("a1"),
      py::arg("grid_points") = 1000,
      "Two-source distance from the aggregate description (I, J, <A_0>, "
      "<A_1>).");

  // --- analytic region tools -------------------------------------------

  mod.def(
      "classify",
      [](const Eigen::VectorXd& correlators) {
        return std::string(classifier::to_string(
            classifier::classify(scenario::make_correlators(2, correlators))));
      },
      py::arg("correlators"),
      "Region of a two-setting correlator point: 'local', 'quantum', or "
      "'post-quantum'.");

  mod.def(
      "chsh_symmetries",
      [](const Eigen::VectorXd& correlators) {
        return scenario::chsh_symmetries(
            scenario::make_correlators(2, correlators));
      },
      py::arg("correlators"),
      "The four sign-symmetries of the two-setting Bell expression.");

  mod.def(
      "ij_functionals",
      [](const Eigen::VectorXd& features) {
        const auto ij = scenario::ij_functionals(tri_from(features));
        return py::make_tuple(ij.i, ij.j);
      },
      py::arg("features"),
      "The aggregate functionals (I, J) of a ten-feature three-party "
      "point.");

  mod.def("bilocal_inequality_value", &scenario::bilocal_inequality_value,
          py::arg("i"), py::arg("j"),
          "sqrt|I| + sqrt|J|; at most 1 for two-independent-source models.");

  // --- quantum correlator generators ---------------------------------------

  mod.def(
      "pair_correlators",
      [](double theta, const std::vector<double>& alphas,
         const std::vector<double>& betas) {
        return quantum::pair_correlators(theta, alphas, betas).values;
      },
      py::arg("theta"), py::arg("alphas"), py::arg("betas"),
      "Correlator table of a partially entangled pair measured at planar "
      "angles, flattened row-major.");

  mod.def(
      "chsh_optimal_settings",
      [](double theta) {
        const auto s = quantum::chsh_optimal_settings(theta);
        py::dict d;
        d["alice"] = s.alice;
        d["bob"] = s.bob;
        d["chsh"] = s.chsh;
        return d;
      },
      py::arg("theta"),
      "Settings maximizing the two-setting Bell expression for the pair "
      "of parameter theta, with the attained maximum.");

  mod.def(
      "swap_correlators",
      [](double theta, const std::array<double, 2>& alphas,
         const std::array<double, 2>& gammas) {
        return quantum::swap_correlators(theta, alphas, gammas).features();
      },
      py::arg("theta"), py::arg("alphas"), py::arg("gammas"),
      "Ten-feature point of the entanglement-swapping line with pure pair "
      "sources and planar end-observer angles.");

  mod.def(
      "werner_swap_correlators",
      [](double v) { return quantum::werner_swap_correlators(v).features(); },
      py::arg("v"),
      "Ten-feature point of the swapping line with two noisy singlet "
      "sources of visibility v.");

  // --- data -----------------------------------------------------------

  mod.def(
      "generate",
      [](const std::string& scenario_name, const std::string& task, int n,
         std::uint64_t seed, int m, int nu_grid, bool probes) {
        data::GenConfig cfg;
        cfg.scenario = data::ScenarioSpec::parse(scenario_name, m);
        cfg.task = data::task_from_string(task);
        cfg.n = n;
        cfg.seed = seed;
        cfg.nu_grid = nu_grid;
        cfg.probes = probes;
        const data::Dataset d = data::generate(cfg);
        return py::make_tuple(d.X, d.y);
      },
      py::arg("scenario"), py::arg("task"), py::arg("n"), py::arg("seed") = 0,
      py::arg("m") = 2, py::arg("nu_grid") = 1000, py::arg("probes") = true,
      "Sample a labeled corpus; returns (features, targets). Deterministic "
      "in the seed.");

  mod.def("poly2_features", &data::poly2_features, py::arg("X"),
          "Degree-2 monomial expansion used by the trained ensembles.");

  // --- trained ensembles ----------------------------------------------

  py::class_<learn::EnsembleModel>(mod, "Ensemble",
                                   "A trained stacked ensemble loaded from "
                                   "the plain-text model format.")
      .def_static("load", &learn::load_ensemble, py::arg("path"))
      .def(
          "predict",
          [](const learn::EnsembleModel& m, const Eigen::MatrixXd& X) {
            return m.predict(X);
          },
          py::arg("X"),
          "Clamped regression predictions from raw (unexpanded) features.")
      .def(
          "predict_class",
          [](const learn::EnsembleModel& m, const Eigen::MatrixXd& X) {
            return m.predict_class(X);
          },
          py::arg("X"), "Region indices from raw features.")
      .def_property_readonly(
          "task",
          [](const learn::EnsembleModel& m) {
            return std::string(data::to_string(m.task));
          })
      .def_property_readonly(
          "scenario",
          [](const learn::EnsembleModel& m) { return m.scenario.name(); })
      .def_property_readonly("member_count",
                             [](const learn::EnsembleModel& m) {
                               return static_cast<int>(m.members.size());
                             });
}
