// Copyright 2026 The cfobe Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Python module: configuration, experiment runs and a few kernels.

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <sstream>

#include "cfobe/harness.hpp"
#include "cfobe/linalg.hpp"
#include "cfobe/uplink.hpp"

namespace py = pybind11;
using namespace cfobe;

namespace {

ExperimentConfig config_from_text(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

py::list rows_to_python(const std::vector<ReportRow>& rows) {
  py::list out;
  for (const auto& r : rows) {
    py::dict d;
    d["trial"] = r.trial;
    d["sweep"] = r.sweep;
    d["direction"] = r.direction;
    d["scheme"] = r.scheme;
    d["estimator"] = r.estimator;
    d["ue"] = r.ue;
    d["sinr_mc"] = r.sinr_mc;
    d["se_mc"] = r.se_mc;
    d["stderr"] = r.stderr_mc;
    d["sinr_cf"] = r.sinr_cf;
    d["se_cf"] = r.se_cf;
    d["wall_ms"] = r.wall_ms;
    out.append(d);
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(cfobe, m) {
  m.doc() = "Bilinear-equalizer beamforming for cell-free massive MIMO";

  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

  m.def(
      "normalize_config", [](const std::string& text) { return format_config(config_from_text(text)); },
      py::arg("text"), "Parses key = value text and returns the full effective configuration.");

  m.def(
      "run",
      [](const std::string& text, std::optional<std::uint64_t> seed, std::optional<std::string> direction,
         std::optional<std::int64_t> mc_samples, std::optional<std::int64_t> obe_samples, int workers) {
        ExperimentConfig cfg = config_from_text(text);
        if (seed) cfg.seed = *seed;
        if (direction) cfg.direction = parse_direction(*direction);
        if (mc_samples) cfg.mc_samples = *mc_samples;
        if (obe_samples) cfg.obe_samples = *obe_samples;
        cfg.workers = workers;
        std::vector<ReportRow> rows;
        {
          py::gil_scoped_release release;
          rows = run_experiment(cfg);
        }
        return rows_to_python(rows);
      },
      py::arg("config"), py::kw_only(), py::arg("seed") = py::none(), py::arg("direction") = py::none(),
      py::arg("mc_samples") = py::none(), py::arg("obe_samples") = py::none(), py::arg("workers") = 1,
      "Runs an experiment described by config text and returns one dict per report row.");

  m.def(
      "statistics_json",
      [](const std::string& text, int trial, std::optional<int> sweep_value) {
        const ExperimentConfig cfg = config_from_text(text);
        const ScenarioConfig s = cell_scenario(cfg, trial, sweep_value.value_or(cfg.sweep_values.front()));
        return statistics_to_json(build_statistics(generate_geometry(s), s)).dump();
      },
      py::arg("config"), py::arg("trial") = 0, py::arg("sweep_value") = py::none(),
      "Channel statistics of one cell as JSON text, complex values as [re, im].");

  m.def(
      "obe_sinr",
      [](const std::string& text, const std::string& estimator, int trial, std::optional<int> sweep_value) {
        const ExperimentConfig cfg = config_from_text(text);
        const ScenarioConfig s = cell_scenario(cfg, trial, sweep_value.value_or(cfg.sweep_values.front()));
        const ChannelStatistics stats = build_statistics(generate_geometry(s), s);
        const PilotSetup pilots = assign_pilots(s);
        const EstimatorBank est = build_estimator_bank(EstimatorSpec::parse(estimator), stats, pilots, s);
        std::vector<double> sinr;
        for (const auto& u : obe_closed(stats, pilots, est, s).ue) sinr.push_back(u.sinr);
        return sinr;
      },
      py::arg("config"), py::arg("estimator") = "MMSE", py::arg("trial") = 0, py::arg("sweep_value") = py::none(),
      "Closed-form OBE uplink SINR per UE for one cell.");

  m.def("kron", &kron, py::arg("a"), py::arg("b"));
  m.def("vec", &vec, py::arg("m"));
  m.def("unvec", &unvec, py::arg("v"), py::arg("rows"));

  m.attr("CSV_HEADER") = kCsvHeader;
}
