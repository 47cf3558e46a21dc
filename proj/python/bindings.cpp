// Copyright 2026 The ppreuse Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <chrono>
#include <sstream>

#include "ppreuse/cli.hpp"
#include "ppreuse/coverage.hpp"
#include "ppreuse/errors.hpp"
#include "ppreuse/minimizer.hpp"
#include "ppreuse/report.hpp"
#include "ppreuse/runtime.hpp"
#include "ppreuse/simharness.hpp"
#include "ppreuse/trainer.hpp"

namespace py = pybind11;
using namespace ppreuse;

namespace {

CoverageMatrix MatrixFromRcdb(const std::vector<std::pair<std::string, std::string>>& docs) {
  std::vector<ParsedCoverage> rows;
  rows.reserve(docs.size());
  for (const auto& [id, text] : docs) rows.push_back(ParseCoverageDb(text, id));
  return BuildMatrix(rows);
}

py::dict MinimizeToDict(const CoverageMatrix& m, const MinimizeResult& r) {
  py::dict d;
  d["selected"] = r.selected;
  d["method"] = std::string(MinimizeMethodName(r.method));
  d["reduction_rate"] = ReductionRate(m, r);
  d["empty_rows"] = r.empty_rows;
  d["equivalent"] = VerifyEquivalence(m, r.selected);
  return d;
}

std::vector<std::string> DropSequence(const std::vector<double>& increments,
                                      std::uint64_t gamma) {
  DropTracker tracker{"t", 0, 0.0};
  std::vector<std::string> out;
  for (double inc : increments) {
    const DropDecision d = DropTest(tracker, inc, gamma);
    out.emplace_back(DropDecisionName(d));
    if (d == DropDecision::kDrop) break;
  }
  return out;
}

SyntheticSuite SuiteFrom(const std::string& spec_json, const std::string& preset) {
  if (!preset.empty()) return SyntheticSuite::Generate(SuiteSpec::Preset(preset));
  return SyntheticSuite::Generate(spec_json.empty() ? SuiteSpec{} : ParseSuiteSpec(spec_json));
}

std::string Train(const SyntheticSuite& suite, std::uint64_t seed, const std::string& algorithm,
                  bool tune) {
  PipelineOptions options;
  options.algorithm = ParseCbAlgorithm(algorithm);
  options.tune = tune;
  return SerializeModel(TrainOnSuite(suite, options, seed).model);
}

py::dict Run(const SyntheticSuite& suite, const std::string& model_json, std::uint64_t budget,
             std::uint64_t gamma, std::uint64_t seed) {
  const CampaignReport r = RunModelOnSuite(suite, ParseModel(model_json), budget, gamma, seed);
  std::vector<double> tot_cov;
  tot_cov.reserve(r.trace.size());
  for (const auto& row : r.trace) tot_cov.push_back(row.tot_cov);
  py::dict d;
  d["tot_cov"] = tot_cov;
  d["final_tot_cov"] = r.final_tot_cov;
  d["summary"] = FormatCampaignSummary(r);
  d["trace_csv"] = FormatTraceCsv(r.trace);
  return d;
}

py::list Compare(const std::string& spec_json, const std::vector<std::string>& strategies,
                 std::size_t seeds, std::uint64_t budget, std::uint64_t master_seed,
                 std::size_t jobs) {
  CompareOptions opt;
  if (!spec_json.empty()) opt.spec = ParseSuiteSpec(spec_json);
  if (!strategies.empty()) {
    opt.strategies.clear();
    for (const auto& s : strategies) opt.strategies.push_back(ParseStrategy(s));
  }
  opt.replicates = seeds;
  opt.budget = budget;
  opt.master_seed = master_seed;
  opt.jobs = jobs;
  std::vector<CompareRun> runs;
  {
    py::gil_scoped_release release;
    runs = CompareStrategies(opt);
  }
  py::list out;
  for (const auto& r : runs) {
    py::dict d;
    d["strategy"] = std::string(StrategyName(r.strategy));
    d["replicate"] = r.replicate;
    d["seed"] = r.seed;
    d["tot_cov"] = r.tot_cov;
    out.append(d);
  }
  return out;
}

py::tuple Cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = RunCommand(args, out, err);
  return py::make_tuple(code, out.str(), err.str());
}

}  // namespace

PYBIND11_MODULE(_ppreuse, m) {
  m.doc() = "Coverage-guided test reuse for fuzzing campaigns";

  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ParseError>(m, "ParseError", m.attr("Error").ptr());
  py::register_exception<StructuralError>(m, "StructuralError", m.attr("Error").ptr());
  py::register_exception<ModelError>(m, "ModelError", m.attr("Error").ptr());

  py::class_<CoverageMatrix>(m, "CoverageMatrix")
      .def_static("from_text", [](const std::string& t) { return ParseMatrix(t); })
      .def_static("from_rcdb", &MatrixFromRcdb, py::arg("docs"),
                  "Build a matrix from (test_id, rcdb_text) pairs.")
      .def("to_text", [](const CoverageMatrix& mx) { return SerializeMatrix(mx); })
      .def_property_readonly("num_rows", &CoverageMatrix::num_rows)
      .def_property_readonly("num_points", &CoverageMatrix::num_points)
      .def_property_readonly("test_ids",
                             [](const CoverageMatrix& mx) {
                               std::vector<std::string> ids;
                               for (const auto& r : mx.rows()) ids.push_back(r.test_id);
                               return ids;
                             })
      .def("row", [](const CoverageMatrix& mx, std::size_t i) {
        const BitVector& b = mx.row(i).bits;
        std::vector<bool> bits(b.size());
        for (std::size_t j = 0; j < b.size(); ++j) bits[j] = b.test(j);
        return bits;
      });

  m.def(
      "minimize",
      [](const CoverageMatrix& mx, bool exact, double budget_s) {
        MinimizeResult r;
        {
          py::gil_scoped_release release;
          r = exact ? MinimizeExact(mx, std::chrono::duration<double>(budget_s))
                    : MinimizeGreedy(mx);
        }
        return MinimizeToDict(mx, r);
      },
      py::arg("matrix"), py::arg("exact") = true, py::arg("budget_s") = 60.0);
  m.def("verify_equivalence",
        [](const CoverageMatrix& mx, const std::vector<std::string>& selected) {
          return VerifyEquivalence(mx, selected);
        });
  m.def("drop_sequence", &DropSequence, py::arg("increments"), py::arg("gamma") = 3,
        "Decisions of the drop rule for a stream of coverage increments.");
  m.def(
      "search_threshold",
      [](const std::function<std::size_t(double)>& probe, std::size_t k, double f) {
        const ThresholdSearch s = SearchThreshold(probe, k, f);
        py::dict d;
        d["theta"] = s.theta;
        d["probes"] = s.probes;
        d["accepted"] = s.accepted;
        d["list_size"] = s.last_count;
        return d;
      },
      py::arg("probe"), py::arg("k"), py::arg("f") = 0.1);

  py::class_<SyntheticSuite>(m, "SyntheticSuite")
      .def(py::init(&SuiteFrom), py::arg("spec_json") = "", py::arg("preset") = "")
      .def_property_readonly("processors", &SyntheticSuite::processors)
      .def("coverage_tests", [](const SyntheticSuite& s) { return s.CoverageTests(); })
      .def("vulnerability_tests", &SyntheticSuite::VulnerabilityTests)
      .def("trainer_matrix", &SyntheticSuite::TrainerMatrix)
      .def("manifest_json", &SyntheticSuite::ManifestJson);

  m.def("train", &Train, py::arg("suite"), py::arg("seed") = 1,
        py::arg("algorithm") = "adaptive", py::arg("tune") = true,
        "Minimize, tune and train on a synthetic suite. Returns model JSON.");
  m.def("run", &Run, py::arg("suite"), py::arg("model_json"), py::arg("budget") = 3000,
        py::arg("gamma") = 3, py::arg("seed") = 1);
  m.def("compare", &Compare, py::arg("spec_json") = "",
        py::arg("strategies") = std::vector<std::string>{}, py::arg("seeds") = 20,
        py::arg("budget") = 3000, py::arg("master_seed") = 1, py::arg("jobs") = 1);
  m.def("tests_to_reach", [](const std::vector<double>& trace, double threshold) {
    const auto [n, censored] = TestsToReach(trace, threshold);
    return py::make_tuple(n, censored);
  });
  m.def("cli", &Cli, py::arg("args"), "Run a CLI command. Returns (exit_code, stdout, stderr).");
}
