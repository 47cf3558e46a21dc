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

// Strategy comparison reports: per-strategy curves, a summary table and a
// JSON summary, all rendered to strings first so they can be checked
// without touching the file system.

#ifndef PPREUSE_REPORT_HPP_
#define PPREUSE_REPORT_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace ppreuse {

struct StrategyTraces {
  std::string strategy;
  // One tot_cov curve per replicate, replicate order.
  std::vector<std::vector<double>> runs;
};

struct ThresholdStat {
  double threshold = 0.0;
  // Median over replicates of tests-to-threshold; a censored replicate
  // counts its full trace length.
  double median_tests = 0.0;
  std::size_t censored_runs = 0;
  // median_tests(baseline) / median_tests(this strategy).
  double speedup = 0.0;
  // True when either median sits on a censored value.
  bool speedup_censored = false;
};

struct StrategySummary {
  std::string strategy;
  std::size_t replicates = 0;
  double median_final = 0.0;
  std::vector<ThresholdStat> thresholds;
};

// Even counts take the mean of the two middle values.
double Median(std::vector<double> values);

// Per-iteration median curve; shorter runs are extended by their last value.
std::vector<double> MedianCurve(const std::vector<std::vector<double>>& runs);

// `baseline` names the strategy speedups are measured against; when it is
// not among the traces the first strategy is used. StructuralError on no
// traces or an empty run.
std::vector<StrategySummary> Summarize(const std::vector<StrategyTraces>& traces,
                                       const std::vector<double>& thresholds,
                                       std::string_view baseline);

// File name -> content:
//   curve_<strategy>.csv   iteration,tot_cov (median over replicates)
//   summary.csv            one row per strategy
//   summary.json
std::map<std::string, std::string> RenderReport(const std::vector<StrategyTraces>& traces,
                                                const std::vector<double>& thresholds,
                                                std::string_view baseline);

// Long format: strategy,replicate,iteration,tot_cov.
std::string FormatTracesCsv(const std::vector<StrategyTraces>& traces);
// Inverse of FormatTracesCsv. Strategies keep first-appearance order.
std::vector<StrategyTraces> ParseTracesCsv(std::string_view text);

}  // namespace ppreuse

#endif  // PPREUSE_REPORT_HPP_
