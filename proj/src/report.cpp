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

#include "ppreuse/report.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>

#include "json.hpp"
#include "ppreuse/errors.hpp"
#include "ppreuse/simharness.hpp"
#include "ppreuse/trainer.hpp"

namespace ppreuse {

namespace {

std::string Fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

std::vector<std::string_view> SplitFields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    out.push_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

template <typename T>
T ParseNumber(std::string_view text, std::size_t line) {
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ParseError(line, "bad number '" + std::string(text) + "'");
  }
  return value;
}

}  // namespace

double Median(std::vector<double> values) {
  if (values.empty()) throw StructuralError("median of no values");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

std::vector<double> MedianCurve(const std::vector<std::vector<double>>& runs) {
  std::size_t len = 0;
  for (const auto& r : runs) {
    if (r.empty()) throw StructuralError("empty trace");
    len = std::max(len, r.size());
  }
  std::vector<double> out(len);
  std::vector<double> column(runs.size());
  for (std::size_t i = 0; i < len; ++i) {
    for (std::size_t j = 0; j < runs.size(); ++j) {
      column[j] = runs[j][std::min(i, runs[j].size() - 1)];
    }
    out[i] = Median(column);
  }
  return out;
}

std::vector<StrategySummary> Summarize(const std::vector<StrategyTraces>& traces,
                                       const std::vector<double>& thresholds,
                                       std::string_view baseline) {
  if (traces.empty()) throw StructuralError("no traces to report");
  for (const auto& s : traces) {
    if (s.runs.empty()) throw StructuralError("strategy '" + s.strategy + "' has no runs");
    for (const auto& r : s.runs) {
      if (r.empty()) throw StructuralError("strategy '" + s.strategy + "' has an empty run");
    }
  }
  std::vector<StrategySummary> out;
  for (const auto& s : traces) {
    StrategySummary sum;
    sum.strategy = s.strategy;
    sum.replicates = s.runs.size();
    std::vector<double> finals;
    for (const auto& r : s.runs) finals.push_back(r.back());
    sum.median_final = Median(finals);
    for (double t : thresholds) {
      ThresholdStat st;
      st.threshold = t;
      std::vector<double> tests;
      for (const auto& r : s.runs) {
        const auto [n, censored] = TestsToReach(r, t);
        tests.push_back(static_cast<double>(n));
        st.censored_runs += censored ? 1 : 0;
      }
      st.median_tests = Median(tests);
      sum.thresholds.push_back(st);
    }
    out.push_back(std::move(sum));
  }
  std::size_t base = 0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out[i].strategy == baseline) base = i;
  }
  for (auto& sum : out) {
    for (std::size_t j = 0; j < sum.thresholds.size(); ++j) {
      ThresholdStat& st = sum.thresholds[j];
      const ThresholdStat& b = out[base].thresholds[j];
      st.speedup = st.median_tests > 0.0 ? b.median_tests / st.median_tests : 0.0;
      st.speedup_censored = st.censored_runs > 0 || b.censored_runs > 0;
    }
  }
  return out;
}

std::map<std::string, std::string> RenderReport(const std::vector<StrategyTraces>& traces,
                                                const std::vector<double>& thresholds,
                                                std::string_view baseline) {
  const std::vector<StrategySummary> summary = Summarize(traces, thresholds, baseline);
  std::string base_name(baseline);
  if (std::none_of(traces.begin(), traces.end(),
                   [&](const StrategyTraces& s) { return s.strategy == baseline; })) {
    base_name = traces.front().strategy;
  }

  std::map<std::string, std::string> files;
  for (const auto& s : traces) {
    std::string csv = "iteration,tot_cov\n";
    const std::vector<double> curve = MedianCurve(s.runs);
    for (std::size_t i = 0; i < curve.size(); ++i) {
      csv += std::to_string(i + 1);
      csv += ',';
      csv += Fixed(curve[i], 4);
      csv += '\n';
    }
    files["curve_" + s.strategy + ".csv"] = std::move(csv);
  }

  std::string table = "strategy,replicates,final_cov";
  for (double t : thresholds) {
    const std::string l = FormatLevel(t);
    table += ",tests_" + l + ",censored_" + l + ",speedup_" + l + ",speedup_censored_" + l;
  }
  table += '\n';
  for (const auto& s : summary) {
    table += s.strategy + ',' + std::to_string(s.replicates) + ',' + Fixed(s.median_final, 4);
    for (const auto& st : s.thresholds) {
      table += ',' + Fixed(st.median_tests, 1) + ',' + std::to_string(st.censored_runs) + ',' +
               Fixed(st.speedup, 3) + ',' + (st.speedup_censored ? "yes" : "no");
    }
    table += '\n';
  }
  files["summary.csv"] = std::move(table);

  nlohmann::ordered_json doc;
  doc["baseline"] = base_name;
  nlohmann::ordered_json ts = nlohmann::ordered_json::array();
  for (double t : thresholds) ts.push_back(t);
  doc["thresholds"] = std::move(ts);
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& s : summary) {
    nlohmann::ordered_json row;
    row["strategy"] = s.strategy;
    row["replicates"] = s.replicates;
    row["median_final_cov"] = s.median_final;
    nlohmann::ordered_json per = nlohmann::ordered_json::object();
    for (const auto& st : s.thresholds) {
      per[FormatLevel(st.threshold)] = {{"median_tests", st.median_tests},
                                        {"censored_runs", st.censored_runs},
                                        {"speedup", st.speedup},
                                        {"speedup_censored", st.speedup_censored}};
    }
    row["thresholds"] = std::move(per);
    rows.push_back(std::move(row));
  }
  doc["strategies"] = std::move(rows);
  files["summary.json"] = doc.dump(2) + "\n";
  return files;
}

std::string FormatTracesCsv(const std::vector<StrategyTraces>& traces) {
  std::string out = "strategy,replicate,iteration,tot_cov\n";
  for (const auto& s : traces) {
    for (std::size_t r = 0; r < s.runs.size(); ++r) {
      const std::string prefix = s.strategy + ',' + std::to_string(r) + ',';
      for (std::size_t i = 0; i < s.runs[r].size(); ++i) {
        out += prefix;
        out += std::to_string(i + 1);
        out += ',';
        out += Fixed(s.runs[r][i], 4);
        out += '\n';
      }
    }
  }
  return out;
}

std::vector<StrategyTraces> ParseTracesCsv(std::string_view text) {
  std::vector<StrategyTraces> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  bool header = true;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (header) {
      if (line != "strategy,replicate,iteration,tot_cov") {
        throw ParseError(line_no, "expected header strategy,replicate,iteration,tot_cov");
      }
      header = false;
      continue;
    }
    const auto f = SplitFields(line);
    if (f.size() != 4) throw ParseError(line_no, "expected 4 fields");
    const auto replicate = ParseNumber<std::size_t>(f[1], line_no);
    const auto iteration = ParseNumber<std::size_t>(f[2], line_no);
    const auto cov = ParseNumber<double>(f[3], line_no);
    auto it = std::find_if(out.begin(), out.end(),
                           [&](const StrategyTraces& s) { return s.strategy == f[0]; });
    if (it == out.end()) {
      out.push_back(StrategyTraces{std::string(f[0]), {}});
      it = out.end() - 1;
    }
    if (replicate > it->runs.size()) throw ParseError(line_no, "replicates out of order");
    if (replicate == it->runs.size()) it->runs.emplace_back();
    auto& run = it->runs[replicate];
    if (iteration != run.size() + 1) throw ParseError(line_no, "iterations out of order");
    run.push_back(cov);
  }
  if (header) throw ParseError(line_no, "empty traces file");
  return out;
}

}  // namespace ppreuse
