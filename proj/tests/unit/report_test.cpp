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

#include <gtest/gtest.h>

#include "json.hpp"
#include "ppreuse/errors.hpp"
#include "ppreuse/simharness.hpp"

namespace ppreuse {
namespace {

TEST(Median, OddEvenAndEmpty) {
  EXPECT_DOUBLE_EQ(Median({3, 1, 2}), 2.0);
  EXPECT_DOUBLE_EQ(Median({4, 1, 3, 2}), 2.5);
  EXPECT_THROW(Median({}), StructuralError);
}

TEST(MedianCurve, ExtendsShortRuns) {
  const auto c = MedianCurve({{1, 2, 3}, {2, 4}, {0, 1, 9}});
  EXPECT_EQ(c, (std::vector<double>{1, 2, 4}));
}

TEST(Summarize, SingleTraceIsItsOwnBaseline) {
  const std::vector<StrategyTraces> t = {{"only", {{10, 50, 70}}}};
  const auto files = RenderReport(t, {50}, "baseline_scratch");
  EXPECT_EQ(files.size(), 3u);
  EXPECT_TRUE(files.count("curve_only.csv"));
  const auto s = Summarize(t, {50}, "baseline_scratch");
  EXPECT_DOUBLE_EQ(s[0].thresholds[0].speedup, 1.0);
  EXPECT_DOUBLE_EQ(s[0].median_final, 70.0);
}

TEST(Summarize, SpeedupEqualsCoverageSpeedup) {
  const std::vector<double> ref = {10, 30, 55, 60, 61, 66};
  const std::vector<double> base = {5, 10, 20, 30, 40, 50, 55, 58, 60, 62};
  const std::vector<StrategyTraces> t = {{"refuzz", {ref}}, {"baseline_scratch", {base}}};
  const auto s = Summarize(t, {55, 60}, "baseline_scratch");
  for (std::size_t j = 0; j < 2; ++j) {
    const double level = j == 0 ? 55.0 : 60.0;
    EXPECT_DOUBLE_EQ(s[0].thresholds[j].speedup, CoverageSpeedup(ref, base, level).ratio);
    EXPECT_FALSE(s[0].thresholds[j].speedup_censored);
  }
}

TEST(Summarize, CensoredThresholdIsFlagged) {
  const std::vector<StrategyTraces> t = {{"a", {{10, 20}}}, {"baseline_scratch", {{10, 40}}}};
  const auto files = RenderReport(t, {30}, "baseline_scratch");
  const std::string& csv = files.at("summary.csv");
  EXPECT_NE(csv.find("a,1,20.0000,2.0,1,1.000,yes"), std::string::npos) << csv;
  const auto doc = nlohmann::json::parse(files.at("summary.json"));
  EXPECT_EQ(doc["baseline"], "baseline_scratch");
  EXPECT_EQ(doc["strategies"][0]["thresholds"]["30"]["censored_runs"], 1);
  EXPECT_EQ(doc["strategies"][0]["thresholds"]["30"]["speedup_censored"], true);
}

TEST(Summarize, RejectsEmptyInput) {
  EXPECT_THROW(Summarize({}, {50}, "x"), StructuralError);
  EXPECT_THROW(Summarize({{"a", {}}}, {50}, "x"), StructuralError);
}

TEST(TracesCsv, RoundTrip) {
  const std::vector<StrategyTraces> t = {{"refuzz", {{1.5, 2.25}, {3, 4, 5}}},
                                         {"random_sequence", {{0.5}}}};
  const std::string text = FormatTracesCsv(t);
  const auto back = ParseTracesCsv(text);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].strategy, "refuzz");
  EXPECT_EQ(back[0].runs, t[0].runs);
  EXPECT_EQ(FormatTracesCsv(back), text);
}

TEST(TracesCsv, Errors) {
  EXPECT_THROW(ParseTracesCsv(""), ParseError);
  EXPECT_THROW(ParseTracesCsv("wrong,header\n"), ParseError);
  const std::string head = "strategy,replicate,iteration,tot_cov\n";
  EXPECT_THROW(ParseTracesCsv(head + "a,0,2,1.0\n"), ParseError);
  EXPECT_THROW(ParseTracesCsv(head + "a,1,1,1.0\n"), ParseError);
  EXPECT_THROW(ParseTracesCsv(head + "a,0,1,x\n"), ParseError);
  try {
    ParseTracesCsv(head + "a,0,1,1.0\na,0,1\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

}  // namespace
}  // namespace ppreuse
