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

#include "ppreuse/simharness.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "json.hpp"
#include "ppreuse/errors.hpp"
#include "ppreuse/minimizer.hpp"
#include "ppreuse/report.hpp"

namespace ppreuse {
namespace {

TEST(SuiteSpec, TextRoundTrip) {
  SuiteSpec s = SuiteSpec::Preset("distill");
  s.seed = 99;
  s.similarity = 0.35;
  const std::string text = FormatSuiteSpec(s);
  EXPECT_EQ(FormatSuiteSpec(ParseSuiteSpec(text)), text);
}

TEST(SuiteSpec, RejectsInconsistentSpecs) {
  EXPECT_THROW(ParseSuiteSpec(R"({"tests_per_trainer": 10, "bases_per_trainer": 20})"),
               StructuralError);
  EXPECT_THROW(ParseSuiteSpec(R"({"similarity": 1.5})"), StructuralError);
  EXPECT_THROW(ParseSuiteSpec(R"({"no_such_key": 1})"), Error);
  EXPECT_THROW(ParseSuiteSpec("[1"), ParseError);
  EXPECT_THROW(SuiteSpec::Preset("huge"), StructuralError);
}

TEST(SyntheticSuite, DefaultShape) {
  const SyntheticSuite suite = SyntheticSuite::Generate(SuiteSpec{});
  EXPECT_EQ(suite.processors().size(), 4u);
  EXPECT_EQ(suite.universe_size(), 2000u);
  EXPECT_EQ(suite.CoverageTests().size(), 2100u);
  EXPECT_EQ(suite.VulnerabilityTests().size(), 2u);
  for (std::size_t t = 0; t < 3; ++t) EXPECT_EQ(suite.CoverageTests(t).size(), 700u);
}

TEST(SyntheticSuite, DeterministicPerSeed) {
  SuiteSpec spec;
  spec.seed = 12;
  const SyntheticSuite a = SyntheticSuite::Generate(spec);
  const SyntheticSuite b = SyntheticSuite::Generate(spec);
  EXPECT_EQ(a.ManifestJson(), b.ManifestJson());
  EXPECT_EQ(SerializeMatrix(a.TrainerMatrix(1)), SerializeMatrix(b.TrainerMatrix(1)));
  spec.seed = 13;
  EXPECT_NE(SyntheticSuite::Generate(spec).ManifestJson(), a.ManifestJson());
}

TEST(SyntheticSuite, DistillManifestBoundsTheMinimizer) {
  const SyntheticSuite suite = SyntheticSuite::Generate(SuiteSpec::Preset("distill"));
  const auto manifest = nlohmann::json::parse(suite.ManifestJson());
  EXPECT_EQ(manifest["bases"].size(), 50u);
  const MinimizeResult r = MinimizeExact(suite.TrainerMatrix(0));
  EXPECT_LE(r.selected.size(), manifest["bases"].size());
  EXPECT_TRUE(VerifyEquivalence(suite.TrainerMatrix(0), r.selected));
}

TEST(SyntheticSuite, FullSimilarityCopiesTrainerRows) {
  SuiteSpec spec;
  spec.similarity = 1.0;
  const SyntheticSuite suite = SyntheticSuite::Generate(spec);
  const std::size_t put = suite.ProcessorIndex(SyntheticSuite::kTestingPut);
  for (const auto& t : suite.tests()) {
    if (t.kind != TestKind::kCoverage) continue;
    ASSERT_EQ(suite.Row(put, t.id), suite.Row(t.origin, t.id)) << t.id;
  }
}

TEST(SyntheticSuite, MutantsAreDeterministic) {
  const SyntheticSuite suite = SyntheticSuite::Generate(SuiteSpec{});
  const std::string id = suite.CoverageTests().front();
  EXPECT_EQ(suite.Row(3, id, 4), suite.Row(3, id, 4));
  SyntheticFuzzer f(suite, SyntheticSuite::kTestingPut, 0);
  EXPECT_EQ(f.Execute(f.Mutate(id, 2)), suite.Row(3, id, 2));
  EXPECT_EQ(f.Execute(f.Load(id)), suite.Row(3, id));
}

TEST(StrategyOrder, SameSequenceReplaysTrainerCoverageOnIdenticalPut) {
  SuiteSpec spec;
  spec.similarity = 1.0;
  const SyntheticSuite suite = SyntheticSuite::Generate(spec);
  Rng rng(1);
  const auto order = StrategyOrder(suite, Strategy::kSameSequence, rng);
  const std::size_t put = suite.ProcessorIndex(SyntheticSuite::kTestingPut);
  CoveredSet on_put(suite.universe_size()), on_trainers(suite.universe_size());
  for (const auto& id : order) {
    MergeInto(on_put, suite.Row(put, id));
    MergeInto(on_trainers, suite.Row(suite.test(id).origin, id));
    ASSERT_EQ(on_put.bits, on_trainers.bits);
  }
  const StrategyRun run = RunStrategy(suite, Strategy::kSameSequence, 300, 1);
  CoveredSet replay(suite.universe_size());
  for (std::size_t i = 0; i < 300; ++i) {
    MergeInto(replay, suite.Row(suite.test(order[i]).origin, order[i]));
    ASSERT_DOUBLE_EQ(run.tot_cov[i], TotalCoverage(replay));
  }
}

TEST(StrategyOrder, RankedAverageMatchesBruteForceSort) {
  const SyntheticSuite suite = SyntheticSuite::Generate(SuiteSpec{});
  std::vector<std::pair<double, std::string>> want;
  for (const auto& t : suite.tests()) {
    double sum = 0.0;
    for (std::size_t p = 0; p < 3; ++p) {
      sum += 100.0 * static_cast<double>(suite.Row(p, t.id).count()) / suite.universe_size();
    }
    want.emplace_back(-sum / 3.0, t.id);
  }
  std::sort(want.begin(), want.end());
  Rng rng(1);
  const auto got = StrategyOrder(suite, Strategy::kRankedAverage, rng);
  ASSERT_EQ(got.size(), want.size());
  for (std::size_t i = 0; i < got.size(); ++i) EXPECT_EQ(got[i], want[i].second) << i;
}

TEST(StrategyOrder, RankedSingleIsDescendingStandalone) {
  const SyntheticSuite suite = SyntheticSuite::Generate(SuiteSpec{});
  Rng rng(1);
  const auto order = StrategyOrder(suite, Strategy::kRankedSingle, rng);
  for (std::size_t i = 1; i < order.size(); ++i) {
    const auto& a = suite.test(order[i - 1]);
    const auto& b = suite.test(order[i]);
    const std::size_t ca = suite.Row(a.origin, a.id).count();
    const std::size_t cb = suite.Row(b.origin, b.id).count();
    EXPECT_TRUE(ca > cb || (ca == cb && a.id < b.id)) << i;
  }
}

TEST(CoverageSpeedup, Examples) {
  const std::vector<double> t = {10, 20, 30, 40};
  EXPECT_DOUBLE_EQ(CoverageSpeedup(t, t, 25).ratio, 1.0);

  std::vector<double> base(12000, 0.0), ref(12000, 0.0);
  std::fill(base.begin() + 8547, base.end(), 65.0);
  std::fill(ref.begin() + 11245, ref.end(), 65.0);
  const Speedup s = CoverageSpeedup(ref, base, 65.0);
  EXPECT_EQ(s.base_tests, 8548u);
  EXPECT_EQ(s.ref_tests, 11246u);
  EXPECT_NEAR(s.ratio, 0.76, 0.005);

  std::vector<double> r2(600, 0.0), b2(600, 0.0);
  std::fill(r2.begin() + 99, r2.end(), 70.0);
  std::fill(b2.begin() + 499, b2.end(), 70.0);
  EXPECT_DOUBLE_EQ(CoverageSpeedup(r2, b2, 70.0).ratio, 5.0);

  const Speedup c = CoverageSpeedup(t, t, 90.0);
  EXPECT_TRUE(c.censored());
  EXPECT_EQ(c.ref_tests, 4u);
}

TEST(TestsToReach, FirstCrossingOrCensored) {
  const std::vector<double> t = {1, 5, 5, 9};
  EXPECT_EQ(TestsToReach(t, 5), std::make_pair(std::uint64_t{2}, false));
  EXPECT_EQ(TestsToReach(t, 10), std::make_pair(std::uint64_t{4}, true));
}

TEST(RunStrategy, TracesAreMonotoneWithTheFullBudget) {
  const SyntheticSuite suite = SyntheticSuite::Generate(SuiteSpec{});
  for (Strategy s : AllStrategies()) {
    const StrategyRun run = RunStrategy(suite, s, 400, 5);
    ASSERT_EQ(run.tot_cov.size(), 400u) << StrategyName(s);
    EXPECT_TRUE(std::is_sorted(run.tot_cov.begin(), run.tot_cov.end())) << StrategyName(s);
  }
  EXPECT_THROW(RunStrategy(suite, Strategy::kRefuzz, 0, 1), StructuralError);
}

CompareOptions SmallCompare() {
  CompareOptions opt;
  opt.strategies = {Strategy::kRefuzz, Strategy::kRandomSequence, Strategy::kBaselineScratch};
  opt.replicates = 3;
  opt.budget = 600;
  opt.master_seed = 4;
  return opt;
}

TEST(CompareStrategies, OrderedAndIndependentOfJobs) {
  CompareOptions opt = SmallCompare();
  const auto serial = CompareStrategies(opt);
  opt.jobs = 3;
  const auto parallel = CompareStrategies(opt);
  ASSERT_EQ(serial.size(), 9u);
  for (std::size_t i = 0; i < serial.size(); ++i) {
    EXPECT_EQ(serial[i].strategy, opt.strategies[i / 3]);
    EXPECT_EQ(serial[i].replicate, i % 3);
    EXPECT_EQ(serial[i].tot_cov.size(), 600u);
    EXPECT_EQ(serial[i].tot_cov, parallel[i].tot_cov);
    EXPECT_EQ(serial[i].suite_seed, serial[i % 3].suite_seed);
  }
}

double MedianTests(const std::vector<CompareRun>& runs, Strategy s, double threshold) {
  std::vector<double> v;
  for (const auto& r : runs) {
    if (r.strategy == s) v.push_back(static_cast<double>(TestsToReach(r.tot_cov, threshold).first));
  }
  return Median(v);
}

TEST(CompareStrategies, NoSimilarityNoReuseGain) {
  CompareOptions opt = SmallCompare();
  opt.replicates = 8;
  opt.budget = 1500;
  opt.strategies = {Strategy::kRefuzz, Strategy::kBaselineScratch};
  opt.spec.similarity = 0.0;
  const auto flat = CompareStrategies(opt);
  const double flat_gain = MedianTests(flat, Strategy::kBaselineScratch, 65.0) /
                           MedianTests(flat, Strategy::kRefuzz, 65.0);
  opt.spec.similarity = 0.8;
  const auto similar = CompareStrategies(opt);
  const double gain = MedianTests(similar, Strategy::kBaselineScratch, 65.0) /
                      MedianTests(similar, Strategy::kRefuzz, 65.0);
  EXPECT_LT(flat_gain, 1.5);
  EXPECT_GT(flat_gain, 0.67);
  EXPECT_GT(gain, 2.0 * flat_gain);
}

}  // namespace
}  // namespace ppreuse
