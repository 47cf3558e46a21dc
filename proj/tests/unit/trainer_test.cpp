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

#include "ppreuse/trainer.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <set>

#include "json.hpp"
#include "ppreuse/errors.hpp"
#include "ppreuse/simharness.hpp"

namespace ppreuse {
namespace {

CoveredSet Covering(std::size_t n, std::size_t first, std::size_t count) {
  BitVector b(n);
  for (std::size_t i = first; i < first + count; ++i) b.set(i);
  return CoveredSet(b);
}

TEST(SnapshotContexts, FirstCrossing) {
  const std::vector<CoveredSet> trace = {Covering(100, 0, 40), Covering(100, 0, 57),
                                         Covering(100, 0, 62), Covering(100, 0, 66)};
  const std::vector<double> levels = {55, 60};
  const auto snaps = SnapshotContexts({{"p", trace}}, levels);
  ASSERT_EQ(snaps.size(), 2u);
  EXPECT_EQ(snaps[0].per_processor.at("p").count(), 57u);
  EXPECT_EQ(snaps[1].per_processor.at("p").count(), 62u);
}

TEST(SnapshotContexts, UnreachedLevelIsAbsent) {
  const std::vector<CoveredSet> trace = {Covering(100, 0, 30), Covering(100, 0, 58)};
  const std::vector<double> levels = {55, 60};
  const auto snaps = SnapshotContexts({{"p", trace}, {"q", {Covering(100, 0, 61)}}}, levels);
  EXPECT_TRUE(snaps[0].per_processor.count("p"));
  EXPECT_FALSE(snaps[1].per_processor.count("p"));
  EXPECT_TRUE(snaps[1].per_processor.count("q"));
  EXPECT_THROW(SnapshotContexts({{"p", {}}}, levels), StructuralError);
}

TEST(SnapshotContexts, SyntheticTracesLandInsideTheStep) {
  const SyntheticSuite suite = SyntheticSuite::Generate(SuiteSpec{});
  const std::vector<double> levels = ContextLevels();
  std::map<std::string, std::vector<CoveredSet>> traces;
  for (std::size_t p = 0; p < 3; ++p) {
    traces[suite.processors()[p]] = suite.BaselineTrace(p, 75.0);
  }
  for (const auto& snap : SnapshotContexts(traces, levels)) {
    for (const auto& [name, covered] : snap.per_processor) {
      const double c = TotalCoverage(covered);
      EXPECT_GE(c, snap.level) << name;
      EXPECT_LT(c, snap.level + 5.0) << name;
    }
  }
}

TEST(ContextLevels, Defaults) {
  EXPECT_EQ(ContextLevels(), (std::vector<double>{55, 60, 65, 70}));
}

TEST(SearchThreshold, ClosedFormEnvironment) {
  std::size_t probes = 0;
  const auto probe = [&](double theta) {
    ++probes;
    return static_cast<std::size_t>(std::clamp(200.0 - 10.0 * theta, 0.0, 200.0));
  };
  const ThresholdSearch s = SearchThreshold(probe, 100, 0.1);
  EXPECT_TRUE(s.accepted);
  EXPECT_GE(s.last_count, 90u);
  EXPECT_LE(s.last_count, 110u);
  EXPECT_LE(s.probes, 14u);
  EXPECT_EQ(s.probes, probes);
  EXPECT_EQ(probe(s.theta), s.last_count);
}

TEST(SearchThreshold, NeverMoreThanFourteenProbes) {
  Rng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const double slope = 1.0 + 50.0 * Uniform01(rng);
    const double top = 50.0 + 500.0 * Uniform01(rng);
    std::size_t probes = 0;
    const auto probe = [&](double theta) {
      ++probes;
      return static_cast<std::size_t>(std::max(0.0, top - slope * theta));
    };
    const ThresholdSearch s = SearchThreshold(probe, 100, 0.1);
    EXPECT_LE(probes, 14u);
    if (s.accepted) {
      EXPECT_GE(s.last_count, 90u);
      EXPECT_LE(s.last_count, 110u);
    }
  }
}

TEST(SearchThreshold, ZeroToleranceRunsAllProbes) {
  const auto probe = [](double theta) { return theta < 50.0 ? std::size_t{150} : std::size_t{50}; };
  const ThresholdSearch s = SearchThreshold(probe, 100, 0.0);
  EXPECT_FALSE(s.accepted);
  EXPECT_EQ(s.probes, 14u);
  // Midpoints stay on the 0.01 grid.
  EXPECT_NEAR(s.theta * 100.0, std::round(s.theta * 100.0), 1e-9);
}

// Ten tests over 20 points: t01..t05 each add one point that the level-60
// snapshot already covers, t06..t10 one point the level-70 snapshot covers.
// So t01..t05 only pay at 70 and t06..t10 only at 60.
struct TwoLevelEnv {
  std::vector<std::string> corpus;
  RewardEnv env;
  TwoLevelEnv()
      : env({"p"}, 20, [](const std::string&, const std::string& id) {
          BitVector b(20);
          b.set(9 + static_cast<std::size_t>(std::stoi(id.substr(1))));
          return b;
        }) {
    for (int i = 1; i <= 10; ++i) {
      char id[8];
      std::snprintf(id, sizeof(id), "t%02d", i);
      corpus.emplace_back(id);
    }
    ContextSnapshot at70{70.0, {{"p", Covering(20, 15, 5)}}};
    ContextSnapshot at60{60.0, {{"p", Covering(20, 10, 5)}}};
    env.AddSnapshot(at70);
    env.AddSnapshot(at60);
  }
};

ModelParams SmallParams() {
  ModelParams p;
  p.k = 10;
  p.n = 400;
  p.theta = {{70.0, 1.0}, {60.0, 1.0}};
  return p;
}

TEST(RewardEnv, IncrementOverSnapshot) {
  TwoLevelEnv t;
  Rng rng(1);
  EXPECT_DOUBLE_EQ(t.env.Reward(70.0, "t01", rng), 5.0);
  EXPECT_DOUBLE_EQ(t.env.Reward(60.0, "t01", rng), 0.0);
  EXPECT_DOUBLE_EQ(t.env.Reward(70.0, "t06", rng), 0.0);
  EXPECT_DOUBLE_EQ(t.env.Reward(60.0, "t06", rng), 5.0);
  EXPECT_DOUBLE_EQ(t.env.Reward(0.0, "t06", rng), 5.0);
  EXPECT_EQ(t.env.evaluations(), 2u);
}

TEST(TrainModel, PlantedTwoLevels) {
  TwoLevelEnv t;
  const std::vector<double> levels = {60.0, 70.0};
  const TestListModel m = TrainModel(t.corpus, {}, levels, SmallParams(), t.env, 5);
  ASSERT_EQ(m.contexts, (std::vector<double>{70.0, 60.0}));
  const auto& l70 = m.coverage_lists.at(70.0);
  const auto& l60 = m.coverage_lists.at(60.0);
  EXPECT_FALSE(l70.empty());
  EXPECT_FALSE(l60.empty());
  std::set<std::string> seen;
  for (const auto& e : l70.entries) {
    EXPECT_LE(e.test_id, "t05");
    seen.insert(e.test_id);
  }
  for (const auto& e : l60.entries) {
    EXPECT_GE(e.test_id, "t06");
    EXPECT_FALSE(seen.count(e.test_id));
  }
  EXPECT_TRUE(m.vulnerability_list.empty());
}

TEST(TrainModel, NoCoverageTests) {
  TwoLevelEnv t;
  const std::vector<double> levels = {60.0, 70.0};
  const TestListModel m = TrainModel({}, {}, levels, SmallParams(), t.env, 5);
  for (const auto& [level, list] : m.coverage_lists) EXPECT_TRUE(list.empty());
}

TEST(TrainModel, VulnerabilityListKeepsEveryTest) {
  TwoLevelEnv t;
  const std::vector<double> levels = {60.0, 70.0};
  const std::vector<std::string> vuln = {"t01", "t02", "t03"};
  const TestListModel m = TrainModel({}, vuln, levels, SmallParams(), t.env, 5);
  ASSERT_EQ(m.vulnerability_list.size(), 3u);
  double sum = 0.0;
  for (const auto& e : m.vulnerability_list.entries) sum += e.prob;
  EXPECT_NEAR(sum, 1.0, 1e-9);
}

TEST(TrainModel, ListsDisjointOnSyntheticSuite) {
  const SyntheticSuite suite = SyntheticSuite::Generate(SuiteSpec{});
  const std::vector<double> levels = ContextLevels();
  const RewardEnv env = MakeRewardEnv(suite, levels);
  ModelParams p = BenchmarkModelParams();
  p.theta = {{55, 1.5}, {60, 1.5}, {65, 1.5}, {70, 1.5}};
  const std::vector<std::string> corpus = suite.CoverageTests();
  const TestListModel m = TrainModel(corpus, suite.VulnerabilityTests(), levels, p, env, 3);
  std::set<std::string> seen;
  for (const auto& [level, list] : m.coverage_lists) {
    double sum = 0.0;
    for (const auto& e : list.entries) {
      EXPECT_TRUE(seen.insert(e.test_id).second) << e.test_id;
      sum += e.prob;
    }
    if (!list.empty()) {
      EXPECT_NEAR(sum, 1.0, 1e-9);
    }
  }
  EXPECT_EQ(m, TrainModel(corpus, suite.VulnerabilityTests(), levels, p, env, 3));
}

TEST(FineTuneThresholds, TunesEveryLevelWithinTheProbeCap) {
  const SyntheticSuite suite = SyntheticSuite::Generate(SuiteSpec{});
  const std::vector<double> levels = ContextLevels();
  const RewardEnv env = MakeRewardEnv(suite, levels);
  const std::vector<std::string> corpus = suite.CoverageTests();
  const TuneResult r = FineTuneThresholds(corpus, levels, BenchmarkModelParams(), env, 9);
  ASSERT_EQ(r.theta.size(), 4u);
  for (const auto& [level, s] : r.searches) {
    EXPECT_LE(s.probes, 14u);
    EXPECT_EQ(r.theta.at(level), s.theta);
    if (s.accepted) {
      EXPECT_GE(s.last_count, 54u);
      EXPECT_LE(s.last_count, 66u);
    }
  }
  EXPECT_LT(r.residual.size(), corpus.size());
}

TestListModel PaperConfiguredModel() {
  TestListModel m;
  m.params.k = 100;
  m.params.gamma = 3;
  m.params.epsilon = 0.2;
  m.params.n = 10000;
  m.params.f = 0.1;
  m.params.theta = {{55, 1.90}, {60, 1.50}, {65, 0.90}, {70, 1.26}};
  m.contexts = {70, 65, 60, 55};
  m.vulnerability_list = {0.0, TestKind::kVulnerability, {{"v1", 0.25}, {"v2", 0.75}}};
  m.coverage_lists[70] = {70.0, TestKind::kCoverage, {{"a", 0.5}, {"b", 0.5}}};
  m.coverage_lists[65] = {65.0, TestKind::kCoverage, {{"c", 1.0}}};
  m.coverage_lists[60] = {60.0, TestKind::kCoverage, {{"d", 0.1}, {"e", 0.9}}};
  m.coverage_lists[55] = {55.0, TestKind::kCoverage, {{"f", 1.0}}};
  return m;
}

TEST(ModelIo, ParamsEchoRoundTrip) {
  const TestListModel m = PaperConfiguredModel();
  const TestListModel back = ParseModel(SerializeModel(m));
  EXPECT_EQ(back, m);
  EXPECT_EQ(back.params.theta.at(55), 1.90);
  EXPECT_EQ(back.params.theta.at(65), 0.90);
  EXPECT_EQ(SerializeModel(back), SerializeModel(m));
}

TEST(ModelIo, SaveLoadFile) {
  const TestListModel m = PaperConfiguredModel();
  const auto path = std::filesystem::temp_directory_path() / "ppreuse_trainer_test.model";
  SaveModel(m, path.string());
  EXPECT_EQ(LoadModel(path.string()), m);
  std::filesystem::remove(path);
}

TEST(ModelIo, ContextBlocksDescending) {
  const std::string text = SerializeModel(PaperConfiguredModel());
  const auto doc = nlohmann::ordered_json::parse(text);
  std::vector<std::string> keys;
  for (const auto& [k, v] : doc["coverage_lists"].items()) keys.push_back(k);
  EXPECT_EQ(keys, (std::vector<std::string>{"70", "65", "60", "55"}));
}

std::string Reseal(nlohmann::ordered_json doc) {
  doc.erase("checksum");
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(HashString(doc.dump())));
  doc["checksum"] = std::string("fnv1a64:") + buf;
  return doc.dump(2);
}

TEST(ModelIo, RejectsTamperedFiles) {
  const std::string text = SerializeModel(PaperConfiguredModel());
  auto doc = nlohmann::ordered_json::parse(text);

  auto bad_mass = doc;
  bad_mass["coverage_lists"]["70"][0]["prob"] = 0.3;  // list sums to 0.8
  EXPECT_THROW(ParseModel(Reseal(bad_mass)), ModelError);

  auto unsealed = doc;
  unsealed["params"]["k"] = 7;
  EXPECT_THROW(ParseModel(unsealed.dump()), ModelError);

  auto version = doc;
  version["schema_version"] = 2;
  EXPECT_THROW(ParseModel(Reseal(version)), ModelError);

  EXPECT_NO_THROW(ParseModel(Reseal(doc)));
  EXPECT_THROW(ParseModel("{"), ModelError);
}

TEST(Levels, FormatAndParse) {
  EXPECT_EQ(FormatLevel(55.0), "55");
  EXPECT_EQ(FormatLevel(62.5), "62.5");
  EXPECT_DOUBLE_EQ(ParseLevel("62.5"), 62.5);
}

}  // namespace
}  // namespace ppreuse
