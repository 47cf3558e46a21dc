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

// Synthetic processors and test corpora, plus the reuse strategies that are
// compared on them.
//
// Every coverage point has a tier (dead, easy, medium, hard, unique). Unique
// points are dead on the trainer processors and live on the testing one.
// Each trainer owns a set of base tests; every other test of that trainer is
// a random subset of one base's row, so a trainer corpus never needs more
// than its bases to reach full coverage. A base's row on another processor
// is either a jittered copy (probability = similarity) or unrelated.
// Mutants move hits to nearby points of the same module, within a radius
// that shrinks with the mutant index.

#ifndef PPREUSE_SIMHARNESS_HPP_
#define PPREUSE_SIMHARNESS_HPP_

#include <array>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ppreuse/bitvector.hpp"
#include "ppreuse/coverage.hpp"
#include "ppreuse/minimizer.hpp"
#include "ppreuse/runtime.hpp"
#include "ppreuse/trainer.hpp"

namespace ppreuse {

enum class Tier : std::uint8_t { kDead = 0, kEasy, kMedium, kHard, kUnique };
inline constexpr std::size_t kNumTiers = 5;
std::string_view TierName(Tier tier);

struct TierParams {
  double fraction = 0.0;
  // Per-point hit probability of a native seed.
  double native_rate = 0.0;
  // Per-point hit probability of a base test, before family and intensity.
  double base_rate = 0.0;
  // Probability that a mutated hit landing on this tier is kept.
  double accept = 0.0;
};

struct SuiteSpec {
  std::uint64_t seed = 1;
  std::size_t universe = 2000;
  std::size_t modules = 20;
  std::size_t trainers = 3;
  std::size_t tests_per_trainer = 700;
  std::size_t bases_per_trainer = 200;
  std::size_t vuln_tests = 2;
  double similarity = 0.8;
  std::array<TierParams, kNumTiers> tiers = {{
      {0.15, 0.0, 0.0, 0.0},
      {0.30, 0.10, 0.10, 1.0},
      {0.25, 0.03, 0.005, 0.5},
      {0.22, 0.0005, 0.001, 0.5},
      {0.08, 0.0005, 0.0, 0.5},
  }};
  // Share of broad and corner bases; the rest are mixed.
  double broad_share = 0.5;
  double corner_share = 0.3;
  // Hard-tier hit probability inside a base's focus modules.
  double focus_rate = 0.1;
  double intensity_sigma = 0.3;
  // Derived tests keep each base hit with probability drawn from
  // [subset_keep, 1).
  double subset_keep = 0.2;
  double mutation_rate = 0.5;
  double radius = 8.0;
  double decay = 0.75;
  double bug_hit_rate = 0.5;
  // Probability that a mutant also picks up a native seed's hits.
  double mutant_native = 0.5;
  std::size_t baseline_cap = 20000;

  // Named presets: "benchmark" (default) and "distill".
  static SuiteSpec Preset(std::string_view name);
};

// Throws StructuralError on unknown keys or inconsistent sizes.
SuiteSpec ParseSuiteSpec(std::string_view json);
std::string FormatSuiteSpec(const SuiteSpec& spec);

enum class BaseFamily : std::uint8_t { kBroad, kCorner, kMixed };
std::string_view BaseFamilyName(BaseFamily family);

struct BaseInfo {
  std::string id;
  std::size_t trainer = 0;
  BaseFamily family = BaseFamily::kBroad;
  double intensity = 1.0;
  std::vector<std::size_t> focus_modules;
};

struct SuiteTest {
  std::string id;
  std::size_t origin = 0;  // trainer index
  std::size_t base = 0;    // index into bases()
  TestKind kind = TestKind::kCoverage;
  double keep = 1.0;       // 1 for bases themselves
  std::optional<std::size_t> bug_point;
};

class SyntheticSuite {
 public:
  static SyntheticSuite Generate(const SuiteSpec& spec);

  const SuiteSpec& spec() const { return spec_; }
  std::size_t universe_size() const { return spec_.universe; }
  const Universe& universe() const { return universe_; }
  Tier tier(std::size_t point) const { return tiers_[point]; }
  std::size_t module_of(std::size_t point) const { return module_of_[point]; }

  // Processor names: trainers pp0..ppN-1, then the testing processor "put".
  const std::vector<std::string>& processors() const { return processors_; }
  std::vector<std::string> trainer_names() const;
  static constexpr std::string_view kTestingPut = "put";
  std::size_t ProcessorIndex(std::string_view name) const;
  bool IsLive(std::size_t processor, std::size_t point) const;

  const std::vector<BaseInfo>& bases() const { return bases_; }
  // Whole corpus in generation order (shuffled).
  const std::vector<SuiteTest>& tests() const { return tests_; }
  const SuiteTest& test(std::string_view id) const;
  std::vector<std::string> CoverageTests(std::optional<std::size_t> trainer = {}) const;
  std::vector<std::string> VulnerabilityTests() const;

  // Row of the test itself (index 0) or of its index-th mutant.
  BitVector Row(std::size_t processor, std::string_view test_id,
                std::uint64_t mutant = 0) const;
  BitVector Row(std::string_view processor, std::string_view test_id,
                std::uint64_t mutant = 0) const;
  BitVector NativeRow(std::size_t processor, std::uint64_t stream,
                      std::uint64_t n) const;

  // A trainer's own coverage tests on its own processor.
  CoverageMatrix TrainerMatrix(std::size_t trainer) const;
  // Native run on a processor until `stop_level` or the cap.
  std::vector<CoveredSet> BaselineTrace(std::size_t processor, double stop_level) const;

  // Ground truth: tiers, bases, derivation, bug points.
  std::string ManifestJson() const;

 private:
  BitVector LatentRow(const BaseInfo& base, std::uint64_t tag) const;
  BitVector NativeLike(std::uint64_t seed) const;
  void Jitter(BitVector& row, std::uint64_t seed) const;
  void MaskDead(std::size_t processor, BitVector& row) const;

  SuiteSpec spec_;
  Universe universe_;
  std::vector<Tier> tiers_;
  std::vector<std::size_t> module_of_;
  std::vector<std::size_t> module_start_;
  std::vector<std::size_t> module_size_;
  // Points grouped by (module, tier).
  std::vector<std::vector<std::size_t>> groups_;
  std::vector<std::string> processors_;
  std::vector<BaseInfo> bases_;
  std::vector<SuiteTest> tests_;
  std::unordered_map<std::string, std::size_t> test_index_;
  // base_rows_[base][processor]
  std::vector<std::vector<BitVector>> base_rows_;
};

// FuzzerPort over one processor of a suite. Payloads are "pp <id>",
// "mut <id> <i>" and "native <n>".
class SyntheticFuzzer : public FuzzerPort {
 public:
  SyntheticFuzzer(const SyntheticSuite& suite, std::string_view processor,
                  std::uint64_t native_stream);

  std::size_t universe_size() const override { return suite_.universe_size(); }
  std::string Load(const std::string& test_id) override;
  std::string Mutate(const std::string& test_id, std::uint64_t index) override;
  std::string GenerateNative() override;
  BitVector Execute(const std::string& payload) override;

  std::uint64_t executions() const { return executions_; }

 private:
  const SyntheticSuite& suite_;
  std::size_t processor_;
  std::uint64_t native_stream_;
  std::uint64_t next_native_ = 0;
  std::uint64_t executions_ = 0;
};

// ---------------------------------------------------------------------------
// Strategies

enum class Strategy {
  kSameSequence,
  kRandomSequence,
  kRankedSingle,
  kRankedAverage,
  kRefuzz,
  kBaselineScratch,
};
std::string_view StrategyName(Strategy strategy);
// Accepts "random" for random_sequence.
Strategy ParseStrategy(std::string_view name);
std::vector<Strategy> AllStrategies();

// Training parameters scaled to the benchmark corpus (a few hundred
// minimized tests): with n close to 3.3 k the tuned lists land near k.
ModelParams BenchmarkModelParams();

struct PipelineOptions {
  ModelParams params = BenchmarkModelParams();
  std::vector<double> levels = ContextLevels();
  bool tune = true;
  CbAlgorithm algorithm = CbAlgorithm::kAdaptive;
  std::uint64_t gamma = 3;  // campaign drop window
  std::chrono::milliseconds minimize_budget{60000};
};

struct PipelineResult {
  TestListModel model;
  std::vector<std::string> minimized;
  std::map<std::string, MinimizeResult> per_trainer;
  std::optional<TuneResult> tuning;
};

// Minimize each trainer corpus, tune thresholds, train.
PipelineResult TrainOnSuite(const SyntheticSuite& suite, const PipelineOptions& options,
                            std::uint64_t seed);

// Environment backed by the suite's trainer processors and their baselines.
RewardEnv MakeRewardEnv(const SyntheticSuite& suite, std::span<const double> levels);

// Replay order used by the sequence strategies.
std::vector<std::string> StrategyOrder(const SyntheticSuite& suite, Strategy strategy,
                                       Rng& rng);

struct StrategyRun {
  Strategy strategy = Strategy::kBaselineScratch;
  std::vector<double> tot_cov;  // one entry per iteration
  std::optional<TestListModel> model;
};

// Runs one strategy on the testing processor for `budget` iterations.
StrategyRun RunStrategy(const SyntheticSuite& suite, Strategy strategy,
                        std::uint64_t budget, std::uint64_t seed,
                        const PipelineOptions& options = {});

// Campaign on the testing processor with a given model.
CampaignReport RunModelOnSuite(const SyntheticSuite& suite, const TestListModel& model,
                               std::uint64_t budget, std::uint64_t gamma,
                               std::uint64_t seed);

struct Speedup {
  double ratio = 0.0;
  std::uint64_t ref_tests = 0;
  std::uint64_t base_tests = 0;
  bool ref_censored = false;
  bool base_censored = false;
  bool censored() const { return ref_censored || base_censored; }
};

// Tests needed to reach `threshold`; a trace that never gets there counts
// its full length and is flagged censored.
std::pair<std::uint64_t, bool> TestsToReach(const std::vector<double>& trace,
                                            double threshold);
// tests(base) / tests(ref).
Speedup CoverageSpeedup(const std::vector<double>& ref, const std::vector<double>& base,
                        double threshold);

struct CompareOptions {
  SuiteSpec spec;
  std::vector<Strategy> strategies = AllStrategies();
  std::size_t replicates = 20;
  std::uint64_t budget = 4000;
  std::uint64_t master_seed = 1;
  std::size_t jobs = 1;
  PipelineOptions pipeline;
};

struct CompareRun {
  Strategy strategy = Strategy::kBaselineScratch;
  std::size_t replicate = 0;
  std::uint64_t suite_seed = 0;
  std::uint64_t seed = 0;
  std::vector<double> tot_cov;
};

// Replicate r uses suite seed Derive(master, r); each strategy run uses
// Derive(master, strategy, r). Results are ordered by (strategy, replicate)
// whatever the number of jobs.
std::vector<CompareRun> CompareStrategies(const CompareOptions& options);

}  // namespace ppreuse

#endif  // PPREUSE_SIMHARNESS_HPP_
