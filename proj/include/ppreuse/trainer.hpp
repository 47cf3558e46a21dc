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

// Full training pipeline on top of the bandit core: coverage-context
// snapshots, the per-context reward environment, threshold search, and the
// trained test-list model with its JSON file format.

#ifndef PPREUSE_TRAINER_HPP_
#define PPREUSE_TRAINER_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ppreuse/bandit.hpp"
#include "ppreuse/coverage.hpp"
#include "ppreuse/rng.hpp"

namespace ppreuse {

// Coverage levels are percentages; maps keyed by level iterate highest first.
using LevelMap = std::map<double, double, std::greater<double>>;

struct ContextSnapshot {
  double level = 0.0;
  // Processors whose baseline run never reached `level` are absent.
  std::map<std::string, CoveredSet> per_processor;
};

// First state at or above each level, per processor. Throws StructuralError
// on an empty trace.
std::vector<ContextSnapshot> SnapshotContexts(
    const std::map<std::string, std::vector<CoveredSet>>& traces,
    std::span<const double> levels);

// Levels start, start+step, ... up to and including stop.
std::vector<double> ContextLevels(double start = 55.0, double step = 5.0,
                                  double stop = 70.0);

// Rewards for the bandit: the incremental coverage of a test's row on a
// processor drawn uniformly (per query) among those that have a snapshot for
// the requested level. Rows come from a caller-supplied source and are
// evaluated once per (processor, test).
class RewardEnv {
 public:
  using RowSource =
      std::function<BitVector(const std::string& processor, const std::string& test_id)>;

  RewardEnv(std::vector<std::string> processors, std::size_t universe_size,
            RowSource source);

  void AddSnapshot(ContextSnapshot snapshot);
  void AddSnapshots(std::vector<ContextSnapshot> snapshots);

  const std::vector<std::string>& processors() const { return processors_; }
  bool HasLevel(double level) const;
  const ContextSnapshot* Snapshot(double level) const;

  // Level 0 is always available and means "nothing covered yet".
  double Reward(double level, const std::string& test_id, Rng& rng) const;
  RewardFn ForLevel(double level) const;

  const BitVector& Row(const std::string& processor, const std::string& test_id) const;
  // Number of distinct (processor, test) rows evaluated so far.
  std::size_t evaluations() const { return cache_.size(); }

 private:
  std::vector<std::string> processors_;
  std::size_t universe_size_;
  RowSource source_;
  std::map<double, ContextSnapshot> snapshots_;
  mutable std::unordered_map<std::string, BitVector> cache_;
};

enum class CbAlgorithm { kAdaptive, kOriginal };
std::string_view CbAlgorithmName(CbAlgorithm algorithm);
CbAlgorithm ParseCbAlgorithm(std::string_view name);

struct ModelParams {
  std::size_t k = 100;
  std::uint64_t gamma = 3;
  double epsilon = 0.2;
  std::uint64_t n = 10000;
  double f = 0.1;
  LevelMap theta;

  CbParams ForLevel(double level) const;
  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

struct TestListModel {
  TrainedList vulnerability_list;
  std::map<double, TrainedList, std::greater<double>> coverage_lists;
  std::vector<double> contexts;  // descending
  ModelParams params;

  friend bool operator==(const TestListModel&, const TestListModel&) = default;
};

struct ThresholdSearch {
  double theta = 0.0;
  std::size_t probes = 0;
  bool accepted = false;
  std::size_t last_count = 0;
};

// Binary search on theta in [0, 100] with midpoints rounded to 0.01 and at
// most `max_probes` probes. `probe(theta)` returns the list size obtained
// with that threshold. Accepts when the size lies in [(1-f)k, (1+f)k];
// otherwise returns the last midpoint with accepted = false.
ThresholdSearch SearchThreshold(const std::function<std::size_t(double)>& probe,
                                std::size_t k, double f, std::size_t max_probes = 14);

struct TuneResult {
  LevelMap theta;
  std::map<double, ThresholdSearch, std::greater<double>> searches;
  std::vector<std::string> residual;
  std::vector<std::string> warnings;
};

// Per-level threshold tuning, highest level first; after each level the
// tests chosen with the accepted threshold leave the corpus.
TuneResult FineTuneThresholds(std::span<const std::string> corpus,
                              std::span<const double> levels, const ModelParams& params,
                              const RewardEnv& env, std::uint64_t seed);

// Training-log sink: one call per bandit step.
using TrainLogSink = std::function<void(const StepEvent&)>;

// Coverage lists highest level first, removing each level's list from the
// corpus before the next; the vulnerability list comes from the
// non-eliminating loop over all vulnerability tests at level 0.
TestListModel TrainModel(std::span<const std::string> coverage_corpus,
                         std::span<const std::string> vulnerability_tests,
                         std::span<const double> levels, const ModelParams& params,
                         const RewardEnv& env, std::uint64_t seed,
                         CbAlgorithm algorithm = CbAlgorithm::kAdaptive,
                         const TrainLogSink& log = {});

// Seed used for the bandit run at one level; shared by tuning and training
// so the final run reproduces the accepted probe.
std::uint64_t LevelSeed(std::uint64_t seed, double level);

inline constexpr int kModelSchemaVersion = 1;

// "55", "62.5"
std::string FormatLevel(double level);
double ParseLevel(std::string_view text);

std::string SerializeModel(const TestListModel& model);
// Throws ModelError on schema mismatch, checksum failure or invalid
// probability mass (each list must sum to 1 within 1e-6).
TestListModel ParseModel(std::string_view text);

void SaveModel(const TestListModel& model, const std::string& path);
TestListModel LoadModel(const std::string& path);

}  // namespace ppreuse

#endif  // PPREUSE_TRAINER_HPP_
