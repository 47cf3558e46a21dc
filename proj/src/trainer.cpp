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

#include <algorithm>
#include <bit>
#include <cmath>
#include <set>

#include "ppreuse/errors.hpp"

namespace ppreuse {

std::vector<ContextSnapshot> SnapshotContexts(
    const std::map<std::string, std::vector<CoveredSet>>& traces,
    std::span<const double> levels) {
  std::vector<ContextSnapshot> out;
  for (double level : levels) out.push_back(ContextSnapshot{level, {}});
  for (const auto& [processor, trace] : traces) {
    if (trace.empty()) {
      throw StructuralError("empty baseline trace for processor '" + processor + "'");
    }
    for (auto& snap : out) {
      for (const auto& state : trace) {
        if (TotalCoverage(state) >= snap.level) {
          snap.per_processor.emplace(processor, state);
          break;
        }
      }
    }
  }
  return out;
}

std::vector<double> ContextLevels(double start, double step, double stop) {
  if (!(step > 0.0)) throw StructuralError("context step must be positive");
  std::vector<double> out;
  for (int i = 0;; ++i) {
    const double level = start + step * i;
    if (level > stop + 1e-9) break;
    out.push_back(level);
  }
  return out;
}

RewardEnv::RewardEnv(std::vector<std::string> processors, std::size_t universe_size,
                     RowSource source)
    : processors_(std::move(processors)),
      universe_size_(universe_size),
      source_(std::move(source)) {
  if (processors_.empty()) throw StructuralError("reward environment needs a processor");
}

void RewardEnv::AddSnapshot(ContextSnapshot snapshot) {
  for (const auto& [p, covered] : snapshot.per_processor) {
    if (covered.universe_size() != universe_size_) {
      throw StructuralError("snapshot for '" + p + "' has the wrong universe size");
    }
  }
  const double level = snapshot.level;
  snapshots_.insert_or_assign(level, std::move(snapshot));
}

void RewardEnv::AddSnapshots(std::vector<ContextSnapshot> snapshots) {
  for (auto& s : snapshots) AddSnapshot(std::move(s));
}

bool RewardEnv::HasLevel(double level) const {
  if (level == 0.0) return true;
  auto it = snapshots_.find(level);
  return it != snapshots_.end() && !it->second.per_processor.empty();
}

const ContextSnapshot* RewardEnv::Snapshot(double level) const {
  auto it = snapshots_.find(level);
  return it == snapshots_.end() ? nullptr : &it->second;
}

const BitVector& RewardEnv::Row(const std::string& processor,
                                const std::string& test_id) const {
  std::string key = processor;
  key += '\0';
  key += test_id;
  auto it = cache_.find(key);
  if (it == cache_.end()) {
    BitVector row = source_(processor, test_id);
    if (row.size() != universe_size_) {
      throw StructuralError("row for '" + test_id + "' on '" + processor +
                            "' has the wrong universe size");
    }
    it = cache_.emplace(std::move(key), std::move(row)).first;
  }
  return it->second;
}

double RewardEnv::Reward(double level, const std::string& test_id, Rng& rng) const {
  if (level == 0.0) {
    const std::string& p = processors_[UniformIndex(rng, processors_.size())];
    return PercentOf(Row(p, test_id).count(), universe_size_);
  }
  const ContextSnapshot* snap = Snapshot(level);
  if (snap == nullptr || snap->per_processor.empty()) return 0.0;
  auto it = snap->per_processor.begin();
  std::advance(it, static_cast<std::ptrdiff_t>(UniformIndex(rng, snap->per_processor.size())));
  return IncrementalCoverage(Row(it->first, test_id), it->second);
}

RewardFn RewardEnv::ForLevel(double level) const {
  return [this, level](const std::string& id, Rng& rng) { return Reward(level, id, rng); };
}

std::string_view CbAlgorithmName(CbAlgorithm algorithm) {
  return algorithm == CbAlgorithm::kAdaptive ? "adaptive" : "original";
}

CbAlgorithm ParseCbAlgorithm(std::string_view name) {
  if (name == "adaptive") return CbAlgorithm::kAdaptive;
  if (name == "original") return CbAlgorithm::kOriginal;
  throw StructuralError("unknown bandit algorithm '" + std::string(name) + "'");
}

CbParams ModelParams::ForLevel(double level) const {
  CbParams p;
  p.k = k;
  p.gamma = gamma;
  p.n = n;
  p.epsilon = epsilon;
  auto it = theta.find(level);
  p.theta = it == theta.end() ? 0.0 : it->second;
  return p;
}

std::uint64_t LevelSeed(std::uint64_t seed, double level) {
  return DeriveSeed({seed, std::bit_cast<std::uint64_t>(level)});
}

ThresholdSearch SearchThreshold(const std::function<std::size_t(double)>& probe,
                                std::size_t k, double f, std::size_t max_probes) {
  const double upper = (1.0 + f) * static_cast<double>(k);
  const double lower = (1.0 - f) * static_cast<double>(k);
  double lo = 0.0;
  double hi = 100.0;
  ThresholdSearch out;
  for (std::size_t i = 0; i < max_probes; ++i) {
    const double mid = std::round((lo + hi) / 2.0 * 100.0) / 100.0;
    const std::size_t count = probe(mid);
    out.theta = mid;
    out.last_count = count;
    out.probes = i + 1;
    const double c = static_cast<double>(count);
    if (c > upper) {
      lo = mid;
    } else if (c < lower) {
      hi = mid;
    } else {
      out.accepted = true;
      break;
    }
  }
  return out;
}

namespace {

std::vector<std::string> Without(std::span<const std::string> corpus,
                                 const TrainedList& list) {
  std::set<std::string_view> chosen;
  for (const auto& e : list.entries) chosen.insert(e.test_id);
  std::vector<std::string> out;
  for (const auto& id : corpus) {
    if (!chosen.count(id)) out.push_back(id);
  }
  return out;
}

std::vector<double> Descending(std::span<const double> levels) {
  std::vector<double> out(levels.begin(), levels.end());
  std::sort(out.begin(), out.end(), std::greater<double>());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

TuneResult FineTuneThresholds(std::span<const std::string> corpus_in,
                              std::span<const double> levels, const ModelParams& params,
                              const RewardEnv& env, std::uint64_t seed) {
  if (levels.empty()) throw StructuralError("threshold tuning needs at least one level");
  if (!(params.f > 0.0 && params.f < 1.0)) {
    throw StructuralError("tolerance factor f must lie in (0, 1)");
  }
  TuneResult out;
  std::vector<std::string> corpus(corpus_in.begin(), corpus_in.end());
  for (double level : Descending(levels)) {
    const RewardFn reward = env.ForLevel(level);
    auto run = [&](double theta) {
      CbParams p = params.ForLevel(level);
      p.theta = theta;
      Rng rng(LevelSeed(seed, level));
      return AdaptiveCbTrain(corpus, level, reward, p, rng);
    };
    const ThresholdSearch search = SearchThreshold(
        [&](double theta) { return run(theta).list.size(); }, params.k, params.f);
    if (!search.accepted) {
      out.warnings.push_back("level " + FormatLevel(level) + ": no threshold gave " +
                             std::to_string(params.k) + " +/- " +
                             FormatLevel(params.f * 100.0) + "% tests; using " +
                             FormatLevel(search.theta) + " (" +
                             std::to_string(search.last_count) + " tests)");
    }
    out.theta.emplace(level, search.theta);
    out.searches.emplace(level, search);
    corpus = Without(corpus, run(search.theta).list);
  }
  out.residual = std::move(corpus);
  return out;
}

TestListModel TrainModel(std::span<const std::string> coverage_corpus,
                         std::span<const std::string> vulnerability_tests,
                         std::span<const double> levels, const ModelParams& params,
                         const RewardEnv& env, std::uint64_t seed, CbAlgorithm algorithm,
                         const TrainLogSink& log) {
  TestListModel model;
  model.params = params;
  model.contexts = Descending(levels);

  std::vector<std::string> corpus(coverage_corpus.begin(), coverage_corpus.end());
  for (double level : model.contexts) {
    const CbParams p = params.ForLevel(level);
    Rng rng(LevelSeed(seed, level));
    CbTrainResult r = algorithm == CbAlgorithm::kAdaptive
                          ? AdaptiveCbTrain(corpus, level, env.ForLevel(level), p, rng, log)
                          : OriginalCbTrain(corpus, level, env.ForLevel(level), p, rng, log);
    corpus = Without(corpus, r.list);
    model.coverage_lists.emplace(level, std::move(r.list));
  }

  model.vulnerability_list.kind = TestKind::kVulnerability;
  if (!vulnerability_tests.empty()) {
    CbParams p = params.ForLevel(0.0);
    p.k = vulnerability_tests.size();
    Rng rng(LevelSeed(seed, 0.0));
    CbTrainResult r =
        OriginalCbTrain(vulnerability_tests, 0.0, env.ForLevel(0.0), p, rng, log);
    model.vulnerability_list = std::move(r.list);
    model.vulnerability_list.kind = TestKind::kVulnerability;
  }
  return model;
}

}  // namespace ppreuse
