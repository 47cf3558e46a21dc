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

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

#include "ppreuse/errors.hpp"
#include "ppreuse/simharness.hpp"

namespace ppreuse {

namespace {

// Native seeds on the testing processor come from one stream shared by all
// strategies of a replicate.
constexpr std::uint64_t kTestingNativeStream = 0;

std::vector<double> Coverages(const std::vector<TraceRow>& trace) {
  std::vector<double> out;
  out.reserve(trace.size());
  for (const auto& row : trace) out.push_back(row.tot_cov);
  return out;
}

std::vector<double> Replay(const SyntheticSuite& suite, const std::vector<std::string>& order,
                           std::uint64_t budget) {
  SyntheticFuzzer fuzzer(suite, SyntheticSuite::kTestingPut, kTestingNativeStream);
  CoveredSet covered(suite.universe_size());
  std::vector<double> out;
  out.reserve(budget);
  for (std::uint64_t i = 0; i < budget; ++i) {
    const std::string payload =
        i < order.size() ? fuzzer.Load(order[i]) : fuzzer.GenerateNative();
    MergeInto(covered, fuzzer.Execute(payload));
    out.push_back(TotalCoverage(covered));
  }
  return out;
}

// Descending by score, ties by id.
std::vector<std::string> RankBy(std::vector<std::pair<double, std::string>> scored) {
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first > b.first : a.second < b.second;
  });
  std::vector<std::string> out;
  for (auto& [score, id] : scored) out.push_back(std::move(id));
  return out;
}

}  // namespace

std::string_view StrategyName(Strategy strategy) {
  switch (strategy) {
    case Strategy::kSameSequence:
      return "same_sequence";
    case Strategy::kRandomSequence:
      return "random_sequence";
    case Strategy::kRankedSingle:
      return "ranked_single";
    case Strategy::kRankedAverage:
      return "ranked_average";
    case Strategy::kRefuzz:
      return "refuzz";
    case Strategy::kBaselineScratch:
      return "baseline_scratch";
  }
  return "?";
}

Strategy ParseStrategy(std::string_view name) {
  if (name == "random") return Strategy::kRandomSequence;
  for (Strategy s : AllStrategies()) {
    if (StrategyName(s) == name) return s;
  }
  throw StructuralError("unknown strategy '" + std::string(name) + "'");
}

std::vector<Strategy> AllStrategies() {
  return {Strategy::kSameSequence,  Strategy::kRandomSequence, Strategy::kRankedSingle,
          Strategy::kRankedAverage, Strategy::kRefuzz,         Strategy::kBaselineScratch};
}

ModelParams BenchmarkModelParams() {
  ModelParams p;
  p.k = 60;
  p.n = 200;
  return p;
}

RewardEnv MakeRewardEnv(const SyntheticSuite& suite, std::span<const double> levels) {
  const std::vector<std::string> trainers = suite.trainer_names();
  RewardEnv env(trainers, suite.universe_size(),
                [&suite](const std::string& processor, const std::string& id) {
                  return suite.Row(processor, id);
                });
  if (!levels.empty()) {
    const double top = *std::max_element(levels.begin(), levels.end());
    std::map<std::string, std::vector<CoveredSet>> traces;
    for (std::size_t t = 0; t < trainers.size(); ++t) {
      traces.emplace(trainers[t], suite.BaselineTrace(t, top));
    }
    env.AddSnapshots(SnapshotContexts(traces, levels));
  }
  return env;
}

PipelineResult TrainOnSuite(const SyntheticSuite& suite, const PipelineOptions& options,
                            std::uint64_t seed) {
  PipelineResult out;
  const std::vector<std::string> trainers = suite.trainer_names();
  for (std::size_t t = 0; t < trainers.size(); ++t) {
    MinimizeResult r = MinimizeExact(suite.TrainerMatrix(t), options.minimize_budget);
    out.minimized.insert(out.minimized.end(), r.selected.begin(), r.selected.end());
    out.per_trainer.emplace(trainers[t], std::move(r));
  }
  const RewardEnv env = MakeRewardEnv(suite, options.levels);
  ModelParams params = options.params;
  if (options.tune && options.algorithm == CbAlgorithm::kAdaptive) {
    out.tuning = FineTuneThresholds(out.minimized, options.levels, params, env, seed);
    params.theta = out.tuning->theta;
  }
  out.model = TrainModel(out.minimized, suite.VulnerabilityTests(), options.levels, params,
                         env, seed, options.algorithm);
  return out;
}

std::vector<std::string> StrategyOrder(const SyntheticSuite& suite, Strategy strategy,
                                       Rng& rng) {
  std::vector<std::string> all;
  for (const auto& t : suite.tests()) all.push_back(t.id);
  switch (strategy) {
    case Strategy::kSameSequence: {
      // Each trainer's corpus in its own order, trainer by trainer.
      std::vector<std::string> out;
      for (std::size_t p = 0; p + 1 < suite.processors().size(); ++p) {
        for (const auto& t : suite.tests()) {
          if (t.origin == p) out.push_back(t.id);
        }
      }
      return out;
    }
    case Strategy::kRandomSequence:
      std::shuffle(all.begin(), all.end(), rng);
      return all;
    case Strategy::kRankedSingle: {
      std::vector<std::pair<double, std::string>> scored;
      for (const auto& t : suite.tests()) {
        scored.emplace_back(PercentOf(suite.Row(t.origin, t.id).count(), suite.universe_size()),
                            t.id);
      }
      return RankBy(std::move(scored));
    }
    case Strategy::kRankedAverage: {
      const std::size_t trainers = suite.processors().size() - 1;
      std::vector<std::pair<double, std::string>> scored;
      for (const auto& t : suite.tests()) {
        double sum = 0.0;
        for (std::size_t p = 0; p < trainers; ++p) {
          sum += PercentOf(suite.Row(p, t.id).count(), suite.universe_size());
        }
        scored.emplace_back(sum / static_cast<double>(trainers), t.id);
      }
      return RankBy(std::move(scored));
    }
    case Strategy::kRefuzz:
    case Strategy::kBaselineScratch:
      break;
  }
  return {};
}

CampaignReport RunModelOnSuite(const SyntheticSuite& suite, const TestListModel& model,
                               std::uint64_t budget, std::uint64_t gamma,
                               std::uint64_t seed) {
  SyntheticFuzzer fuzzer(suite, SyntheticSuite::kTestingPut, kTestingNativeStream);
  CampaignParams params;
  params.gamma = gamma;
  params.m = budget;
  return RunCampaign(model, fuzzer, params, seed);
}

StrategyRun RunStrategy(const SyntheticSuite& suite, Strategy strategy, std::uint64_t budget,
                        std::uint64_t seed, const PipelineOptions& options) {
  if (budget == 0) throw StructuralError("budget must be at least 1");
  StrategyRun run;
  run.strategy = strategy;
  switch (strategy) {
    case Strategy::kRefuzz: {
      PipelineResult p = TrainOnSuite(suite, options, DeriveSeed({seed, 1}));
      const CampaignReport report =
          RunModelOnSuite(suite, p.model, budget, options.gamma, DeriveSeed({seed, 2}));
      run.tot_cov = Coverages(report.trace);
      run.model = std::move(p.model);
      break;
    }
    case Strategy::kBaselineScratch: {
      SyntheticFuzzer fuzzer(suite, SyntheticSuite::kTestingPut, kTestingNativeStream);
      CampaignParams params;
      params.m = budget;
      run.tot_cov = Coverages(RunNative(fuzzer, params).trace);
      break;
    }
    default: {
      Rng rng(seed);
      run.tot_cov = Replay(suite, StrategyOrder(suite, strategy, rng), budget);
      break;
    }
  }
  return run;
}

std::pair<std::uint64_t, bool> TestsToReach(const std::vector<double>& trace,
                                            double threshold) {
  for (std::size_t i = 0; i < trace.size(); ++i) {
    if (trace[i] >= threshold) return {i + 1, false};
  }
  return {trace.size(), true};
}

Speedup CoverageSpeedup(const std::vector<double>& ref, const std::vector<double>& base,
                        double threshold) {
  Speedup s;
  std::tie(s.ref_tests, s.ref_censored) = TestsToReach(ref, threshold);
  std::tie(s.base_tests, s.base_censored) = TestsToReach(base, threshold);
  s.ratio = s.ref_tests == 0 ? 0.0
                             : static_cast<double>(s.base_tests) /
                                   static_cast<double>(s.ref_tests);
  return s;
}

std::vector<CompareRun> CompareStrategies(const CompareOptions& options) {
  if (options.strategies.empty()) throw StructuralError("no strategies to compare");
  if (options.replicates == 0) throw StructuralError("replicates must be positive");
  const std::size_t ns = options.strategies.size();
  std::vector<CompareRun> runs(ns * options.replicates);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;

  auto worker = [&] {
    for (;;) {
      const std::size_t r = next.fetch_add(1);
      if (r >= options.replicates) return;
      try {
        SuiteSpec spec = options.spec;
        spec.seed = DeriveSeed({options.master_seed, r});
        const SyntheticSuite suite = SyntheticSuite::Generate(spec);
        for (std::size_t s = 0; s < ns; ++s) {
          const Strategy strategy = options.strategies[s];
          CompareRun& out = runs[s * options.replicates + r];
          out.strategy = strategy;
          out.replicate = r;
          out.suite_seed = spec.seed;
          out.seed = DeriveSeed({options.master_seed, HashString(StrategyName(strategy)), r});
          out.tot_cov =
              RunStrategy(suite, strategy, options.budget, out.seed, options.pipeline).tot_cov;
        }
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mu);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };

  const std::size_t jobs = std::max<std::size_t>(1, std::min(options.jobs, options.replicates));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  return runs;
}

}  // namespace ppreuse
