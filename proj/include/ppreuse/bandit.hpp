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

// Epsilon-greedy contextual bandit over test ids, in two flavours:
//
//  * AdaptiveCbTrain keeps a working set of k arms. After an arm has been
//    pulled gamma times it is either eliminated (mean reward exactly zero) or,
//    if its selection weight reaches theta, promoted into the output list.
//    Vacated slots are refilled from the corpus without replacement.
//  * OriginalCbTrain runs the same loop over a fixed set of k arms and emits
//    all of them.
//
// Rewards are coverage increments in percent. Selection weights are in
// percent too: weight(a) = 100 * r_hat(a) / sum r_hat over the working set,
// so a uniform policy over 100 arms sits at 1.00.

#ifndef PPREUSE_BANDIT_HPP_
#define PPREUSE_BANDIT_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ppreuse/coverage.hpp"
#include "ppreuse/rng.hpp"

namespace ppreuse {

struct ArmStats {
  std::string test_id;
  double r_hat = 0.0;
  std::uint64_t pulls = 0;
};

struct PolicyState {
  double context = 0.0;
  std::vector<ArmStats> temp_arms;
  // Selection weight in percent, aligned with temp_arms.
  std::vector<double> temp_policy;
  // Promoted arms with their weight at promotion time.
  std::vector<std::pair<std::string, double>> promoted;
  double epsilon = 0.2;

  std::size_t IndexOf(std::string_view test_id) const;
};

struct ListEntry {
  std::string test_id;
  double prob = 0.0;

  friend bool operator==(const ListEntry&, const ListEntry&) = default;
};

struct TrainedList {
  double context = 0.0;
  TestKind kind = TestKind::kCoverage;
  std::vector<ListEntry> entries;

  bool empty() const { return entries.empty(); }
  std::size_t size() const { return entries.size(); }
  friend bool operator==(const TrainedList&, const TrainedList&) = default;
};

// Exploration with probability epsilon (uniform over temp_arms); otherwise
// argmax r_hat, ties to fewer pulls, then smaller id. Returns an index into
// temp_arms. StructuralError if there are no arms.
std::size_t SelectArm(const PolicyState& state, Rng& rng);

// Running-mean update of one arm followed by recomputing every weight.
// An all-zero r_hat vector yields uniform weights 100/k.
void UpdatePolicy(PolicyState& state, std::string_view arm, double reward);
void UpdatePolicyAt(PolicyState& state, std::size_t index, double reward);

// Recomputes temp_policy from the current r_hat values.
void RecomputeWeights(PolicyState& state);

// Proportional rescale to sum 1. StructuralError if every weight is zero or
// any is negative.
std::vector<ListEntry> NormalizePolicy(std::vector<ListEntry> entries);

// Reward oracle: coverage increment (percent) of one execution of a test.
using RewardFn = std::function<double(const std::string& test_id, Rng& rng)>;

enum class StepAction { kKeep, kDrop, kPromote };
std::string_view StepActionName(StepAction action);

struct StepEvent {
  std::uint64_t step = 0;  // 0 for initialization pulls
  double context = 0.0;
  std::string arm;
  double reward = 0.0;
  StepAction action = StepAction::kKeep;
};
using StepSink = std::function<void(const StepEvent&)>;

struct CbParams {
  std::size_t k = 100;
  std::uint64_t gamma = 3;
  double theta = 1.0;  // percent
  std::uint64_t n = 10000;
  double epsilon = 0.2;
};

struct CbTrainResult {
  TrainedList list;
  // Corpus minus every test that entered the working set, corpus order.
  std::vector<std::string> residual;
  // Final per-arm statistics of everything that was ever in the working set,
  // in the order the arms entered it.
  std::vector<ArmStats> history;
  std::uint64_t steps_run = 0;
};

CbTrainResult AdaptiveCbTrain(std::span<const std::string> corpus, double context,
                              const RewardFn& reward, const CbParams& params, Rng& rng,
                              const StepSink& sink = {});

// No elimination or promotion. The output holds every arm of the working
// set with probability (1-eps) * r_hat/sum(r_hat) + eps/k (uniform when all
// r_hat are zero), so zero-reward arms keep the exploration share.
CbTrainResult OriginalCbTrain(std::span<const std::string> corpus, double context,
                              const RewardFn& reward, const CbParams& params, Rng& rng,
                              const StepSink& sink = {});

}  // namespace ppreuse

#endif  // PPREUSE_BANDIT_HPP_
