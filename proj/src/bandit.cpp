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

#include "ppreuse/bandit.hpp"

#include <algorithm>
#include <cmath>

#include "ppreuse/errors.hpp"

namespace ppreuse {

std::size_t PolicyState::IndexOf(std::string_view test_id) const {
  for (std::size_t i = 0; i < temp_arms.size(); ++i) {
    if (temp_arms[i].test_id == test_id) return i;
  }
  throw StructuralError("unknown arm '" + std::string(test_id) + "'");
}

std::string_view StepActionName(StepAction action) {
  switch (action) {
    case StepAction::kKeep:
      return "keep";
    case StepAction::kDrop:
      return "drop";
    case StepAction::kPromote:
      return "promote";
  }
  return "?";
}

std::size_t SelectArm(const PolicyState& state, Rng& rng) {
  const auto& arms = state.temp_arms;
  if (arms.empty()) throw StructuralError("select_arm on an empty arm set");
  if (Uniform01(rng) < state.epsilon) return UniformIndex(rng, arms.size());
  std::size_t best = 0;
  for (std::size_t i = 1; i < arms.size(); ++i) {
    const ArmStats& a = arms[i];
    const ArmStats& b = arms[best];
    if (a.r_hat != b.r_hat) {
      if (a.r_hat > b.r_hat) best = i;
    } else if (a.pulls != b.pulls) {
      if (a.pulls < b.pulls) best = i;
    } else if (a.test_id < b.test_id) {
      best = i;
    }
  }
  return best;
}

void RecomputeWeights(PolicyState& state) {
  const std::size_t k = state.temp_arms.size();
  state.temp_policy.assign(k, 0.0);
  if (k == 0) return;
  double sum = 0.0;
  for (const auto& a : state.temp_arms) sum += a.r_hat;
  for (std::size_t i = 0; i < k; ++i) {
    state.temp_policy[i] = sum > 0.0 ? 100.0 * state.temp_arms[i].r_hat / sum
                                     : 100.0 / static_cast<double>(k);
  }
}

void UpdatePolicyAt(PolicyState& state, std::size_t index, double reward) {
  if (index >= state.temp_arms.size()) throw StructuralError("arm index out of range");
  if (!(reward >= 0.0)) throw StructuralError("negative reward");
  ArmStats& arm = state.temp_arms[index];
  arm.r_hat = (arm.r_hat * static_cast<double>(arm.pulls) + reward) /
              static_cast<double>(arm.pulls + 1);
  ++arm.pulls;
  RecomputeWeights(state);
}

void UpdatePolicy(PolicyState& state, std::string_view arm, double reward) {
  UpdatePolicyAt(state, state.IndexOf(arm), reward);
}

std::vector<ListEntry> NormalizePolicy(std::vector<ListEntry> entries) {
  double sum = 0.0;
  for (const auto& e : entries) {
    if (!(e.prob >= 0.0) || !std::isfinite(e.prob)) {
      throw StructuralError("policy weight for '" + e.test_id + "' is not a finite non-negative value");
    }
    sum += e.prob;
  }
  if (!(sum > 0.0)) throw StructuralError("cannot normalize an all-zero policy");
  for (auto& e : entries) e.prob /= sum;
  return entries;
}

namespace {

// Working-set bookkeeping shared by both training loops.
class ArmPool {
 public:
  ArmPool(std::span<const std::string> corpus, Rng& rng)
      : corpus_(corpus), rng_(rng), consumed_(corpus.size(), 0) {
    remaining_.resize(corpus.size());
    for (std::size_t i = 0; i < corpus.size(); ++i) remaining_[i] = i;
  }

  bool empty() const { return remaining_.empty(); }

  // Uniform draw without replacement.
  const std::string& Draw() {
    const std::size_t j = UniformIndex(rng_, remaining_.size());
    const std::size_t idx = remaining_[j];
    remaining_[j] = remaining_.back();
    remaining_.pop_back();
    consumed_[idx] = 1;
    return corpus_[idx];
  }

  std::vector<std::string> Residual() const {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < corpus_.size(); ++i) {
      if (!consumed_[i]) out.push_back(corpus_[i]);
    }
    return out;
  }

 private:
  std::span<const std::string> corpus_;
  Rng& rng_;
  std::vector<std::size_t> remaining_;
  std::vector<char> consumed_;
};

struct Trainer {
  PolicyState state;
  std::vector<std::size_t> history_slot;  // aligned with state.temp_arms
  std::vector<ArmStats> history;

  void Add(const std::string& id) {
    state.temp_arms.push_back(ArmStats{id, 0.0, 0});
    history_slot.push_back(history.size());
    history.push_back(state.temp_arms.back());
  }
  void Sync(std::size_t i) { history[history_slot[i]] = state.temp_arms[i]; }
  void Remove(std::size_t i) {
    Sync(i);
    state.temp_arms.erase(state.temp_arms.begin() + static_cast<std::ptrdiff_t>(i));
    state.temp_policy.erase(state.temp_policy.begin() + static_cast<std::ptrdiff_t>(i));
    history_slot.erase(history_slot.begin() + static_cast<std::ptrdiff_t>(i));
  }
  void SyncAll() {
    for (std::size_t i = 0; i < state.temp_arms.size(); ++i) Sync(i);
  }
};

void CheckParams(const CbParams& p) {
  if (p.k == 0) throw StructuralError("k must be positive");
  if (p.gamma == 0) throw StructuralError("gamma must be at least 1");
  if (!(p.epsilon >= 0.0 && p.epsilon <= 1.0)) {
    throw StructuralError("epsilon must lie in [0, 1]");
  }
}

}  // namespace

CbTrainResult AdaptiveCbTrain(std::span<const std::string> corpus, double context,
                              const RewardFn& reward, const CbParams& params, Rng& rng,
                              const StepSink& sink) {
  CheckParams(params);
  CbTrainResult result;
  result.list.context = context;
  result.list.kind = TestKind::kCoverage;
  if (corpus.empty()) return result;

  ArmPool pool(corpus, rng);
  Trainer t;
  t.state.context = context;
  t.state.epsilon = params.epsilon;
  while (t.state.temp_arms.size() < params.k && !pool.empty()) t.Add(pool.Draw());
  RecomputeWeights(t.state);

  auto emit = [&](std::uint64_t step, const std::string& arm, double r, StepAction a) {
    if (sink) sink(StepEvent{step, context, arm, r, a});
  };

  // Elimination / promotion check for the arm at index i. Returns the action
  // taken; on drop or promote the slot is refilled from the corpus.
  auto check = [&](std::size_t i) {
    const ArmStats& arm = t.state.temp_arms[i];
    if (arm.pulls < params.gamma) return StepAction::kKeep;
    StepAction action;
    if (arm.r_hat == 0.0) {
      action = StepAction::kDrop;
    } else if (t.state.temp_policy[i] >= params.theta) {
      t.state.promoted.emplace_back(arm.test_id, t.state.temp_policy[i]);
      action = StepAction::kPromote;
    } else {
      return StepAction::kKeep;
    }
    t.Remove(i);
    if (!pool.empty()) t.Add(pool.Draw());
    RecomputeWeights(t.state);
    return action;
  };

  // One pull per initial arm; these count toward the gamma window.
  std::vector<std::string> initial;
  for (const auto& a : t.state.temp_arms) initial.push_back(a.test_id);
  std::vector<double> initial_rewards;
  for (std::size_t i = 0; i < initial.size(); ++i) {
    const double r = reward(initial[i], rng);
    UpdatePolicyAt(t.state, i, r);
    initial_rewards.push_back(r);
  }
  for (std::size_t i = 0; i < initial.size(); ++i) {
    const auto& arms = t.state.temp_arms;
    auto it = std::find_if(arms.begin(), arms.end(),
                           [&](const ArmStats& a) { return a.test_id == initial[i]; });
    StepAction action = StepAction::kKeep;
    if (it != arms.end()) action = check(static_cast<std::size_t>(it - arms.begin()));
    emit(0, initial[i], initial_rewards[i], action);
  }

  for (std::uint64_t step = 1; step <= params.n; ++step) {
    if (t.state.temp_arms.empty()) break;
    const std::size_t i = SelectArm(t.state, rng);
    const std::string id = t.state.temp_arms[i].test_id;
    const double r = reward(id, rng);
    UpdatePolicyAt(t.state, i, r);
    const StepAction action = check(i);
    emit(step, id, r, action);
    result.steps_run = step;
  }

  t.SyncAll();
  result.history = std::move(t.history);
  if (!t.state.promoted.empty()) {
    std::vector<ListEntry> entries;
    for (const auto& [id, w] : t.state.promoted) entries.push_back(ListEntry{id, w});
    result.list.entries = NormalizePolicy(std::move(entries));
  }
  result.residual = pool.Residual();
  return result;
}

CbTrainResult OriginalCbTrain(std::span<const std::string> corpus, double context,
                              const RewardFn& reward, const CbParams& params, Rng& rng,
                              const StepSink& sink) {
  CheckParams(params);
  CbTrainResult result;
  result.list.context = context;
  result.list.kind = TestKind::kCoverage;
  if (corpus.empty()) return result;

  ArmPool pool(corpus, rng);
  Trainer t;
  t.state.context = context;
  t.state.epsilon = params.epsilon;
  while (t.state.temp_arms.size() < params.k && !pool.empty()) t.Add(pool.Draw());
  RecomputeWeights(t.state);

  for (std::size_t i = 0; i < t.state.temp_arms.size(); ++i) {
    const std::string id = t.state.temp_arms[i].test_id;
    const double r = reward(id, rng);
    UpdatePolicyAt(t.state, i, r);
    if (sink) sink(StepEvent{0, context, id, r, StepAction::kKeep});
  }
  for (std::uint64_t step = 1; step <= params.n; ++step) {
    const std::size_t i = SelectArm(t.state, rng);
    const std::string id = t.state.temp_arms[i].test_id;
    const double r = reward(id, rng);
    UpdatePolicyAt(t.state, i, r);
    if (sink) sink(StepEvent{step, context, id, r, StepAction::kKeep});
    result.steps_run = step;
  }

  t.SyncAll();
  result.history = std::move(t.history);
  const auto& arms = t.state.temp_arms;
  const double k = static_cast<double>(arms.size());
  double sum = 0.0;
  for (const auto& a : arms) sum += a.r_hat;
  std::vector<ListEntry> entries;
  for (const auto& a : arms) {
    const double p = sum > 0.0
                         ? (1.0 - params.epsilon) * a.r_hat / sum + params.epsilon / k
                         : 1.0 / k;
    // With epsilon = 0 an arm that never paid off gets no mass; leave it out
    // so every emitted probability is strictly positive.
    if (p > 0.0) entries.push_back(ListEntry{a.test_id, p});
  }
  result.list.entries = NormalizePolicy(std::move(entries));
  result.residual = pool.Residual();
  return result;
}

}  // namespace ppreuse
