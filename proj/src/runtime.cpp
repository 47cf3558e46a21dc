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

#include "ppreuse/runtime.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "json.hpp"
#include "ppreuse/errors.hpp"

namespace ppreuse {

std::string_view DropDecisionName(DropDecision decision) {
  switch (decision) {
    case DropDecision::kKeep:
      return "keep";
    case DropDecision::kReset:
      return "reset";
    case DropDecision::kDrop:
      return "drop";
  }
  return "?";
}

DropDecision DropTest(DropTracker& tracker, double increment, std::uint64_t gamma) {
  if (!(increment >= 0.0)) throw StructuralError("negative coverage increment");
  if (gamma == 0) throw StructuralError("gamma must be at least 1");
  ++tracker.window_pulls;
  tracker.window_reward += increment;
  if (tracker.window_pulls < gamma) return DropDecision::kKeep;
  if (tracker.window_reward == 0.0) return DropDecision::kDrop;
  tracker.window_pulls = 0;
  tracker.window_reward = 0.0;
  return DropDecision::kReset;
}

ActiveList::ActiveList(const TrainedList& list) : entries_(list.entries) {
  for (const auto& e : entries_) {
    if (!(e.prob > 0.0)) {
      throw ModelError("list entry '" + e.test_id + "' has non-positive probability");
    }
  }
}

std::size_t ActiveList::Sample(Rng& rng) const {
  if (entries_.empty()) throw StructuralError("sampling from an empty list");
  double sum = 0.0;
  for (const auto& e : entries_) sum += e.prob;
  double u = Uniform01(rng) * sum;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    u -= entries_[i].prob;
    if (u < 0.0) return i;
  }
  return entries_.size() - 1;
}

void ActiveList::Remove(std::size_t index) {
  entries_.erase(entries_.begin() + static_cast<std::ptrdiff_t>(index));
}

std::vector<double> ActiveList::Probabilities() const {
  double sum = 0.0;
  for (const auto& e : entries_) sum += e.prob;
  std::vector<double> out;
  for (const auto& e : entries_) out.push_back(e.prob / sum);
  return out;
}

std::optional<std::size_t> SelectCovList(double tot_cov,
                                         const std::vector<double>& levels_ascending,
                                         const std::vector<ActiveList>& lists) {
  std::size_t i = 0;
  while (i < levels_ascending.size() && !(tot_cov < levels_ascending[i])) ++i;
  for (; i < levels_ascending.size(); ++i) {
    if (i < lists.size() && !lists[i].empty()) return i;
  }
  return std::nullopt;
}

std::string_view PhaseName(Phase phase) {
  switch (phase) {
    case Phase::kVulnerability:
      return "vulnerability";
    case Phase::kCoverage:
      return "coverage";
    case Phase::kNative:
      return "native";
  }
  return "?";
}

Campaign::Campaign(const TestListModel& model, FuzzerPort& fuzzer,
                   CampaignParams params, std::uint64_t seed)
    : fuzzer_(fuzzer),
      params_(std::move(params)),
      rng_(seed),
      vuln_(model.vulnerability_list),
      covered_(fuzzer.universe_size()) {
  if (params_.gamma == 0) throw StructuralError("gamma must be at least 1");
  for (const auto& [level, list] : model.coverage_lists) {
    levels_.push_back(level);
    cov_.emplace_back(list);
  }
  // The model stores levels highest first; dispatch walks them upward.
  std::reverse(levels_.begin(), levels_.end());
  std::reverse(cov_.begin(), cov_.end());
  for (double t : params_.thresholds) report_.tests_to_threshold[t] = std::nullopt;
  for (std::size_t p : params_.watch_points) {
    if (p >= fuzzer.universe_size()) throw StructuralError("watch point out of range");
    report_.watch_hits[p] = std::nullopt;
  }
}

std::string Campaign::PayloadFor(const std::string& test_id) {
  const std::uint64_t n = executions_[test_id]++;
  return n == 0 ? fuzzer_.Load(test_id) : fuzzer_.Mutate(test_id, n);
}

void Campaign::Record(const std::string& test_id, std::string action,
                      const BitVector* row) {
  ++iteration_;
  if (row != nullptr) {
    MergeInto(covered_, *row);
    tot_cov_ = TotalCoverage(covered_);
    for (auto& [p, hit] : report_.watch_hits) {
      if (!hit && covered_.bits.test(p)) hit = iteration_;
    }
  }
  for (auto& [t, hit] : report_.tests_to_threshold) {
    if (!hit && tot_cov_ >= t) hit = iteration_;
  }
  switch (phase_) {
    case Phase::kVulnerability:
      ++report_.vulnerability_iterations;
      break;
    case Phase::kCoverage:
      ++report_.coverage_iterations;
      break;
    case Phase::kNative:
      ++report_.native_iterations;
      break;
  }
  report_.trace.push_back(TraceRow{iteration_, tot_cov_, phase_, test_id, std::move(action)});
}

bool Campaign::StepListTest(ActiveList& list, std::size_t index) {
  const std::string id = list.entries()[index].test_id;
  BitVector row;
  try {
    row = fuzzer_.Execute(PayloadFor(id));
    if (row.size() != covered_.universe_size()) {
      throw ExecutionError("execution of '" + id + "' returned the wrong universe size");
    }
  } catch (const ExecutionError&) {
    list.Remove(index);
    ++report_.errors;
    Record(id, "error", nullptr);
    return true;
  }
  const double increment = IncrementalCoverage(row, covered_);
  DropTracker& tracker = trackers_.try_emplace(id, DropTracker{id, 0, 0.0}).first->second;
  const DropDecision decision = DropTest(tracker, increment, params_.gamma);
  if (decision == DropDecision::kDrop) {
    list.Remove(index);
    ++report_.dropped;
  }
  Record(id, std::string(DropDecisionName(decision)), &row);
  return decision == DropDecision::kDrop;
}

void Campaign::StepNative() {
  const std::string label = "native:" + std::to_string(native_count_++);
  BitVector row;
  try {
    row = fuzzer_.Execute(fuzzer_.GenerateNative());
    if (row.size() != covered_.universe_size()) {
      throw ExecutionError("native execution returned the wrong universe size");
    }
  } catch (const ExecutionError&) {
    ++report_.errors;
    Record(label, "error", nullptr);
    return;
  }
  Record(label, "native", &row);
}

void Campaign::FuzzVulList() {
  if (phase_ != Phase::kVulnerability) return;
  while (!vuln_.empty() && iteration_ < params_.m) {
    StepListTest(vuln_, vuln_.Sample(rng_));
  }
  phase_ = Phase::kCoverage;
}

void Campaign::FuzzCovList() {
  if (phase_ == Phase::kVulnerability) FuzzVulList();
  while (iteration_ < params_.m) {
    std::optional<std::size_t> which;
    if (phase_ == Phase::kCoverage) which = SelectCovList(tot_cov_, levels_, cov_);
    if (!which) {
      phase_ = Phase::kNative;
      StepNative();
      continue;
    }
    ActiveList& list = cov_[*which];
    StepListTest(list, list.Sample(rng_));
  }
}

CampaignReport Campaign::Finish() {
  report_.covered = covered_;
  report_.final_tot_cov = tot_cov_;
  return std::move(report_);
}

CampaignReport RunCampaign(const TestListModel& model, FuzzerPort& fuzzer,
                           const CampaignParams& params, std::uint64_t seed) {
  Campaign campaign(model, fuzzer, params, seed);
  campaign.FuzzVulList();
  campaign.FuzzCovList();
  return campaign.Finish();
}

CampaignReport RunNative(FuzzerPort& fuzzer, const CampaignParams& params) {
  TestListModel empty;
  Campaign campaign(empty, fuzzer, params, 0);
  campaign.FuzzCovList();
  return campaign.Finish();
}

std::optional<std::uint64_t> TestsToThreshold(const std::vector<TraceRow>& trace,
                                              double threshold) {
  for (const auto& row : trace) {
    if (row.tot_cov >= threshold) return row.iteration;
  }
  return std::nullopt;
}

std::string FormatTraceCsv(const std::vector<TraceRow>& trace) {
  std::string out = "iteration,tot_cov,phase,test_id,action\n";
  char buf[64];
  for (const auto& row : trace) {
    std::snprintf(buf, sizeof(buf), "%llu,%.4f,",
                  static_cast<unsigned long long>(row.iteration), row.tot_cov);
    out += buf;
    out += PhaseName(row.phase);
    out += ',';
    out += row.test_id;
    out += ',';
    out += row.action;
    out += '\n';
  }
  return out;
}

std::string FormatCampaignSummary(const CampaignReport& report) {
  nlohmann::ordered_json doc;
  doc["iterations"] = report.trace.size();
  doc["final_tot_cov"] = report.final_tot_cov;
  doc["phase_iterations"] = {{"vulnerability", report.vulnerability_iterations},
                             {"coverage", report.coverage_iterations},
                             {"native", report.native_iterations}};
  doc["dropped"] = report.dropped;
  doc["errors"] = report.errors;
  nlohmann::ordered_json ttt = nlohmann::ordered_json::object();
  for (const auto& [t, hit] : report.tests_to_threshold) {
    ttt[FormatLevel(t)] = hit ? nlohmann::ordered_json(*hit) : nlohmann::ordered_json();
  }
  doc["tests_to_threshold"] = std::move(ttt);
  if (!report.watch_hits.empty()) {
    nlohmann::ordered_json w = nlohmann::ordered_json::object();
    for (const auto& [p, hit] : report.watch_hits) {
      w[std::to_string(p)] = hit ? nlohmann::ordered_json(*hit) : nlohmann::ordered_json();
    }
    doc["watch_hits"] = std::move(w);
  }
  return doc.dump(2) + "\n";
}

}  // namespace ppreuse
