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

// Campaign engine. A campaign first draws from the vulnerability list, then
// from the coverage list matching the current total coverage, and falls back
// to the fuzzer's own seed generation once no list applies. Each iteration
// is one execution: the first time a test is picked it runs as is, later
// picks run its next mutant.

#ifndef PPREUSE_RUNTIME_HPP_
#define PPREUSE_RUNTIME_HPP_

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ppreuse/bandit.hpp"
#include "ppreuse/bitvector.hpp"
#include "ppreuse/coverage.hpp"
#include "ppreuse/rng.hpp"
#include "ppreuse/trainer.hpp"

namespace ppreuse {

struct DropTracker {
  std::string test_id;
  std::uint64_t window_pulls = 0;
  double window_reward = 0.0;
};

enum class DropDecision { kKeep, kReset, kDrop };
std::string_view DropDecisionName(DropDecision decision);

// Adds one execution's increment. When the window reaches gamma executions
// it either drops the test (zero total) or clears the window.
DropDecision DropTest(DropTracker& tracker, double increment, std::uint64_t gamma);

// Fuzzer side of a campaign. Payloads are opaque strings handed back to
// Execute; Execute throws ExecutionError on failure.
class FuzzerPort {
 public:
  virtual ~FuzzerPort() = default;
  virtual std::size_t universe_size() const = 0;
  virtual std::string Load(const std::string& test_id) = 0;
  // `index` >= 1 names the index-th mutant of the test.
  virtual std::string Mutate(const std::string& test_id, std::uint64_t index) = 0;
  virtual std::string GenerateNative() = 0;
  virtual BitVector Execute(const std::string& payload) = 0;
};

// A trained list being consumed: sampling is proportional to the remaining
// entries' probabilities.
class ActiveList {
 public:
  ActiveList() = default;
  explicit ActiveList(const TrainedList& list);

  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }
  const std::vector<ListEntry>& entries() const { return entries_; }

  std::size_t Sample(Rng& rng) const;
  void Remove(std::size_t index);
  // Current distribution rescaled to sum 1.
  std::vector<double> Probabilities() const;

 private:
  std::vector<ListEntry> entries_;
};

// Index into `levels_ascending` of the list to draw from, or nullopt for
// native generation: the first level above tot_cov, moving up past empty
// lists.
std::optional<std::size_t> SelectCovList(double tot_cov,
                                         const std::vector<double>& levels_ascending,
                                         const std::vector<ActiveList>& lists);

enum class Phase { kVulnerability, kCoverage, kNative };
std::string_view PhaseName(Phase phase);

struct TraceRow {
  std::uint64_t iteration = 0;  // 1-based
  double tot_cov = 0.0;
  Phase phase = Phase::kNative;
  std::string test_id;  // "native:<n>" for native seeds
  std::string action;   // keep, reset, drop, native, error
};

struct CampaignParams {
  std::uint64_t gamma = 3;
  std::uint64_t m = 10000;
  // Thresholds reported in the tests-to-threshold table.
  std::vector<double> thresholds = {55.0, 60.0, 65.0, 70.0};
  // Coverage points whose first hit iteration is reported.
  std::vector<std::size_t> watch_points;
};

struct CampaignReport {
  std::vector<TraceRow> trace;
  CoveredSet covered;
  double final_tot_cov = 0.0;
  std::map<double, std::optional<std::uint64_t>> tests_to_threshold;
  std::map<std::size_t, std::optional<std::uint64_t>> watch_hits;
  std::uint64_t vulnerability_iterations = 0;
  std::uint64_t coverage_iterations = 0;
  std::uint64_t native_iterations = 0;
  std::uint64_t dropped = 0;
  std::uint64_t errors = 0;
};

class Campaign {
 public:
  Campaign(const TestListModel& model, FuzzerPort& fuzzer, CampaignParams params,
           std::uint64_t seed);

  // Vulnerability list until it is empty (or the budget runs out).
  void FuzzVulList();
  // Coverage lists and then native seeds until m iterations in total.
  void FuzzCovList();
  CampaignReport Finish();

  Phase phase() const { return phase_; }
  double tot_cov() const { return tot_cov_; }
  std::uint64_t iteration() const { return iteration_; }
  const ActiveList& vulnerability_list() const { return vuln_; }
  const std::vector<ActiveList>& coverage_lists() const { return cov_; }
  const std::vector<double>& levels_ascending() const { return levels_; }

 private:
  // Runs one list test; returns true if it was removed from its list.
  bool StepListTest(ActiveList& list, std::size_t index);
  void StepNative();
  void Record(const std::string& test_id, std::string action, const BitVector* row);
  std::string PayloadFor(const std::string& test_id);

  FuzzerPort& fuzzer_;
  CampaignParams params_;
  Rng rng_;
  ActiveList vuln_;
  std::vector<double> levels_;
  std::vector<ActiveList> cov_;
  CoveredSet covered_;
  double tot_cov_ = 0.0;
  Phase phase_ = Phase::kVulnerability;
  std::uint64_t iteration_ = 0;
  std::uint64_t native_count_ = 0;
  std::unordered_map<std::string, DropTracker> trackers_;
  std::unordered_map<std::string, std::uint64_t> executions_;
  CampaignReport report_;
};

CampaignReport RunCampaign(const TestListModel& model, FuzzerPort& fuzzer,
                           const CampaignParams& params, std::uint64_t seed);

// The bare fuzzer: m native seeds.
CampaignReport RunNative(FuzzerPort& fuzzer, const CampaignParams& params);

// First iteration whose tot_cov reaches `threshold`.
std::optional<std::uint64_t> TestsToThreshold(const std::vector<TraceRow>& trace,
                                              double threshold);

std::string FormatTraceCsv(const std::vector<TraceRow>& trace);
std::string FormatCampaignSummary(const CampaignReport& report);

}  // namespace ppreuse

#endif  // PPREUSE_RUNTIME_HPP_
