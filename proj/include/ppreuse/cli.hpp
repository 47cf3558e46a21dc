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

// Command-line front end. Subcommands: gen-synth, parse, minimize, tune,
// train, run, compare, report. See README for the grammar and the config
// schema.
//
// Exit codes: 0 success, 1 domain error (bad input data, model file, I/O),
// 2 usage error (bad flags or config).

#ifndef PPREUSE_CLI_HPP_
#define PPREUSE_CLI_HPP_

#include <chrono>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ppreuse/simharness.hpp"
#include "ppreuse/trainer.hpp"

namespace ppreuse {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CliConfig {
  std::uint64_t seed = 1;
  // Unset means the benchmark preset.
  std::optional<SuiteSpec> suite;
  ModelParams params = BenchmarkModelParams();
  std::vector<double> levels = ContextLevels();
  CbAlgorithm algorithm = CbAlgorithm::kAdaptive;
  bool tune = true;
  std::chrono::milliseconds minimize_budget{60000};
  // Campaign iterations for `run`.
  std::uint64_t m = 3000;
  std::vector<double> thresholds = {55.0, 60.0, 65.0, 70.0};
  // `compare`
  std::vector<Strategy> strategies = AllStrategies();
  std::size_t seeds = 20;
  std::uint64_t budget = 3000;
  std::string baseline = "baseline_scratch";
  std::size_t jobs = 1;
};

// Throws UsageError on unknown keys or wrongly typed values. A "suite"
// given as a string is a path resolved relative to `base_dir`.
CliConfig ParseCliConfig(std::string_view json, const std::string& base_dir = ".");

// Test-id manifest: one id per line, '#' starts a comment.
std::vector<std::string> ParseManifest(std::string_view text);
std::string FormatManifest(const std::vector<std::string>& ids);

int RunCommand(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int RunCommand(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ppreuse

#endif  // PPREUSE_CLI_HPP_
