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

#include "ppreuse/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "ppreuse/coverage.hpp"
#include "ppreuse/errors.hpp"
#include "ppreuse/minimizer.hpp"
#include "ppreuse/report.hpp"
#include "ppreuse/runtime.hpp"

namespace ppreuse {

namespace fs = std::filesystem;
using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteFile(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw Error("cannot create '" + path.parent_path().string() + "'");
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << content;
  if (!out) throw Error("write to '" + path.string() + "' failed");
}

std::string Fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

// ---------------------------------------------------------------------------
// Config

void CheckKeys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw UsageError(where + " must be an object");
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) throw UsageError("unknown config key '" + where + "." + key + "'");
  }
}

template <typename T>
void Get(const json& obj, const char* key, T& dst, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) return;
  try {
    if constexpr (std::is_same_v<T, bool>) {
      if (!it->is_boolean()) throw UsageError("");
    } else if constexpr (std::is_unsigned_v<T>) {
      if (!it->is_number_unsigned()) throw UsageError("");
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!it->is_number()) throw UsageError("");
    }
    dst = it->get<T>();
  } catch (const std::exception&) {
    throw UsageError("config key '" + where + "." + key + "' has the wrong type");
  }
}

std::vector<double> NumberList(const json& v, const std::string& where) {
  if (!v.is_array()) throw UsageError(where + " must be an array of numbers");
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number()) throw UsageError(where + " must be an array of numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

std::vector<double> ParseNumberCsv(const std::string& text, const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError(std::string("bad ") + what + " '" + item + "'");
    }
  }
  if (out.empty()) throw UsageError(std::string("empty ") + what);
  return out;
}

std::vector<Strategy> ParseStrategies(const std::string& text) {
  std::vector<Strategy> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(ParseStrategy(item));
    } catch (const StructuralError& e) {
      throw UsageError(e.what());
    }
  }
  if (out.empty()) throw UsageError("no strategies given");
  return out;
}

SuiteSpec SuiteFromText(const std::string& text) {
  try {
    return ParseSuiteSpec(text);
  } catch (const Error& e) {
    throw UsageError(std::string("suite spec: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Shared pieces of the subcommands

struct Common {
  std::string config_path;
  std::uint64_t seed = 0;
  CLI::Option* seed_opt = nullptr;
  std::string suite_path;
  CLI::Option* suite_opt = nullptr;
  std::string preset;
  CLI::Option* preset_opt = nullptr;
};

void AddCommon(CLI::App* sub, Common& c, bool with_suite) {
  sub->add_option("--config", c.config_path, "JSON config file");
  c.seed_opt = sub->add_option("--seed", c.seed, "Random seed");
  if (with_suite) {
    c.suite_opt = sub->add_option("--suite", c.suite_path, "Suite spec JSON");
    c.preset_opt = sub->add_option("--preset", c.preset, "Suite preset (benchmark, distill)");
    c.suite_opt->excludes(c.preset_opt);
  }
}

CliConfig LoadConfig(const Common& c) {
  CliConfig cfg;
  if (!c.config_path.empty()) {
    cfg = ParseCliConfig(ReadFile(c.config_path), fs::path(c.config_path).parent_path().string());
  }
  if (c.seed_opt != nullptr && c.seed_opt->count() > 0) cfg.seed = c.seed;
  if (c.suite_opt != nullptr && c.suite_opt->count() > 0) {
    cfg.suite = SuiteFromText(ReadFile(c.suite_path));
  }
  if (c.preset_opt != nullptr && c.preset_opt->count() > 0) {
    try {
      cfg.suite = SuiteSpec::Preset(c.preset);
    } catch (const StructuralError& e) {
      throw UsageError(e.what());
    }
  }
  return cfg;
}

SuiteSpec SuiteOf(const CliConfig& cfg) { return cfg.suite ? *cfg.suite : SuiteSpec{}; }

std::vector<std::string> LoadManifests(const std::vector<std::string>& paths) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const auto& p : paths) {
    for (auto& id : ParseManifest(ReadFile(p))) {
      if (seen.insert(id).second) out.push_back(std::move(id));
    }
  }
  return out;
}

// Minimized coverage corpus of every trainer, trainer by trainer.
std::vector<std::string> MinimizeSuite(const SyntheticSuite& suite, const CliConfig& cfg,
                                       std::ostream& err) {
  std::vector<std::string> out;
  for (std::size_t t = 0; t + 1 < suite.processors().size(); ++t) {
    const MinimizeResult r = MinimizeExact(suite.TrainerMatrix(t), cfg.minimize_budget);
    err << "minimize " << suite.processors()[t] << ": " << r.selected.size() << " tests, "
        << MinimizeMethodName(r.method) << ", " << Fixed(r.elapsed.count(), 3) << " s\n";
    out.insert(out.end(), r.selected.begin(), r.selected.end());
  }
  return out;
}

void CheckKnownTests(const SyntheticSuite& suite, const std::vector<std::string>& ids) {
  for (const auto& id : ids) suite.test(id);
}

LevelMap ThetaFromJson(const json& obj, const std::string& where) {
  if (!obj.is_object()) throw UsageError(where + " must map levels to numbers");
  LevelMap theta;
  for (const auto& [key, value] : obj.items()) {
    if (!value.is_number()) throw UsageError(where + "." + key + " must be a number");
    double level = 0.0;
    try {
      level = ParseLevel(key);
    } catch (const Error&) {
      throw UsageError(where + " has a bad level '" + key + "'");
    }
    theta[level] = value.get<double>();
  }
  return theta;
}

// Directory listing in name order, regular files only.
std::vector<fs::path> ListFiles(const fs::path& dir, std::string_view extension) {
  std::vector<fs::path> out;
  std::error_code ec;
  for (const auto& entry : fs::directory_iterator(dir, ec)) {
    if (entry.is_regular_file() && (extension.empty() || entry.path().extension() == extension)) {
      out.push_back(entry.path());
    }
  }
  if (ec) throw Error("cannot list '" + dir.string() + "'");
  std::sort(out.begin(), out.end());
  return out;
}

CoverageMatrix MatrixFromInputs(const std::vector<std::string>& inputs) {
  std::vector<fs::path> files;
  for (const auto& in : inputs) {
    if (fs::is_directory(in)) {
      for (auto& f : ListFiles(in, ".rcdb")) files.push_back(std::move(f));
    } else {
      files.emplace_back(in);
    }
  }
  if (files.empty()) throw Error("no coverage databases found");
  std::vector<ParsedCoverage> parsed;
  for (const auto& f : files) {
    try {
      parsed.push_back(ParseCoverageDb(ReadFile(f.string()), f.stem().string()));
    } catch (const ParseError& e) {
      throw ParseError(e.line(), f.string() + ": " + e.what());
    }
  }
  return BuildMatrix(parsed);
}

// ---------------------------------------------------------------------------
// Subcommands

int CmdGenSynth(const Common& c, const std::string& out_dir, bool rcdb, std::ostream& out) {
  CliConfig cfg = LoadConfig(c);
  SuiteSpec spec = SuiteOf(cfg);
  if (c.seed_opt->count() > 0) spec.seed = cfg.seed;
  const SyntheticSuite suite = SyntheticSuite::Generate(spec);
  const fs::path dir(out_dir);
  WriteFile(dir / "suite.json", FormatSuiteSpec(spec));
  WriteFile(dir / "manifest.json", suite.ManifestJson());
  WriteFile(dir / "coverage_tests.txt", FormatManifest(suite.CoverageTests()));
  WriteFile(dir / "vuln_tests.txt", FormatManifest(suite.VulnerabilityTests()));
  for (std::size_t t = 0; t + 1 < suite.processors().size(); ++t) {
    const std::string& name = suite.processors()[t];
    const CoverageMatrix m = suite.TrainerMatrix(t);
    WriteFile(dir / "matrix" / (name + ".matrix"), SerializeMatrix(m));
    if (rcdb) {
      for (const auto& row : m.rows()) {
        WriteFile(dir / "rcdb" / name / (row.test_id + ".rcdb"),
                  FormatCoverageDb(m.universe(), row.bits, row.test_id));
      }
    }
  }
  out << "suite seed " << spec.seed << ": " << suite.tests().size() << " tests, "
      << suite.processors().size() << " processors, " << suite.universe_size()
      << " points -> " << dir.string() << "\n";
  return 0;
}

int CmdParse(const std::vector<std::string>& inputs, const std::string& out_path,
             std::ostream& out) {
  const CoverageMatrix m = MatrixFromInputs(inputs);
  const CoveredSet all(m.union_bits());
  out << "tests " << m.num_rows() << "\n";
  out << "points " << m.num_points() << "\n";
  out << "total_coverage " << Fixed(TotalCoverage(all), 4) << "\n";
  if (!out_path.empty()) WriteFile(out_path, SerializeMatrix(m));
  return 0;
}

int CmdMinimize(const Common& c, const std::string& matrix_path,
                const std::vector<std::string>& rcdb, const std::string& out_dir, bool greedy,
                std::ostream& out, std::ostream& err) {
  const CliConfig cfg = LoadConfig(c);
  if (matrix_path.empty() == rcdb.empty()) {
    throw UsageError("give exactly one of --matrix or --rcdb");
  }
  const CoverageMatrix m =
      matrix_path.empty() ? MatrixFromInputs(rcdb) : ParseMatrix(ReadFile(matrix_path));
  const MinimizeResult r = greedy ? MinimizeGreedy(m) : MinimizeExact(m, cfg.minimize_budget);
  const bool equivalent = VerifyEquivalence(m, r.selected);
  err << "elapsed " << Fixed(r.elapsed.count(), 3) << " s, nodes " << r.nodes << "\n";

  ordered_json stats;
  stats["tests"] = m.num_rows();
  stats["points"] = m.num_points();
  stats["selected"] = r.selected.size();
  stats["reduction_rate"] = ReductionRate(m, r);
  stats["method"] = std::string(MinimizeMethodName(r.method));
  stats["equivalent"] = equivalent;
  stats["empty_rows"] = r.empty_rows;
  const fs::path dir(out_dir);
  WriteFile(dir / "selection.txt", FormatManifest(r.selected));
  WriteFile(dir / "stats.json", stats.dump(2) + "\n");
  out << "selected " << r.selected.size() << " of " << m.num_rows() << " tests, reduction "
      << Fixed(ReductionRate(m, r), 1) << "%, " << MinimizeMethodName(r.method) << "\n";
  return equivalent ? 0 : 1;
}

ordered_json TuneJson(const TuneResult& tr) {
  ordered_json doc;
  ordered_json theta = ordered_json::object();
  for (const auto& [level, t] : tr.theta) theta[FormatLevel(level)] = t;
  doc["theta"] = std::move(theta);
  ordered_json searches = ordered_json::object();
  for (const auto& [level, s] : tr.searches) {
    searches[FormatLevel(level)] = {{"theta", s.theta},
                                    {"probes", s.probes},
                                    {"accepted", s.accepted},
                                    {"list_size", s.last_count}};
  }
  doc["searches"] = std::move(searches);
  doc["warnings"] = tr.warnings;
  return doc;
}

struct TrainInputs {
  std::vector<std::string> corpus;
  std::vector<std::string> vuln;
  std::string theta_path;
};

std::vector<std::string> CorpusFor(const SyntheticSuite& suite, const CliConfig& cfg,
                                   const std::vector<std::string>& manifests,
                                   std::ostream& err) {
  if (manifests.empty()) return MinimizeSuite(suite, cfg, err);
  std::vector<std::string> corpus = LoadManifests(manifests);
  CheckKnownTests(suite, corpus);
  return corpus;
}

int CmdTune(const Common& c, const std::vector<std::string>& corpus_paths,
            const std::string& out_path, std::ostream& out, std::ostream& err) {
  const CliConfig cfg = LoadConfig(c);
  const SyntheticSuite suite = SyntheticSuite::Generate(SuiteOf(cfg));
  const std::vector<std::string> corpus = CorpusFor(suite, cfg, corpus_paths, err);
  const RewardEnv env = MakeRewardEnv(suite, cfg.levels);
  const TuneResult tr = FineTuneThresholds(corpus, cfg.levels, cfg.params, env, cfg.seed);
  for (const auto& w : tr.warnings) err << "warning: " << w << "\n";
  WriteFile(out_path, TuneJson(tr).dump(2) + "\n");
  for (const auto& [level, s] : tr.searches) {
    out << "level " << FormatLevel(level) << ": theta " << Fixed(s.theta, 2) << ", "
        << s.last_count << " tests, " << s.probes << " probes"
        << (s.accepted ? "" : " (not accepted)") << "\n";
  }
  return 0;
}

int CmdTrain(const Common& c, const TrainInputs& in, const std::string& algorithm,
             bool no_tune, const std::string& out_path, const std::string& log_path,
             std::ostream& out, std::ostream& err) {
  CliConfig cfg = LoadConfig(c);
  if (!algorithm.empty()) {
    try {
      cfg.algorithm = ParseCbAlgorithm(algorithm);
    } catch (const Error& e) {
      throw UsageError(e.what());
    }
  }
  if (no_tune) cfg.tune = false;
  const SyntheticSuite suite = SyntheticSuite::Generate(SuiteOf(cfg));
  const std::vector<std::string> corpus = CorpusFor(suite, cfg, in.corpus, err);
  std::vector<std::string> vuln = suite.VulnerabilityTests();
  if (!in.vuln.empty()) {
    vuln = LoadManifests(in.vuln);
    CheckKnownTests(suite, vuln);
  }
  const RewardEnv env = MakeRewardEnv(suite, cfg.levels);
  ModelParams params = cfg.params;
  if (!in.theta_path.empty()) {
    json doc;
    try {
      doc = json::parse(ReadFile(in.theta_path));
    } catch (const json::exception& e) {
      throw ParseError(0, in.theta_path + ": " + e.what());
    }
    if (!doc.is_object() || !doc.contains("theta")) {
      throw StructuralError(in.theta_path + ": missing \"theta\"");
    }
    params.theta = ThetaFromJson(doc["theta"], "theta");
  } else if (cfg.tune && params.theta.empty() && cfg.algorithm == CbAlgorithm::kAdaptive) {
    const TuneResult tr = FineTuneThresholds(corpus, cfg.levels, params, env, cfg.seed);
    for (const auto& w : tr.warnings) err << "warning: " << w << "\n";
    params.theta = tr.theta;
  }

  std::string log = "step,context,arm,reward,action\n";
  TrainLogSink sink;
  if (!log_path.empty()) {
    sink = [&log](const StepEvent& e) {
      log += std::to_string(e.step);
      log += ',';
      log += FormatLevel(e.context);
      log += ',';
      log += e.arm;
      log += ',';
      log += Fixed(e.reward, 6);
      log += ',';
      log += StepActionName(e.action);
      log += '\n';
    };
  }
  const TestListModel model =
      TrainModel(corpus, vuln, cfg.levels, params, env, cfg.seed, cfg.algorithm, sink);
  WriteFile(out_path, SerializeModel(model));
  if (!log_path.empty()) WriteFile(log_path, log);
  out << CbAlgorithmName(cfg.algorithm) << " model: vulnerability list "
      << model.vulnerability_list.size();
  for (const auto& [level, list] : model.coverage_lists) {
    out << ", " << FormatLevel(level) << ": " << list.size();
  }
  out << "\n";
  return 0;
}

int CmdRun(const Common& c, const std::string& model_path, bool native, std::uint64_t gamma,
           CLI::Option* gamma_opt, std::uint64_t m, CLI::Option* m_opt,
           const std::vector<std::size_t>& watch, const std::string& out_dir, std::ostream& out) {
  CliConfig cfg = LoadConfig(c);
  if (model_path.empty() == !native) throw UsageError("give exactly one of --model or --native");
  const SyntheticSuite suite = SyntheticSuite::Generate(SuiteOf(cfg));
  CampaignParams params;
  params.gamma = gamma_opt->count() > 0 ? gamma : cfg.params.gamma;
  params.m = m_opt->count() > 0 ? m : cfg.m;
  params.thresholds = cfg.thresholds;
  params.watch_points = watch;
  SyntheticFuzzer fuzzer(suite, SyntheticSuite::kTestingPut, 0);
  const CampaignReport report = native ? RunNative(fuzzer, params)
                                       : RunCampaign(LoadModel(model_path), fuzzer, params,
                                                     cfg.seed);
  const fs::path dir(out_dir);
  WriteFile(dir / "trace.csv", FormatTraceCsv(report.trace));
  WriteFile(dir / "summary.json", FormatCampaignSummary(report));
  out << "final coverage " << Fixed(report.final_tot_cov, 4) << "% after "
      << report.trace.size() << " iterations";
  for (const auto& [t, hit] : report.tests_to_threshold) {
    out << ", " << FormatLevel(t) << "%: " << (hit ? std::to_string(*hit) : "-");
  }
  out << "\n";
  return 0;
}

void WriteReport(const fs::path& dir, const std::vector<StrategyTraces>& traces,
                 const CliConfig& cfg, std::ostream& out) {
  const auto files = RenderReport(traces, cfg.thresholds, cfg.baseline);
  for (const auto& [name, content] : files) WriteFile(dir / name, content);
  out << files.at("summary.csv");
}

int CmdCompare(const CliConfig& cfg, const std::string& out_dir, std::ostream& out) {
  if (cfg.seeds == 0) throw UsageError("--seeds must be positive");
  if (cfg.budget == 0) throw UsageError("--budget must be positive");
  CompareOptions opt;
  opt.spec = SuiteOf(cfg);
  opt.strategies = cfg.strategies;
  opt.replicates = cfg.seeds;
  opt.budget = cfg.budget;
  opt.master_seed = cfg.seed;
  opt.jobs = std::max<std::size_t>(1, cfg.jobs);
  opt.pipeline.params = cfg.params;
  opt.pipeline.levels = cfg.levels;
  opt.pipeline.tune = cfg.tune;
  opt.pipeline.algorithm = cfg.algorithm;
  opt.pipeline.gamma = cfg.params.gamma;
  opt.pipeline.minimize_budget = cfg.minimize_budget;
  const std::vector<CompareRun> runs = CompareStrategies(opt);

  std::vector<StrategyTraces> traces;
  for (Strategy s : opt.strategies) traces.push_back({std::string(StrategyName(s)), {}});
  for (const auto& r : runs) {
    for (auto& t : traces) {
      if (t.strategy == StrategyName(r.strategy)) t.runs.push_back(r.tot_cov);
    }
  }
  const fs::path dir(out_dir);
  WriteFile(dir / "traces.csv", FormatTracesCsv(traces));
  WriteReport(dir, traces, cfg, out);
  return 0;
}

int CmdReport(const CliConfig& cfg, const std::string& traces_path, const std::string& out_dir,
              std::ostream& out) {
  WriteReport(fs::path(out_dir), ParseTracesCsv(ReadFile(traces_path)), cfg, out);
  return 0;
}

}  // namespace

CliConfig ParseCliConfig(std::string_view text, const std::string& base_dir) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw UsageError(std::string("config is not valid JSON: ") + e.what());
  }
  CheckKeys(doc, {"seed", "suite", "params", "campaign", "compare", "minimize_budget_ms"},
            "config");
  CliConfig cfg;
  Get(doc, "seed", cfg.seed, "config");
  if (doc.contains("minimize_budget_ms")) {
    std::uint64_t ms = 0;
    Get(doc, "minimize_budget_ms", ms, "config");
    cfg.minimize_budget = std::chrono::milliseconds(ms);
  }
  if (doc.contains("suite")) {
    const json& s = doc["suite"];
    if (s.is_string()) {
      cfg.suite = SuiteFromText(ReadFile((fs::path(base_dir) / s.get<std::string>()).string()));
    } else if (s.is_object()) {
      cfg.suite = SuiteFromText(s.dump());
    } else {
      throw UsageError("config.suite must be a path or an object");
    }
  }
  if (doc.contains("params")) {
    const json& p = doc["params"];
    CheckKeys(p, {"k", "gamma", "epsilon", "n", "f", "theta", "levels", "algorithm", "tune"},
              "params");
    Get(p, "k", cfg.params.k, "params");
    Get(p, "gamma", cfg.params.gamma, "params");
    Get(p, "epsilon", cfg.params.epsilon, "params");
    Get(p, "n", cfg.params.n, "params");
    Get(p, "f", cfg.params.f, "params");
    Get(p, "tune", cfg.tune, "params");
    if (p.contains("theta")) cfg.params.theta = ThetaFromJson(p["theta"], "params.theta");
    if (p.contains("levels")) cfg.levels = NumberList(p["levels"], "params.levels");
    if (p.contains("algorithm")) {
      std::string name;
      Get(p, "algorithm", name, "params");
      try {
        cfg.algorithm = ParseCbAlgorithm(name);
      } catch (const Error& e) {
        throw UsageError(e.what());
      }
    }
    if (cfg.params.k == 0) throw UsageError("params.k must be positive");
    if (cfg.params.gamma == 0) throw UsageError("params.gamma must be positive");
    if (!(cfg.params.epsilon >= 0.0 && cfg.params.epsilon <= 1.0)) {
      throw UsageError("params.epsilon must lie in [0, 1]");
    }
    if (!(cfg.params.f >= 0.0 && cfg.params.f < 1.0)) {
      throw UsageError("params.f must lie in [0, 1)");
    }
  }
  if (doc.contains("campaign")) {
    const json& p = doc["campaign"];
    CheckKeys(p, {"m", "thresholds"}, "campaign");
    Get(p, "m", cfg.m, "campaign");
    if (p.contains("thresholds")) cfg.thresholds = NumberList(p["thresholds"], "campaign.thresholds");
  }
  if (doc.contains("compare")) {
    const json& p = doc["compare"];
    CheckKeys(p, {"strategies", "seeds", "budget", "baseline", "jobs"}, "compare");
    if (p.contains("strategies")) {
      if (!p["strategies"].is_array()) throw UsageError("compare.strategies must be an array");
      cfg.strategies.clear();
      for (const auto& s : p["strategies"]) {
        if (!s.is_string()) throw UsageError("compare.strategies must hold names");
        try {
          cfg.strategies.push_back(ParseStrategy(s.get<std::string>()));
        } catch (const StructuralError& e) {
          throw UsageError(e.what());
        }
      }
    }
    Get(p, "seeds", cfg.seeds, "compare");
    Get(p, "budget", cfg.budget, "compare");
    Get(p, "baseline", cfg.baseline, "compare");
    Get(p, "jobs", cfg.jobs, "compare");
  }
  return cfg;
}

std::vector<std::string> ParseManifest(std::string_view text) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    if (const std::size_t hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) {
      line.remove_suffix(1);
    }
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.front()))) {
      line.remove_prefix(1);
    }
    if (!line.empty()) out.emplace_back(line);
  }
  return out;
}

std::string FormatManifest(const std::vector<std::string>& ids) {
  std::string out;
  for (const auto& id : ids) {
    out += id;
    out += '\n';
  }
  return out;
}

int RunCommand(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Reuse of prior-processor tests for processor fuzzing", "ppreuse"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "ppreuse 0.1.0");

  std::function<int()> action;

  Common gen_c;
  std::string gen_out;
  bool gen_rcdb = false;
  auto* gen = app.add_subcommand("gen-synth", "Generate a synthetic suite");
  AddCommon(gen, gen_c, true);
  gen->add_option("--out", gen_out, "Output directory")->required();
  gen->add_flag("--rcdb", gen_rcdb, "Also write one coverage database per trainer test");
  gen->callback([&] { action = [&] { return CmdGenSynth(gen_c, gen_out, gen_rcdb, out); }; });

  std::vector<std::string> parse_in;
  std::string parse_out;
  auto* parse = app.add_subcommand("parse", "Parse coverage databases into a matrix");
  parse->add_option("inputs", parse_in, "Files or directories of .rcdb files")->required();
  parse->add_option("--out", parse_out, "Write the matrix here");
  parse->callback([&] { action = [&] { return CmdParse(parse_in, parse_out, out); }; });

  Common min_c;
  std::string min_matrix, min_out;
  std::vector<std::string> min_rcdb;
  bool min_greedy = false;
  auto* minimize = app.add_subcommand("minimize", "Minimize a test corpus");
  AddCommon(minimize, min_c, false);
  minimize->add_option("--matrix", min_matrix, "Serialized coverage matrix");
  minimize->add_option("--rcdb", min_rcdb, "Coverage database files or directories");
  minimize->add_option("--out", min_out, "Output directory")->required();
  minimize->add_flag("--greedy", min_greedy, "Use the greedy solver");
  minimize->callback([&] {
    action = [&] {
      return CmdMinimize(min_c, min_matrix, min_rcdb, min_out, min_greedy, out, err);
    };
  });

  Common tune_c;
  std::vector<std::string> tune_corpus;
  std::string tune_out;
  auto* tune = app.add_subcommand("tune", "Search adaptive thresholds per coverage level");
  AddCommon(tune, tune_c, true);
  tune->add_option("--corpus", tune_corpus, "Minimized corpus manifests");
  tune->add_option("--out", tune_out, "Threshold JSON")->required();
  tune->callback([&] { action = [&] { return CmdTune(tune_c, tune_corpus, tune_out, out, err); }; });

  Common train_c;
  TrainInputs train_in;
  std::string train_alg, train_out, train_log;
  bool train_no_tune = false;
  auto* train = app.add_subcommand("train", "Train a test-list model");
  AddCommon(train, train_c, true);
  train->add_option("--corpus", train_in.corpus, "Minimized corpus manifests");
  train->add_option("--vuln", train_in.vuln, "Vulnerability test manifests");
  train->add_option("--theta", train_in.theta_path, "Threshold JSON from tune");
  train->add_option("--algorithm", train_alg, "adaptive or original");
  train->add_flag("--no-tune", train_no_tune, "Skip threshold tuning");
  train->add_option("--out", train_out, "Model file")->required();
  train->add_option("--log", train_log, "Per-step training log (CSV)");
  train->callback([&] {
    action = [&] {
      return CmdTrain(train_c, train_in, train_alg, train_no_tune, train_out, train_log, out,
                      err);
    };
  });

  Common run_c;
  std::string run_model, run_out;
  bool run_native = false;
  std::uint64_t run_gamma = 3, run_m = 3000;
  std::vector<std::size_t> run_watch;
  auto* run = app.add_subcommand("run", "Run a campaign on the testing processor");
  AddCommon(run, run_c, true);
  run->add_option("--model", run_model, "Model file");
  run->add_flag("--native", run_native, "Native seeds only");
  auto* gamma_opt = run->add_option("--gamma", run_gamma, "Drop window");
  auto* m_opt = run->add_option("--m", run_m, "Iterations");
  run->add_option("--watch", run_watch, "Coverage points whose first hit is reported");
  run->add_option("--out", run_out, "Output directory")->required();
  run->callback([&] {
    action = [&] {
      return CmdRun(run_c, run_model, run_native, run_gamma, gamma_opt, run_m, m_opt, run_watch,
                    run_out, out);
    };
  });

  Common cmp_c;
  std::string cmp_out, cmp_strategies, cmp_thresholds, cmp_baseline;
  std::size_t cmp_seeds = 0, cmp_jobs = 0;
  std::uint64_t cmp_budget = 0;
  auto* compare = app.add_subcommand("compare", "Compare reuse strategies");
  AddCommon(compare, cmp_c, true);
  auto* strat_opt = compare->add_option("--strategies", cmp_strategies, "Comma-separated names");
  auto* seeds_opt = compare->add_option("--seeds", cmp_seeds, "Replicates");
  auto* budget_opt = compare->add_option("--budget", cmp_budget, "Iterations per run");
  auto* jobs_opt = compare->add_option("--jobs", cmp_jobs, "Worker threads");
  auto* thr_opt = compare->add_option("--thresholds", cmp_thresholds, "Comma-separated levels");
  auto* base_opt = compare->add_option("--baseline", cmp_baseline, "Speedup reference");
  compare->add_option("--out", cmp_out, "Output directory")->required();

  Common rep_c;
  std::string rep_traces, rep_out, rep_thresholds, rep_baseline;
  auto* report = app.add_subcommand("report", "Summarize a traces file");
  AddCommon(report, rep_c, false);
  report->add_option("--traces", rep_traces, "traces.csv from compare")->required();
  auto* rep_thr_opt = report->add_option("--thresholds", rep_thresholds, "Comma-separated levels");
  auto* rep_base_opt = report->add_option("--baseline", rep_baseline, "Speedup reference");
  report->add_option("--out", rep_out, "Output directory")->required();

  // compare and report take overrides on top of the config, so they build
  // the config here rather than in a Cmd* helper.
  auto overrides = [&](const Common& c, CLI::Option* thr, const std::string& thr_text,
                       CLI::Option* base, const std::string& base_text) {
    CliConfig cfg = LoadConfig(c);
    if (thr->count() > 0) cfg.thresholds = ParseNumberCsv(thr_text, "threshold");
    if (base->count() > 0) cfg.baseline = base_text;
    return cfg;
  };
  compare->callback([&] {
    action = [&] {
      CliConfig cfg = overrides(cmp_c, thr_opt, cmp_thresholds, base_opt, cmp_baseline);
      if (strat_opt->count() > 0) cfg.strategies = ParseStrategies(cmp_strategies);
      if (seeds_opt->count() > 0) cfg.seeds = cmp_seeds;
      if (budget_opt->count() > 0) cfg.budget = cmp_budget;
      if (jobs_opt->count() > 0) cfg.jobs = cmp_jobs;
      return CmdCompare(cfg, cmp_out, out);
    };
  });
  report->callback([&] {
    action = [&] {
      return CmdReport(overrides(rep_c, rep_thr_opt, rep_thresholds, rep_base_opt, rep_baseline),
                       rep_traces, rep_out, out);
    };
  });

  std::vector<std::string> argv_rev(args.rbegin(), args.rend());
  try {
    app.parse(argv_rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }
  try {
    return action ? action() : 2;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

int RunCommand(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return RunCommand(args, out, err);
}

}  // namespace ppreuse
