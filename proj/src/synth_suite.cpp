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
#include <cmath>
#include <cstdio>
#include <random>
#include <set>
#include <sstream>

#include "json.hpp"
#include "ppreuse/errors.hpp"
#include "ppreuse/rng.hpp"
#include "ppreuse/simharness.hpp"

namespace ppreuse {

namespace {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

constexpr std::array<std::string_view, kNumTiers> kTierNames = {"dead", "easy", "medium",
                                                                "hard", "unique"};

// Stream tags for hash-addressed randomness.
enum : std::uint64_t {
  kTagLatent = 0x6c6174,
  kTagTransfer = 0x747266,
  kTagJitter = 0x6a6974,
  kTagFresh = 0x667273,
  kTagKeep = 0x6b6570,
  kTagMutant = 0x6d7574,
  kTagNative = 0x6e6174,
};

// Family multipliers for easy, medium and hard base rates.
constexpr double kFamilyMult[3][3] = {
    {1.0, 1.0, 0.5},  // broad
    {1.0, 1.0, 1.0},  // corner
    {1.0, 1.0, 1.0},  // mixed
};

// Vulnerability tests are small directed programs.
constexpr double kVulnIntensity = 0.5;

double HashUnit(std::uint64_t h) { return static_cast<double>(Mix64(h) >> 11) * 0x1.0p-53; }

// Sets each point of `points` independently with probability p.
template <typename Engine>
void SampleGroup(const std::vector<std::size_t>& points, double p, Engine& g,
                 BitVector& out) {
  if (!(p > 0.0) || points.empty()) return;
  if (p >= 1.0) {
    for (std::size_t q : points) out.set(q);
    return;
  }
  const double lq = std::log1p(-p);
  auto skip = [&] { return std::floor(std::log(1.0 - Uniform01(g)) / lq); };
  double pos = skip();
  while (pos < static_cast<double>(points.size())) {
    out.set(points[static_cast<std::size_t>(pos)]);
    pos += 1.0 + skip();
  }
}

void CheckUnit(double v, const char* name) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw StructuralError(std::string(name) + " must lie in [0, 1]");
  }
}

void ValidateSpec(const SuiteSpec& s) {
  if (s.universe == 0 || s.modules == 0 || s.trainers == 0) {
    throw StructuralError("suite sizes must be positive");
  }
  if (s.modules > s.universe) throw StructuralError("more modules than coverage points");
  if (s.bases_per_trainer == 0) throw StructuralError("bases_per_trainer must be positive");
  if (s.tests_per_trainer < s.bases_per_trainer) {
    throw StructuralError("tests_per_trainer is smaller than bases_per_trainer");
  }
  double total = 0.0;
  for (std::size_t t = 0; t < kNumTiers; ++t) {
    const TierParams& p = s.tiers[t];
    CheckUnit(p.fraction, "tier fraction");
    CheckUnit(p.native_rate, "tier native_rate");
    CheckUnit(p.base_rate, "tier base_rate");
    CheckUnit(p.accept, "tier accept");
    total += p.fraction;
  }
  if (std::abs(total - 1.0) > 1e-6) throw StructuralError("tier fractions must sum to 1");
  CheckUnit(s.similarity, "similarity");
  CheckUnit(s.broad_share, "broad_share");
  CheckUnit(s.corner_share, "corner_share");
  if (s.broad_share + s.corner_share > 1.0 + 1e-9) {
    throw StructuralError("broad_share + corner_share exceeds 1");
  }
  CheckUnit(s.focus_rate, "focus_rate");
  CheckUnit(s.subset_keep, "subset_keep");
  CheckUnit(s.mutation_rate, "mutation_rate");
  CheckUnit(s.bug_hit_rate, "bug_hit_rate");
  CheckUnit(s.mutant_native, "mutant_native");
  if (!(s.intensity_sigma >= 0.0)) throw StructuralError("intensity_sigma must be >= 0");
  if (!(s.radius >= 1.0)) throw StructuralError("radius must be at least 1");
  if (!(s.decay > 0.0 && s.decay <= 1.0)) throw StructuralError("decay must lie in (0, 1]");
}

template <typename T>
void Take(json& obj, const char* key, T& out) {
  auto it = obj.find(key);
  if (it == obj.end()) return;
  try {
    out = it->get<T>();
  } catch (const json::exception&) {
    throw StructuralError(std::string("suite spec: bad value for '") + key + "'");
  }
  obj.erase(it);
}

void RejectRest(const json& obj, const std::string& where) {
  if (!obj.empty()) {
    throw StructuralError(where + ": unknown key '" + obj.begin().key() + "'");
  }
}

}  // namespace

std::string_view TierName(Tier tier) { return kTierNames[static_cast<std::size_t>(tier)]; }

std::string_view BaseFamilyName(BaseFamily family) {
  switch (family) {
    case BaseFamily::kBroad:
      return "broad";
    case BaseFamily::kCorner:
      return "corner";
    case BaseFamily::kMixed:
      return "mixed";
  }
  return "?";
}

SuiteSpec SuiteSpec::Preset(std::string_view name) {
  SuiteSpec s;
  if (name == "benchmark") return s;
  if (name == "distill") {
    s.trainers = 1;
    s.tests_per_trainer = 1000;
    s.bases_per_trainer = 50;
    s.vuln_tests = 0;
    return s;
  }
  throw StructuralError("unknown suite preset '" + std::string(name) + "'");
}

SuiteSpec ParseSuiteSpec(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(0, std::string("suite spec is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw StructuralError("suite spec must be a JSON object");
  SuiteSpec s;
  std::string preset = "benchmark";
  Take(doc, "preset", preset);
  s = SuiteSpec::Preset(preset);
  Take(doc, "seed", s.seed);
  Take(doc, "universe", s.universe);
  Take(doc, "modules", s.modules);
  Take(doc, "trainers", s.trainers);
  Take(doc, "tests_per_trainer", s.tests_per_trainer);
  Take(doc, "bases_per_trainer", s.bases_per_trainer);
  Take(doc, "vuln_tests", s.vuln_tests);
  Take(doc, "similarity", s.similarity);
  Take(doc, "broad_share", s.broad_share);
  Take(doc, "corner_share", s.corner_share);
  Take(doc, "focus_rate", s.focus_rate);
  Take(doc, "intensity_sigma", s.intensity_sigma);
  Take(doc, "subset_keep", s.subset_keep);
  Take(doc, "mutation_rate", s.mutation_rate);
  Take(doc, "radius", s.radius);
  Take(doc, "decay", s.decay);
  Take(doc, "bug_hit_rate", s.bug_hit_rate);
  Take(doc, "mutant_native", s.mutant_native);
  Take(doc, "baseline_cap", s.baseline_cap);
  if (auto it = doc.find("tiers"); it != doc.end()) {
    json tiers = *it;
    doc.erase(it);
    if (!tiers.is_object()) throw StructuralError("suite spec: tiers must be an object");
    for (std::size_t t = 0; t < kNumTiers; ++t) {
      auto ti = tiers.find(std::string(kTierNames[t]));
      if (ti == tiers.end()) continue;
      json tier = *ti;
      tiers.erase(ti);
      if (!tier.is_object()) throw StructuralError("suite spec: tier entries must be objects");
      Take(tier, "fraction", s.tiers[t].fraction);
      Take(tier, "native_rate", s.tiers[t].native_rate);
      Take(tier, "base_rate", s.tiers[t].base_rate);
      Take(tier, "accept", s.tiers[t].accept);
      RejectRest(tier, "suite spec tier " + std::string(kTierNames[t]));
    }
    RejectRest(tiers, "suite spec tiers");
  }
  RejectRest(doc, "suite spec");
  ValidateSpec(s);
  return s;
}

std::string FormatSuiteSpec(const SuiteSpec& s) {
  ojson doc;
  doc["seed"] = s.seed;
  doc["universe"] = s.universe;
  doc["modules"] = s.modules;
  doc["trainers"] = s.trainers;
  doc["tests_per_trainer"] = s.tests_per_trainer;
  doc["bases_per_trainer"] = s.bases_per_trainer;
  doc["vuln_tests"] = s.vuln_tests;
  doc["similarity"] = s.similarity;
  ojson tiers;
  for (std::size_t t = 0; t < kNumTiers; ++t) {
    tiers[std::string(kTierNames[t])] = {{"fraction", s.tiers[t].fraction},
                                         {"native_rate", s.tiers[t].native_rate},
                                         {"base_rate", s.tiers[t].base_rate},
                                         {"accept", s.tiers[t].accept}};
  }
  doc["tiers"] = std::move(tiers);
  doc["broad_share"] = s.broad_share;
  doc["corner_share"] = s.corner_share;
  doc["focus_rate"] = s.focus_rate;
  doc["intensity_sigma"] = s.intensity_sigma;
  doc["subset_keep"] = s.subset_keep;
  doc["mutation_rate"] = s.mutation_rate;
  doc["radius"] = s.radius;
  doc["decay"] = s.decay;
  doc["bug_hit_rate"] = s.bug_hit_rate;
  doc["mutant_native"] = s.mutant_native;
  doc["baseline_cap"] = s.baseline_cap;
  return doc.dump(2) + "\n";
}

SyntheticSuite SyntheticSuite::Generate(const SuiteSpec& spec) {
  ValidateSpec(spec);
  SyntheticSuite s;
  s.spec_ = spec;
  Rng rng(DeriveSeed({spec.seed, 0x7375697465}));
  const std::size_t n = spec.universe;

  // Modules and point ids.
  s.module_of_.resize(n);
  std::size_t start = 0;
  for (std::size_t m = 0; m < spec.modules; ++m) {
    const std::size_t size = n / spec.modules + (m < n % spec.modules ? 1 : 0);
    s.module_start_.push_back(start);
    s.module_size_.push_back(size);
    char name[16];
    std::snprintf(name, sizeof(name), "m%02zu", m);
    for (std::size_t i = 0; i < size; ++i) {
      s.module_of_[start + i] = m;
      s.universe_.push_back(CoveragePointId{{"core", name}, static_cast<std::uint32_t>(i)});
    }
    start += size;
  }

  // Tiers form contiguous blocks inside each module: easy, medium, then hard
  // with the unique points spread through it, then dead. A mutant's
  // neighbours mostly share its parent's tier, and moved hard hits can land
  // on unique points.
  s.tiers_.assign(n, Tier::kDead);
  constexpr std::array<Tier, kNumTiers> kLayout = {Tier::kEasy, Tier::kMedium, Tier::kHard,
                                                   Tier::kUnique, Tier::kDead};
  for (std::size_t m = 0; m < spec.modules; ++m) {
    const std::size_t size = s.module_size_[m];
    std::array<std::size_t, kNumTiers> counts{};
    std::array<double, kNumTiers> rem{};
    std::size_t used = 0;
    for (std::size_t t = 0; t < kNumTiers; ++t) {
      const double exact = spec.tiers[t].fraction * static_cast<double>(size);
      counts[t] = static_cast<std::size_t>(std::floor(exact));
      rem[t] = exact - std::floor(exact);
      used += counts[t];
    }
    // Largest remainder, ties to the lower tier index.
    while (used < size) {
      std::size_t best = 0;
      for (std::size_t t = 1; t < kNumTiers; ++t) {
        if (rem[t] > rem[best]) best = t;
      }
      ++counts[best];
      rem[best] = -1.0;
      ++used;
    }
    std::size_t q = s.module_start_[m];
    for (Tier t : kLayout) {
      for (std::size_t i = 0; i < counts[static_cast<std::size_t>(t)]; ++i) s.tiers_[q++] = t;
    }
    const std::size_t hard = counts[static_cast<std::size_t>(Tier::kHard)];
    const std::size_t unique = counts[static_cast<std::size_t>(Tier::kUnique)];
    const std::size_t deep = s.module_start_[m] + counts[static_cast<std::size_t>(Tier::kEasy)] +
                             counts[static_cast<std::size_t>(Tier::kMedium)];
    for (std::size_t i = 0; i < hard + unique; ++i) {
      const bool u = (i + 1) * unique / (hard + unique) > i * unique / (hard + unique);
      s.tiers_[deep + i] = u ? Tier::kUnique : Tier::kHard;
    }
  }
  s.groups_.assign(spec.modules * kNumTiers, {});
  for (std::size_t q = 0; q < n; ++q) {
    s.groups_[s.module_of_[q] * kNumTiers + static_cast<std::size_t>(s.tiers_[q])].push_back(q);
  }

  for (std::size_t t = 0; t < spec.trainers; ++t) s.processors_.push_back("pp" + std::to_string(t));
  s.processors_.emplace_back(kTestingPut);

  std::normal_distribution<double> normal(0.0, 1.0);
  auto make_base = [&](std::size_t trainer, std::string id, std::optional<BaseFamily> forced) {
    BaseInfo b;
    b.id = std::move(id);
    b.trainer = trainer;
    if (forced) {
      b.family = *forced;
    } else {
      const double u = Uniform01(rng);
      b.family = u < spec.broad_share                       ? BaseFamily::kBroad
                 : u < spec.broad_share + spec.corner_share ? BaseFamily::kCorner
                                                            : BaseFamily::kMixed;
    }
    const double sigma = spec.intensity_sigma;
    b.intensity = std::exp(sigma * normal(rng) - 0.5 * sigma * sigma);
    if (forced) b.intensity = kVulnIntensity;
    const std::size_t focus = b.family == BaseFamily::kCorner  ? 2
                              : b.family == BaseFamily::kMixed ? 1
                                                               : 0;
    std::vector<std::size_t> mods(spec.modules);
    for (std::size_t m = 0; m < spec.modules; ++m) mods[m] = m;
    for (std::size_t i = 0; i < std::min(focus, mods.size()); ++i) {
      const std::size_t j = i + UniformIndex(rng, mods.size() - i);
      std::swap(mods[i], mods[j]);
      b.focus_modules.push_back(mods[i]);
    }
    std::sort(b.focus_modules.begin(), b.focus_modules.end());
    s.bases_.push_back(std::move(b));
    return s.bases_.size() - 1;
  };

  // Per-trainer corpora: the bases themselves plus random subsets of them.
  std::vector<SuiteTest> tests;
  for (std::size_t t = 0; t < spec.trainers; ++t) {
    std::vector<std::size_t> ids(spec.tests_per_trainer);
    for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = i;
    std::shuffle(ids.begin(), ids.end(), rng);
    auto test_name = [&](std::size_t i) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "pp%zu-%04zu", t, ids[i]);
      return std::string(buf);
    };
    std::vector<std::size_t> trainer_bases;
    for (std::size_t i = 0; i < spec.bases_per_trainer; ++i) {
      const std::string id = test_name(i);
      trainer_bases.push_back(make_base(t, id, std::nullopt));
      tests.push_back(SuiteTest{id, t, trainer_bases.back(), TestKind::kCoverage, 1.0, {}});
    }
    std::uniform_real_distribution<double> keep(spec.subset_keep, 1.0);
    for (std::size_t i = spec.bases_per_trainer; i < spec.tests_per_trainer; ++i) {
      const std::size_t base = trainer_bases[UniformIndex(rng, trainer_bases.size())];
      tests.push_back(SuiteTest{test_name(i), t, base, TestKind::kCoverage, keep(rng), {}});
    }
  }

  // Vulnerability tests, each with a planted bug point on the testing side.
  std::vector<std::size_t> bug_pool;
  for (std::size_t q = 0; q < n; ++q) {
    if (s.tiers_[q] == Tier::kUnique) bug_pool.push_back(q);
  }
  std::shuffle(bug_pool.begin(), bug_pool.end(), rng);
  for (std::size_t v = 0; v < spec.vuln_tests; ++v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "vuln-%02zu", v);
    const std::size_t trainer = v % spec.trainers;
    const std::size_t base = make_base(trainer, buf, BaseFamily::kCorner);
    SuiteTest test{buf, trainer, base, TestKind::kVulnerability, 1.0, {}};
    if (!bug_pool.empty()) test.bug_point = bug_pool[v % bug_pool.size()];
    tests.push_back(std::move(test));
  }
  std::shuffle(tests.begin(), tests.end(), rng);
  s.tests_ = std::move(tests);
  for (std::size_t i = 0; i < s.tests_.size(); ++i) s.test_index_.emplace(s.tests_[i].id, i);

  // Base rows on every processor.
  const std::size_t np = s.processors_.size();
  s.base_rows_.resize(s.bases_.size());
  for (std::size_t b = 0; b < s.bases_.size(); ++b) {
    const BaseInfo& base = s.bases_[b];
    const BitVector latent = s.LatentRow(base, b);
    for (std::size_t p = 0; p < np; ++p) {
      BitVector row;
      if (p == base.trainer) {
        row = latent;
      } else if (HashUnit(DeriveSeed({spec.seed, kTagTransfer, b, p})) < spec.similarity) {
        row = latent;
        s.Jitter(row, DeriveSeed({spec.seed, kTagJitter, b, p}));
      } else {
        row = s.NativeLike(DeriveSeed({spec.seed, kTagFresh, b, p}));
      }
      s.MaskDead(p, row);
      s.base_rows_[b].push_back(std::move(row));
    }
  }
  return s;
}

BitVector SyntheticSuite::LatentRow(const BaseInfo& base, std::uint64_t tag) const {
  SplitMix64 g(DeriveSeed({spec_.seed, kTagLatent, tag}));
  BitVector row(spec_.universe);
  const std::size_t fam = static_cast<std::size_t>(base.family);
  for (std::size_t m = 0; m < spec_.modules; ++m) {
    const bool focus = std::binary_search(base.focus_modules.begin(),
                                          base.focus_modules.end(), m);
    for (std::size_t t = 1; t < kNumTiers; ++t) {
      double rate = spec_.tiers[t].base_rate * base.intensity;
      if (t <= 3) rate *= kFamilyMult[fam][t - 1];
      if (focus && static_cast<Tier>(t) == Tier::kHard) {
        rate = spec_.focus_rate * base.intensity *
               (base.family == BaseFamily::kCorner ? 1.0 : 0.5);
      }
      SampleGroup(groups_[m * kNumTiers + t], std::min(rate, 0.95), g, row);
    }
  }
  return row;
}

BitVector SyntheticSuite::NativeLike(std::uint64_t seed) const {
  SplitMix64 g(seed);
  BitVector row(spec_.universe);
  for (std::size_t m = 0; m < spec_.modules; ++m) {
    for (std::size_t t = 1; t < kNumTiers; ++t) {
      SampleGroup(groups_[m * kNumTiers + t], spec_.tiers[t].native_rate, g, row);
    }
  }
  return row;
}

void SyntheticSuite::Jitter(BitVector& row, std::uint64_t seed) const {
  const double rate = (1.0 - spec_.similarity) / 2.0;
  if (!(rate > 0.0)) return;
  SplitMix64 g(seed);
  const BitVector original = row;
  original.for_each_set([&](std::size_t q) {
    if (Uniform01(g) >= rate) return;
    const auto& group =
        groups_[module_of_[q] * kNumTiers + static_cast<std::size_t>(tiers_[q])];
    row.reset(q);
    row.set(group[UniformIndex(g, group.size())]);
  });
}

bool SyntheticSuite::IsLive(std::size_t processor, std::size_t point) const {
  switch (tiers_[point]) {
    case Tier::kDead:
      return false;
    case Tier::kUnique:
      return processor + 1 == processors_.size();
    default:
      return true;
  }
}

void SyntheticSuite::MaskDead(std::size_t processor, BitVector& row) const {
  const BitVector original = row;
  original.for_each_set([&](std::size_t q) {
    if (!IsLive(processor, q)) row.reset(q);
  });
}

std::vector<std::string> SyntheticSuite::trainer_names() const {
  return std::vector<std::string>(processors_.begin(), processors_.end() - 1);
}

std::size_t SyntheticSuite::ProcessorIndex(std::string_view name) const {
  for (std::size_t p = 0; p < processors_.size(); ++p) {
    if (processors_[p] == name) return p;
  }
  throw StructuralError("unknown processor '" + std::string(name) + "'");
}

const SuiteTest& SyntheticSuite::test(std::string_view id) const {
  auto it = test_index_.find(std::string(id));
  if (it == test_index_.end()) throw StructuralError("unknown test '" + std::string(id) + "'");
  return tests_[it->second];
}

std::vector<std::string> SyntheticSuite::CoverageTests(std::optional<std::size_t> trainer) const {
  std::vector<std::string> out;
  for (const auto& t : tests_) {
    if (t.kind == TestKind::kCoverage && (!trainer || t.origin == *trainer)) out.push_back(t.id);
  }
  return out;
}

std::vector<std::string> SyntheticSuite::VulnerabilityTests() const {
  std::vector<std::string> out;
  for (const auto& t : tests_) {
    if (t.kind == TestKind::kVulnerability) out.push_back(t.id);
  }
  return out;
}

BitVector SyntheticSuite::Row(std::size_t processor, std::string_view test_id,
                              std::uint64_t mutant) const {
  if (processor >= processors_.size()) throw StructuralError("processor index out of range");
  auto found = test_index_.find(std::string(test_id));
  if (found == test_index_.end()) {
    throw StructuralError("unknown test '" + std::string(test_id) + "'");
  }
  const std::size_t index = found->second;
  const SuiteTest& t = tests_[index];
  BitVector row = base_rows_[t.base][processor];
  if (t.keep < 1.0) {
    const std::uint64_t h = DeriveSeed({spec_.seed, kTagKeep, index});
    const BitVector full = row;
    full.for_each_set([&](std::size_t q) {
      if (HashUnit(h ^ Mix64(q)) >= t.keep) row.reset(q);
    });
  }
  if (mutant == 0) return row;

  SplitMix64 g(DeriveSeed({spec_.seed, kTagMutant, index, processor, mutant}));
  const double r = spec_.radius * std::pow(spec_.decay, static_cast<double>(mutant - 1));
  const std::size_t radius = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(r)));
  BitVector out = row;
  row.for_each_set([&](std::size_t q) {
    if (Uniform01(g) >= spec_.mutation_rate) return;
    out.reset(q);
    const std::size_t m = module_of_[q];
    const std::size_t size = module_size_[m];
    const std::size_t local = q - module_start_[m];
    const std::size_t off = 1 + UniformIndex(g, radius) % size;
    const std::size_t moved = Uniform01(g) < 0.5 ? (local + off) % size
                                                 : (local + size - off % size) % size;
    const std::size_t target = module_start_[m] + moved;
    if (IsLive(processor, target) &&
        Uniform01(g) < spec_.tiers[static_cast<std::size_t>(tiers_[target])].accept) {
      out.set(target);
    }
  });
  if (Uniform01(g) < spec_.mutant_native) {
    BitVector fresh =
        NativeLike(DeriveSeed({spec_.seed, kTagMutant, index, processor, mutant, 1}));
    MaskDead(processor, fresh);
    out |= fresh;
  }
  if (t.bug_point && processor + 1 == processors_.size() &&
      Uniform01(g) < spec_.bug_hit_rate) {
    out.set(*t.bug_point);
  }
  return out;
}

BitVector SyntheticSuite::Row(std::string_view processor, std::string_view test_id,
                              std::uint64_t mutant) const {
  return Row(ProcessorIndex(processor), test_id, mutant);
}

BitVector SyntheticSuite::NativeRow(std::size_t processor, std::uint64_t stream,
                                    std::uint64_t n) const {
  BitVector row = NativeLike(DeriveSeed({spec_.seed, kTagNative, processor, stream, n}));
  MaskDead(processor, row);
  return row;
}

CoverageMatrix SyntheticSuite::TrainerMatrix(std::size_t trainer) const {
  std::vector<CoverageRow> rows;
  for (const auto& id : CoverageTests(trainer)) rows.push_back(CoverageRow{id, Row(trainer, id)});
  return CoverageMatrix(universe_, std::move(rows));
}

std::vector<CoveredSet> SyntheticSuite::BaselineTrace(std::size_t processor,
                                                      double stop_level) const {
  std::vector<CoveredSet> trace;
  CoveredSet covered(spec_.universe);
  for (std::uint64_t i = 0; i < spec_.baseline_cap; ++i) {
    MergeInto(covered, NativeRow(processor, 1, i));
    trace.push_back(covered);
    if (TotalCoverage(covered) >= stop_level) break;
  }
  return trace;
}

std::string SyntheticSuite::ManifestJson() const {
  ojson doc;
  doc["spec"] = ojson::parse(FormatSuiteSpec(spec_));
  doc["processors"] = processors_;
  std::string tiers;
  std::array<std::size_t, kNumTiers> counts{};
  for (Tier t : tiers_) {
    tiers += static_cast<char>('0' + static_cast<int>(t));
    ++counts[static_cast<std::size_t>(t)];
  }
  ojson tc;
  for (std::size_t t = 0; t < kNumTiers; ++t) tc[std::string(kTierNames[t])] = counts[t];
  doc["tier_counts"] = std::move(tc);
  // One digit per point: 0 dead, 1 easy, 2 medium, 3 hard, 4 unique.
  doc["tiers"] = tiers;
  ojson bases = ojson::array();
  for (const auto& b : bases_) {
    bases.push_back({{"id", b.id},
                     {"trainer", processors_[b.trainer]},
                     {"family", BaseFamilyName(b.family)},
                     {"intensity", b.intensity},
                     {"focus_modules", b.focus_modules}});
  }
  doc["bases"] = std::move(bases);
  ojson tests = ojson::array();
  for (const auto& t : tests_) {
    ojson item{{"id", t.id},
               {"origin", processors_[t.origin]},
               {"kind", TestKindName(t.kind)},
               {"base", bases_[t.base].id},
               {"keep", t.keep}};
    if (t.bug_point) item["bug_point"] = *t.bug_point;
    tests.push_back(std::move(item));
  }
  doc["tests"] = std::move(tests);
  ojson bound;
  for (std::size_t t = 0; t + 1 < processors_.size(); ++t) {
    bound[processors_[t]] = spec_.bases_per_trainer;
  }
  // A trainer's minimized corpus never needs more tests than this.
  doc["minimized_upper_bound"] = std::move(bound);
  return doc.dump(2) + "\n";
}

SyntheticFuzzer::SyntheticFuzzer(const SyntheticSuite& suite, std::string_view processor,
                                 std::uint64_t native_stream)
    : suite_(suite),
      processor_(suite.ProcessorIndex(processor)),
      native_stream_(native_stream) {}

std::string SyntheticFuzzer::Load(const std::string& test_id) { return "pp " + test_id; }

std::string SyntheticFuzzer::Mutate(const std::string& test_id, std::uint64_t index) {
  return "mut " + test_id + " " + std::to_string(index);
}

std::string SyntheticFuzzer::GenerateNative() {
  return "native " + std::to_string(next_native_++);
}

BitVector SyntheticFuzzer::Execute(const std::string& payload) {
  ++executions_;
  std::istringstream in(payload);
  std::string kind, id;
  in >> kind;
  try {
    if (kind == "pp" && in >> id) return suite_.Row(processor_, id, 0);
    std::uint64_t n = 0;
    if (kind == "mut" && in >> id >> n && n > 0) return suite_.Row(processor_, id, n);
    if (kind == "native" && in >> n) return suite_.NativeRow(processor_, native_stream_, n);
  } catch (const StructuralError& e) {
    throw ExecutionError(e.what());
  }
  throw ExecutionError("malformed payload '" + payload + "'");
}

}  // namespace ppreuse
