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

// Model file: a versioned JSON document. Keys are emitted in a fixed order
// (levels descending) and the checksum covers the compact dump of
// everything except the checksum itself.

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "ppreuse/errors.hpp"
#include "ppreuse/trainer.hpp"

namespace ppreuse {

namespace {

using ojson = nlohmann::ordered_json;

constexpr double kMassTolerance = 1e-6;

std::string Checksum(const ojson& body) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(HashString(body.dump())));
  return std::string("fnv1a64:") + buf;
}

ojson ListToJson(const TrainedList& list) {
  ojson arr = ojson::array();
  for (const auto& e : list.entries) {
    ojson item;
    item["test_id"] = e.test_id;
    item["prob"] = e.prob;
    arr.push_back(std::move(item));
  }
  return arr;
}

void RequireKeys(const ojson& obj, std::initializer_list<const char*> keys,
                 const std::string& where) {
  if (!obj.is_object()) throw ModelError(where + " must be an object");
  std::set<std::string> allowed(keys.begin(), keys.end());
  for (const char* k : keys) {
    if (!obj.contains(k)) throw ModelError(where + " is missing '" + k + "'");
  }
  for (const auto& [k, v] : obj.items()) {
    if (!allowed.count(k)) throw ModelError(where + " has unknown key '" + k + "'");
  }
}

TrainedList ListFromJson(const ojson& arr, double context, TestKind kind,
                         const std::string& where) {
  if (!arr.is_array()) throw ModelError(where + " must be an array");
  TrainedList list;
  list.context = context;
  list.kind = kind;
  std::set<std::string> seen;
  double sum = 0.0;
  for (const auto& item : arr) {
    RequireKeys(item, {"test_id", "prob"}, where + " entry");
    if (!item["test_id"].is_string() || !item["prob"].is_number()) {
      throw ModelError(where + " entry has the wrong value types");
    }
    ListEntry e{item["test_id"].get<std::string>(), item["prob"].get<double>()};
    if (!(e.prob > 0.0) || !std::isfinite(e.prob)) {
      throw ModelError(where + ": probability of '" + e.test_id + "' is not positive");
    }
    if (!seen.insert(e.test_id).second) {
      throw ModelError(where + ": duplicate test '" + e.test_id + "'");
    }
    sum += e.prob;
    list.entries.push_back(std::move(e));
  }
  if (!list.entries.empty() && std::abs(sum - 1.0) > kMassTolerance) {
    throw ModelError(where + ": probabilities sum to " + std::to_string(sum) +
                     ", not 1");
  }
  return list;
}

double NumberAt(const ojson& obj, const char* key, const std::string& where) {
  if (!obj[key].is_number()) throw ModelError(where + "." + key + " must be a number");
  return obj[key].get<double>();
}

std::uint64_t UintAt(const ojson& obj, const char* key, const std::string& where) {
  if (!obj[key].is_number_unsigned()) {
    throw ModelError(where + "." + key + " must be a non-negative integer");
  }
  return obj[key].get<std::uint64_t>();
}

}  // namespace

std::string FormatLevel(double level) {
  if (level == std::floor(level) && std::abs(level) < 1e15) {
    return std::to_string(static_cast<long long>(level));
  }
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), level);
  return std::string(buf, ptr);
}

double ParseLevel(std::string_view text) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v)) {
    throw ModelError("bad coverage level '" + std::string(text) + "'");
  }
  return v;
}

std::string SerializeModel(const TestListModel& model) {
  ojson doc;
  doc["schema_version"] = kModelSchemaVersion;
  ojson params;
  params["k"] = model.params.k;
  params["gamma"] = model.params.gamma;
  params["epsilon"] = model.params.epsilon;
  params["n"] = model.params.n;
  params["f"] = model.params.f;
  ojson theta = ojson::object();
  for (const auto& [level, t] : model.params.theta) theta[FormatLevel(level)] = t;
  params["theta"] = std::move(theta);
  doc["params"] = std::move(params);
  ojson contexts = ojson::array();
  for (double c : model.contexts) contexts.push_back(c);
  doc["contexts"] = std::move(contexts);
  doc["vulnerability_list"] = ListToJson(model.vulnerability_list);
  ojson lists = ojson::object();
  for (double c : model.contexts) {
    auto it = model.coverage_lists.find(c);
    lists[FormatLevel(c)] =
        it == model.coverage_lists.end() ? ojson::array() : ListToJson(it->second);
  }
  doc["coverage_lists"] = std::move(lists);
  doc["checksum"] = Checksum(doc);
  return doc.dump(2) + "\n";
}

TestListModel ParseModel(std::string_view text) {
  ojson doc;
  try {
    doc = ojson::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ModelError(std::string("model is not valid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("schema_version")) {
    throw ModelError("model has no schema_version");
  }
  if (doc["schema_version"] != kModelSchemaVersion) {
    throw ModelError("unsupported model schema_version " + doc["schema_version"].dump());
  }
  RequireKeys(doc,
              {"schema_version", "params", "contexts", "vulnerability_list",
               "coverage_lists", "checksum"},
              "model");
  ojson body = doc;
  body.erase("checksum");
  if (!doc["checksum"].is_string() || doc["checksum"].get<std::string>() != Checksum(body)) {
    throw ModelError("model checksum mismatch");
  }

  TestListModel model;
  const ojson& params = doc["params"];
  RequireKeys(params, {"k", "gamma", "epsilon", "n", "f", "theta"}, "params");
  model.params.k = UintAt(params, "k", "params");
  model.params.gamma = UintAt(params, "gamma", "params");
  model.params.epsilon = NumberAt(params, "epsilon", "params");
  model.params.n = UintAt(params, "n", "params");
  model.params.f = NumberAt(params, "f", "params");
  if (!params["theta"].is_object()) throw ModelError("params.theta must be an object");
  for (const auto& [key, value] : params["theta"].items()) {
    if (!value.is_number()) throw ModelError("params.theta values must be numbers");
    model.params.theta.emplace(ParseLevel(key), value.get<double>());
  }

  if (!doc["contexts"].is_array()) throw ModelError("contexts must be an array");
  for (const auto& c : doc["contexts"]) {
    if (!c.is_number()) throw ModelError("contexts must hold numbers");
    const double level = c.get<double>();
    if (!model.contexts.empty() && !(level < model.contexts.back())) {
      throw ModelError("contexts must be strictly descending");
    }
    model.contexts.push_back(level);
  }

  model.vulnerability_list = ListFromJson(doc["vulnerability_list"], 0.0,
                                          TestKind::kVulnerability, "vulnerability_list");
  const ojson& lists = doc["coverage_lists"];
  if (!lists.is_object()) throw ModelError("coverage_lists must be an object");
  if (lists.size() != model.contexts.size()) {
    throw ModelError("coverage_lists and contexts disagree");
  }
  for (const auto& [key, value] : lists.items()) {
    const double level = ParseLevel(key);
    if (std::find(model.contexts.begin(), model.contexts.end(), level) ==
        model.contexts.end()) {
      throw ModelError("coverage list for unknown context " + key);
    }
    model.coverage_lists.emplace(
        level, ListFromJson(value, level, TestKind::kCoverage, "coverage_lists." + key));
  }
  return model;
}

void SaveModel(const TestListModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out << SerializeModel(model);
  if (!out) throw Error("failed writing '" + path + "'");
}

TestListModel LoadModel(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ParseModel(ss.str());
}

}  // namespace ppreuse
