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

#include "ppreuse/coverage.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <set>

#include "ppreuse/errors.hpp"

namespace ppreuse {

namespace {

std::vector<std::string> SplitPath(std::string_view path, std::size_t line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t dot = path.find('.', start);
    const std::string_view seg = path.substr(
        start, dot == std::string_view::npos ? std::string_view::npos : dot - start);
    if (seg.empty()) throw ParseError(line, "empty module path segment");
    out.emplace_back(seg);
    if (dot == std::string_view::npos) break;
    start = dot + 1;
  }
  return out;
}

std::vector<std::string_view> Tokens(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    if (i >= line.size()) break;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
    out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

void CheckSameLength(const BitVector& a, const BitVector& b) {
  if (a.size() != b.size()) {
    throw StructuralError("universe mismatch: " + std::to_string(a.size()) +
                          " vs " + std::to_string(b.size()) + " points");
  }
}

}  // namespace

std::string CoveragePointId::module_path() const {
  std::string out;
  for (std::size_t i = 0; i < hier_path.size(); ++i) {
    if (i > 0) out += '.';
    out += hier_path[i];
  }
  return out;
}

std::string CoveragePointId::str() const {
  return module_path() + ":" + std::to_string(local_index);
}

std::string_view TestKindName(TestKind kind) {
  return kind == TestKind::kVulnerability ? "vulnerability" : "coverage";
}

TestKind ParseTestKind(std::string_view name) {
  if (name == "vulnerability") return TestKind::kVulnerability;
  if (name == "coverage") return TestKind::kCoverage;
  throw ParseError(0, "unknown test kind '" + std::string(name) + "'");
}

CoverageMatrix::CoverageMatrix(Universe universe, std::vector<CoverageRow> rows)
    : universe_(std::move(universe)), rows_(std::move(rows)) {
  std::set<CoveragePointId> seen;
  for (const auto& id : universe_) {
    if (!seen.insert(id).second) {
      throw StructuralError("conflicting point id " + id.str() +
                            " appears twice in the universe");
    }
  }
  for (const auto& row : rows_) {
    if (row.bits.size() != universe_.size()) {
      throw StructuralError("row '" + row.test_id + "' has " +
                            std::to_string(row.bits.size()) + " bits over a " +
                            std::to_string(universe_.size()) + "-point universe");
    }
  }
}

std::optional<std::size_t> CoverageMatrix::find(std::string_view test_id) const {
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    if (rows_[i].test_id == test_id) return i;
  }
  return std::nullopt;
}

std::vector<std::size_t> CoverageMatrix::column_counts() const {
  std::vector<std::size_t> counts(universe_.size(), 0);
  for (const auto& row : rows_) {
    row.bits.for_each_set([&](std::size_t j) { ++counts[j]; });
  }
  return counts;
}

BitVector CoverageMatrix::union_bits() const {
  BitVector out(universe_.size());
  for (const auto& row : rows_) out |= row.bits;
  return out;
}

ParsedCoverage ParseCoverageDb(std::string_view text, std::string test_id) {
  ParsedCoverage out;
  out.row.test_id = std::move(test_id);
  std::vector<bool> hits;
  std::set<CoveragePointId> seen;
  std::optional<std::vector<std::string>> scope;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') {
      throw ParseError(line_no, "CR line ending");
    }
    const auto tok = Tokens(line);
    if (tok.empty() || tok[0].front() == '#') continue;

    if (tok[0] == "module") {
      if (tok.size() != 2) throw ParseError(line_no, "expected 'module <path>'");
      scope = SplitPath(tok[1], line_no);
    } else if (tok[0] == "point") {
      if (tok.size() != 3) throw ParseError(line_no, "expected 'point <index> <0|1>'");
      if (!scope) throw ParseError(line_no, "point outside of a module scope");
      std::uint32_t index = 0;
      const auto [ptr, ec] =
          std::from_chars(tok[1].data(), tok[1].data() + tok[1].size(), index);
      if (ec != std::errc() || ptr != tok[1].data() + tok[1].size()) {
        throw ParseError(line_no, "bad point index '" + std::string(tok[1]) + "'");
      }
      if (tok[2] != "0" && tok[2] != "1") {
        throw ParseError(line_no, "hit flag must be 0 or 1");
      }
      CoveragePointId id{*scope, index};
      if (!seen.insert(id).second) {
        throw StructuralError("line " + std::to_string(line_no) +
                              ": duplicate point " + id.str());
      }
      out.universe.push_back(std::move(id));
      hits.push_back(tok[2] == "1");
    } else {
      throw ParseError(line_no, "unknown directive '" + std::string(tok[0]) + "'");
    }
  }

  out.row.bits = BitVector(hits.size());
  for (std::size_t i = 0; i < hits.size(); ++i) {
    if (hits[i]) out.row.bits.set(i);
  }
  return out;
}

std::string FormatCoverageDb(const Universe& universe, const BitVector& bits,
                             std::string_view comment) {
  std::string out;
  if (!comment.empty()) {
    out += "# ";
    out += comment;
    out += '\n';
  }
  std::string current;
  for (std::size_t i = 0; i < universe.size(); ++i) {
    const std::string path = universe[i].module_path();
    if (i == 0 || path != current) {
      out += "module " + path + "\n";
      current = path;
    }
    out += "point " + std::to_string(universe[i].local_index) +
           (bits.test(i) ? " 1\n" : " 0\n");
  }
  return out;
}

CoverageMatrix BuildMatrix(std::span<const ParsedCoverage> rows) {
  if (rows.empty()) return CoverageMatrix();

  bool shared = true;
  for (const auto& r : rows) {
    if (r.row.bits.size() != r.universe.size()) {
      throw StructuralError("row '" + r.row.test_id + "' length differs from its universe");
    }
    if (r.universe != rows.front().universe) shared = false;
  }

  if (shared) {
    std::vector<CoverageRow> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(r.row);
    return CoverageMatrix(rows.front().universe, std::move(out));
  }

  std::map<CoveragePointId, std::size_t> column;
  for (const auto& r : rows) {
    std::set<CoveragePointId> local;
    for (const auto& id : r.universe) {
      if (!local.insert(id).second) {
        throw StructuralError("row '" + r.row.test_id + "' repeats point " + id.str());
      }
      column.emplace(id, 0);
    }
  }
  Universe universe;
  universe.reserve(column.size());
  for (auto& [id, col] : column) {
    col = universe.size();
    universe.push_back(id);
  }

  std::vector<CoverageRow> out;
  out.reserve(rows.size());
  for (const auto& r : rows) {
    CoverageRow row{r.row.test_id, BitVector(universe.size())};
    for (std::size_t i = 0; i < r.universe.size(); ++i) {
      if (r.row.bits.test(i)) row.bits.set(column.at(r.universe[i]));
    }
    out.push_back(std::move(row));
  }
  return CoverageMatrix(std::move(universe), std::move(out));
}

std::string SerializeMatrix(const CoverageMatrix& matrix) {
  std::string out = "ppreuse-matrix 1\n";
  out += "universe " + std::to_string(matrix.num_points()) + "\n";
  for (const auto& id : matrix.universe()) {
    out += "p " + id.module_path() + " " + std::to_string(id.local_index) + "\n";
  }
  for (const auto& row : matrix.rows()) {
    out += "row " + row.test_id + " " + row.bits.to_hex() + "\n";
  }
  return out;
}

CoverageMatrix ParseMatrix(std::string_view text) {
  Universe universe;
  std::vector<CoverageRow> rows;
  std::optional<std::size_t> declared;
  bool header = false;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    const auto tok = Tokens(line);
    if (tok.empty() || tok[0].front() == '#') continue;
    if (!header) {
      if (tok.size() != 2 || tok[0] != "ppreuse-matrix" || tok[1] != "1") {
        throw ParseError(line_no, "missing 'ppreuse-matrix 1' header");
      }
      header = true;
    } else if (tok[0] == "universe" && tok.size() == 2 && !declared) {
      std::size_t n = 0;
      const auto [ptr, ec] = std::from_chars(tok[1].data(), tok[1].data() + tok[1].size(), n);
      if (ec != std::errc() || ptr != tok[1].data() + tok[1].size()) {
        throw ParseError(line_no, "bad universe size");
      }
      declared = n;
    } else if (tok[0] == "p" && tok.size() == 3 && declared && rows.empty()) {
      std::uint32_t index = 0;
      const auto [ptr, ec] = std::from_chars(tok[2].data(), tok[2].data() + tok[2].size(), index);
      if (ec != std::errc() || ptr != tok[2].data() + tok[2].size()) {
        throw ParseError(line_no, "bad point index");
      }
      universe.push_back(CoveragePointId{SplitPath(tok[1], line_no), index});
    } else if (tok[0] == "row" && (tok.size() == 3 || tok.size() == 2) && declared) {
      if (universe.size() != *declared) {
        throw ParseError(line_no, "universe declares " + std::to_string(*declared) +
                                      " points but lists " + std::to_string(universe.size()));
      }
      try {
        rows.push_back(CoverageRow{std::string(tok[1]),
                                   BitVector::from_hex(tok.size() == 3 ? tok[2] : "", *declared)});
      } catch (const ParseError& e) {
        throw ParseError(line_no, e.what());
      }
    } else {
      throw ParseError(line_no, "unexpected line");
    }
  }
  if (!header) throw ParseError(0, "empty matrix document");
  if (declared && universe.size() != *declared) {
    throw ParseError(line_no, "universe size mismatch");
  }
  return CoverageMatrix(std::move(universe), std::move(rows));
}

double PercentOf(std::size_t count, std::size_t universe_size) {
  if (universe_size == 0) return 0.0;
  return 100.0 * static_cast<double>(count) / static_cast<double>(universe_size);
}

double TotalCoverage(const CoveredSet& covered) {
  return PercentOf(covered.count(), covered.universe_size());
}

std::size_t IncrementalCount(const BitVector& row, const CoveredSet& covered) {
  CheckSameLength(row, covered.bits);
  return row.count_and_not(covered.bits);
}

double IncrementalCoverage(const BitVector& row, const CoveredSet& covered) {
  return PercentOf(IncrementalCount(row, covered), row.size());
}

double IncrementalCoverage(const CoverageRow& row, const CoveredSet& covered) {
  return IncrementalCoverage(row.bits, covered);
}

void MergeInto(CoveredSet& covered, const BitVector& row) {
  CheckSameLength(row, covered.bits);
  covered.bits |= row;
}

CoveredSet MergeCovered(const CoveredSet& covered, const CoverageRow& row) {
  CoveredSet out = covered;
  MergeInto(out, row.bits);
  return out;
}

}  // namespace ppreuse
