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

// Coverage model: point identities, per-test hit rows, the test x point
// coverage matrix and the coverage quantities computed over them.
//
// Rows carry only bits; the universe they index is held by the matrix (or
// returned next to the row by the parser). Percentages are derived from
// integer counts at the last moment.

#ifndef PPREUSE_COVERAGE_HPP_
#define PPREUSE_COVERAGE_HPP_

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ppreuse/bitvector.hpp"

namespace ppreuse {

struct CoveragePointId {
  std::vector<std::string> hier_path;
  std::uint32_t local_index = 0;

  // "core.alu:3"
  std::string str() const;
  std::string module_path() const;

  // Depth-first module order (a module's own points precede its children,
  // siblings lexicographic), then local index.
  friend std::strong_ordering operator<=>(const CoveragePointId&,
                                          const CoveragePointId&) = default;
  friend bool operator==(const CoveragePointId&,
                         const CoveragePointId&) = default;
};

using Universe = std::vector<CoveragePointId>;

enum class TestKind { kVulnerability, kCoverage };

std::string_view TestKindName(TestKind kind);
TestKind ParseTestKind(std::string_view name);

struct Test {
  std::string id;
  std::string origin;
  TestKind kind = TestKind::kCoverage;
  std::string payload;
};

struct CoverageRow {
  std::string test_id;
  BitVector bits;
};

struct CoveredSet {
  BitVector bits;

  CoveredSet() = default;
  explicit CoveredSet(std::size_t universe_size) : bits(universe_size) {}
  explicit CoveredSet(BitVector b) : bits(std::move(b)) {}

  std::size_t count() const { return bits.count(); }
  std::size_t universe_size() const { return bits.size(); }
};

class CoverageMatrix {
 public:
  CoverageMatrix() = default;
  // Throws StructuralError when a row length differs from the universe size
  // or the universe repeats a point id.
  CoverageMatrix(Universe universe, std::vector<CoverageRow> rows);

  const Universe& universe() const { return universe_; }
  const std::vector<CoverageRow>& rows() const { return rows_; }
  std::size_t num_rows() const { return rows_.size(); }
  std::size_t num_points() const { return universe_.size(); }
  const CoverageRow& row(std::size_t i) const { return rows_[i]; }

  // Row index for a test id, if present.
  std::optional<std::size_t> find(std::string_view test_id) const;

  // Number of rows hitting each column.
  std::vector<std::size_t> column_counts() const;
  // Union of all rows.
  BitVector union_bits() const;

 private:
  Universe universe_;
  std::vector<CoverageRow> rows_;
};

// One parsed coverage-database document.
struct ParsedCoverage {
  Universe universe;
  CoverageRow row;
};

// Parses one RCDB document (see README for the grammar). Column order is the
// file order. Throws ParseError on malformed or unknown lines and
// StructuralError on a repeated point id.
ParsedCoverage ParseCoverageDb(std::string_view text, std::string test_id = {});

// Writes a row back out as an RCDB document.
std::string FormatCoverageDb(const Universe& universe, const BitVector& bits,
                             std::string_view comment = {});

// Text serialization of a whole matrix:
//   ppreuse-matrix 1
//   universe <n>
//   p <module.path> <local_index>      (n lines, column order)
//   row <test_id> <hex bits>           (one per row, see BitVector::to_hex)
std::string SerializeMatrix(const CoverageMatrix& matrix);
CoverageMatrix ParseMatrix(std::string_view text);

// Unifies rows over possibly different universes. When every input shares
// the same universe (same ids in the same order) that order is kept;
// otherwise the union of all ids in canonical hierarchy order is used and
// absent points read as unhit. Row order follows input order.
CoverageMatrix BuildMatrix(std::span<const ParsedCoverage> rows);

// 100 * |covered| / universe_size; 0 for an empty universe.
double TotalCoverage(const CoveredSet& covered);
double PercentOf(std::size_t count, std::size_t universe_size);

// 100 * |row \ covered| / |universe|. StructuralError on length mismatch.
double IncrementalCoverage(const CoverageRow& row, const CoveredSet& covered);
double IncrementalCoverage(const BitVector& row, const CoveredSet& covered);
std::size_t IncrementalCount(const BitVector& row, const CoveredSet& covered);

// covered | row. StructuralError on length mismatch.
CoveredSet MergeCovered(const CoveredSet& covered, const CoverageRow& row);
void MergeInto(CoveredSet& covered, const BitVector& row);

}  // namespace ppreuse

#endif  // PPREUSE_COVERAGE_HPP_
