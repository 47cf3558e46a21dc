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

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <vector>

#include "ppreuse/errors.hpp"
#include "ppreuse/rng.hpp"
#include "ppreuse/simharness.hpp"

namespace ppreuse {
namespace {

constexpr char kAlu[] =
    "# three points\n"
    "module core\n"
    "point 0 1\n"
    "module core.alu\n"
    "point 0 0\n"
    "point 1 1\n";

BitVector RandomBits(std::size_t n, double p, Rng& rng) {
  BitVector v(n);
  for (std::size_t i = 0; i < n; ++i) v.assign(i, Uniform01(rng) < p);
  return v;
}

TEST(ParseCoverageDb, ThreePointsInFileOrder) {
  const ParsedCoverage pc = ParseCoverageDb(kAlu, "t0");
  ASSERT_EQ(pc.universe.size(), 3u);
  EXPECT_EQ(pc.universe[0].str(), "core:0");
  EXPECT_EQ(pc.universe[1].str(), "core.alu:0");
  EXPECT_EQ(pc.universe[2].str(), "core.alu:1");
  EXPECT_EQ(pc.row.bits.to_string(), "101");
  EXPECT_EQ(pc.row.test_id, "t0");
}

TEST(ParseCoverageDb, EmptyDocument) {
  const ParsedCoverage pc = ParseCoverageDb("", "e");
  EXPECT_TRUE(pc.universe.empty());
  EXPECT_EQ(pc.row.bits.size(), 0u);
}

TEST(ParseCoverageDb, SameHierarchySameOrdering) {
  const std::string other =
      "module core\npoint 0 0\nmodule core.alu\npoint 0 1\npoint 1 0\n";
  EXPECT_EQ(ParseCoverageDb(kAlu).universe, ParseCoverageDb(other).universe);
}

TEST(ParseCoverageDb, ErrorsCarryLineNumbers) {
  try {
    ParseCoverageDb("module a\npoint 0 1\nbogus line\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  try {
    ParseCoverageDb("module a\npoint 0 2\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  EXPECT_THROW(ParseCoverageDb("point 0 1\n"), ParseError);
  EXPECT_THROW(ParseCoverageDb("module a\npoint 0 1\npoint 0 0\n"), StructuralError);
}

TEST(ParseCoverageDb, FormatRoundTrip) {
  const ParsedCoverage pc = ParseCoverageDb(kAlu, "t0");
  const ParsedCoverage back =
      ParseCoverageDb(FormatCoverageDb(pc.universe, pc.row.bits, "again"), "t0");
  EXPECT_EQ(back.universe, pc.universe);
  EXPECT_EQ(back.row.bits, pc.row.bits);
}

TEST(BuildMatrix, SharedUniverse) {
  std::vector<ParsedCoverage> rows = {ParseCoverageDb(kAlu, "a"),
                                      ParseCoverageDb(kAlu, "b")};
  const CoverageMatrix m = BuildMatrix(rows);
  EXPECT_EQ(m.num_rows(), 2u);
  EXPECT_EQ(m.num_points(), 3u);
}

TEST(BuildMatrix, DisjointUniversesUnify) {
  std::vector<ParsedCoverage> rows = {ParseCoverageDb("module p\npoint 1 1\n", "a"),
                                      ParseCoverageDb("module p\npoint 2 1\n", "b")};
  const CoverageMatrix m = BuildMatrix(rows);
  ASSERT_EQ(m.num_points(), 2u);
  EXPECT_EQ(m.row(0).bits.to_string(), "10");
  EXPECT_EQ(m.row(1).bits.to_string(), "01");
}

TEST(BuildMatrix, FileOrderDoesNotChangeColumns) {
  std::vector<ParsedCoverage> rows = {
      ParseCoverageDb("module b\npoint 0 1\nmodule a\npoint 0 1\n", "x"),
      ParseCoverageDb("module a\npoint 0 1\nmodule c\npoint 3 0\n", "y")};
  const CoverageMatrix m1 = BuildMatrix(rows);
  std::swap(rows[0], rows[1]);
  const CoverageMatrix m2 = BuildMatrix(rows);
  EXPECT_EQ(m1.universe(), m2.universe());
}

TEST(BuildMatrix, ColumnCountsMatchGenerator) {
  SuiteSpec spec = SuiteSpec::Preset("distill");
  spec.seed = 5;
  const SyntheticSuite suite = SyntheticSuite::Generate(spec);
  const CoverageMatrix m = suite.TrainerMatrix(0);
  ASSERT_EQ(m.num_rows(), 1000u);
  std::vector<std::size_t> want(m.num_points(), 0);
  for (const auto& id : suite.CoverageTests(0)) {
    const BitVector bits = suite.Row(0, id);
    for (std::size_t j = 0; j < want.size(); ++j) want[j] += bits.test(j);
  }
  EXPECT_EQ(m.column_counts(), want);
}

TEST(BuildMatrix, RejectsWrongRowLength) {
  Universe u = ParseCoverageDb(kAlu).universe;
  std::vector<CoverageRow> rows = {{"a", BitVector(2)}};
  EXPECT_THROW(CoverageMatrix(u, rows), StructuralError);
}

TEST(MatrixText, RoundTrip) {
  Rng rng(7);
  Universe u;
  for (std::uint32_t i = 0; i < 70; ++i) u.push_back({{"top", i < 35 ? "x" : "y"}, i});
  std::vector<CoverageRow> rows;
  for (int r = 0; r < 9; ++r) rows.push_back({"t" + std::to_string(r), RandomBits(70, 0.3, rng)});
  const CoverageMatrix m(u, rows);
  const CoverageMatrix back = ParseMatrix(SerializeMatrix(m));
  EXPECT_EQ(back.universe(), m.universe());
  ASSERT_EQ(back.num_rows(), m.num_rows());
  for (std::size_t r = 0; r < m.num_rows(); ++r) {
    EXPECT_EQ(back.row(r).test_id, m.row(r).test_id);
    EXPECT_EQ(back.row(r).bits, m.row(r).bits);
  }
  EXPECT_EQ(SerializeMatrix(back), SerializeMatrix(m));
  EXPECT_THROW(ParseMatrix("nonsense\n"), ParseError);
}

TEST(TotalCoverage, Basics) {
  BitVector b(200);
  for (std::size_t i = 0; i < 140; ++i) b.set(i);
  EXPECT_DOUBLE_EQ(TotalCoverage(CoveredSet(b)), 70.0);
  EXPECT_DOUBLE_EQ(TotalCoverage(CoveredSet(200)), 0.0);
  BitVector full(50);
  for (std::size_t i = 0; i < 50; ++i) full.set(i);
  EXPECT_DOUBLE_EQ(TotalCoverage(CoveredSet(full)), 100.0);
  EXPECT_DOUBLE_EQ(TotalCoverage(CoveredSet(0)), 0.0);
}

TEST(IncrementalCoverage, Examples) {
  const CoveredSet covered(BitVector::from_string("100"));
  EXPECT_NEAR(IncrementalCoverage(BitVector::from_string("111"), covered), 66.67, 0.01);
  EXPECT_DOUBLE_EQ(IncrementalCoverage(BitVector::from_string("100"), covered), 0.0);
  EXPECT_THROW(IncrementalCoverage(BitVector::from_string("10"), covered), StructuralError);
}

TEST(IncrementalCoverage, MatchesPerPointCountAndMergeDifference) {
  Rng rng(21);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 1 + UniformIndex(rng, 150);
    const BitVector row = RandomBits(n, 0.3, rng);
    const CoveredSet covered(RandomBits(n, 0.5, rng));
    std::size_t fresh = 0;
    for (std::size_t i = 0; i < n; ++i) fresh += row.test(i) && !covered.bits.test(i);
    EXPECT_EQ(IncrementalCount(row, covered), fresh);
    EXPECT_NEAR(IncrementalCoverage(row, covered), 100.0 * fresh / n, 1e-12);
    const CoveredSet merged = MergeCovered(covered, CoverageRow{"r", row});
    EXPECT_NEAR(IncrementalCoverage(row, covered),
                TotalCoverage(merged) - TotalCoverage(covered), 1e-9);
  }
}

TEST(MergeCovered, UnionIdempotentOrderFree) {
  const CoveredSet a(BitVector::from_string("100"));
  EXPECT_EQ(MergeCovered(a, {"r", BitVector::from_string("011")}).bits.to_string(), "111");
  EXPECT_EQ(MergeCovered(a, {"r", a.bits}).bits, a.bits);

  Rng rng(4);
  std::vector<BitVector> rows;
  for (int i = 0; i < 6; ++i) rows.push_back(RandomBits(90, 0.2, rng));
  std::vector<std::size_t> order(rows.size());
  std::iota(order.begin(), order.end(), 0);
  CoveredSet first(90);
  for (std::size_t i : order) MergeInto(first, rows[i]);
  for (int perm = 0; perm < 20; ++perm) {
    std::shuffle(order.begin(), order.end(), rng);
    CoveredSet c(90);
    double last = 0.0;
    for (std::size_t i : order) {
      MergeInto(c, rows[i]);
      EXPECT_GE(TotalCoverage(c), last);
      last = TotalCoverage(c);
    }
    EXPECT_EQ(c.bits, first.bits);
  }
}

}  // namespace
}  // namespace ppreuse
