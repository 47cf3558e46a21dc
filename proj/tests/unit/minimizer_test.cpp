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

#include "ppreuse/minimizer.hpp"

#include <gtest/gtest.h>

#include <set>

#include "../support/brute_force.hpp"
#include "ppreuse/errors.hpp"
#include "ppreuse/simharness.hpp"

namespace ppreuse {
namespace {

using testing::BruteForceCoverMin;
using testing::MatrixFromStrings;
using testing::RandomMatrix;

TEST(MinimizeExact, ThreeRowToy) {
  const CoverageMatrix m = MatrixFromStrings({"t1", "t2", "t3"}, {"11", "10", "01"});
  ASSERT_EQ(BruteForceCoverMin(m), 1u);
  const MinimizeResult r = MinimizeExact(m);
  EXPECT_EQ(r.selected, std::vector<std::string>{"t1"});
  EXPECT_EQ(r.objective, 1u);
  EXPECT_EQ(r.method, MinimizeMethod::kExact);
  EXPECT_NEAR(ReductionRate(m, r), 66.667, 0.001);
}

TEST(MinimizeExact, NoRedundancy) {
  const CoverageMatrix m = MatrixFromStrings({"t1", "t2"}, {"10", "01"});
  EXPECT_EQ(MinimizeExact(m).selected, (std::vector<std::string>{"t1", "t2"}));
}

TEST(MinimizeExact, EmptyMatrixAndEmptyRows) {
  EXPECT_TRUE(MinimizeExact(CoverageMatrix()).selected.empty());
  const CoverageMatrix m = MatrixFromStrings({"a", "b", "c"}, {"000", "011", "000"});
  const MinimizeResult r = MinimizeExact(m);
  EXPECT_EQ(r.selected, std::vector<std::string>{"b"});
  EXPECT_EQ(r.empty_rows, (std::vector<std::string>{"a", "c"}));
}

TEST(MinimizeExact, PointHitByEveryRowStillNeedsOneRow) {
  const CoverageMatrix m = MatrixFromStrings({"a", "b"}, {"1", "1"});
  EXPECT_EQ(MinimizeExact(m).selected.size(), 1u);
}

TEST(MinimizeExact, MatchesExhaustiveEnumeration) {
  Rng rng(1234);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t rows = 1 + UniformIndex(rng, 14);
    const std::size_t points = 1 + UniformIndex(rng, 25);
    const double density = 0.05 + 0.4 * Uniform01(rng);
    const CoverageMatrix m = RandomMatrix(rows, points, density, rng);
    const MinimizeResult r = MinimizeExact(m);
    EXPECT_EQ(r.selected.size(), BruteForceCoverMin(m)) << "trial " << trial;
    EXPECT_TRUE(VerifyEquivalence(m, r.selected));
  }
}

TEST(MinimizeExact, PlantedCorpusNeedsAtMostItsBases) {
  SuiteSpec spec = SuiteSpec::Preset("distill");
  spec.seed = 17;
  const SyntheticSuite suite = SyntheticSuite::Generate(spec);
  const CoverageMatrix m = suite.TrainerMatrix(0);
  const MinimizeResult r = MinimizeExact(m);
  EXPECT_LE(r.selected.size(), 50u);
  EXPECT_TRUE(VerifyEquivalence(m, r.selected));
}

TEST(MinimizeExact, DeterministicAndInRowOrder) {
  Rng rng(9);
  const CoverageMatrix m = RandomMatrix(40, 60, 0.1, rng);
  const MinimizeResult a = MinimizeExact(m);
  const MinimizeResult b = MinimizeExact(m);
  EXPECT_EQ(a.selected, b.selected);
  std::size_t last = 0;
  for (const auto& id : a.selected) {
    const std::size_t idx = *m.find(id);
    EXPECT_GE(idx, last);
    last = idx;
  }
}

TEST(MinimizeExact, ZeroBudgetFallsBackToAnEquivalentCover) {
  Rng rng(10);
  const CoverageMatrix m = RandomMatrix(60, 80, 0.08, rng);
  const MinimizeResult r = MinimizeExact(m, std::chrono::seconds(0));
  EXPECT_TRUE(VerifyEquivalence(m, r.selected));
}

TEST(MinimizeGreedy, ThreeRowToyAndIdenticalRows) {
  EXPECT_EQ(MinimizeGreedy(MatrixFromStrings({"t1", "t2", "t3"}, {"11", "10", "01"})).selected,
            std::vector<std::string>{"t1"});
  const MinimizeResult r =
      MinimizeGreedy(MatrixFromStrings({"x", "y", "z"}, {"0110", "0110", "0110"}));
  EXPECT_EQ(r.selected, std::vector<std::string>{"x"});
  EXPECT_EQ(r.method, MinimizeMethod::kGreedy);
}

TEST(MinimizeGreedy, NeverBeatsExactAndStaysEquivalent) {
  Rng rng(77);
  for (int trial = 0; trial < 200; ++trial) {
    const CoverageMatrix m = RandomMatrix(12, 20, 0.2, rng);
    const MinimizeResult g = MinimizeGreedy(m);
    const std::size_t best = BruteForceCoverMin(m);
    EXPECT_GE(g.selected.size(), best);
    EXPECT_TRUE(VerifyEquivalence(m, g.selected));
    EXPECT_EQ(MinimizeExact(m).selected.size(), best);
  }
}

TEST(MinimizeGreedy, EquivalenceOnManyRandomInstances) {
  Rng rng(5);
  for (int trial = 0; trial < 1000; ++trial) {
    const CoverageMatrix m = RandomMatrix(1 + UniformIndex(rng, 30), 1 + UniformIndex(rng, 40),
                                          0.15, rng);
    EXPECT_TRUE(VerifyEquivalence(m, MinimizeGreedy(m).selected));
  }
}

TEST(VerifyEquivalence, Cases) {
  const CoverageMatrix m = MatrixFromStrings({"t1", "t2", "t3"}, {"11", "10", "01"});
  const std::vector<std::string> all = {"t1", "t2", "t3"};
  EXPECT_TRUE(VerifyEquivalence(m, all));
  EXPECT_FALSE(VerifyEquivalence(m, std::vector<std::string>{}));
  EXPECT_TRUE(VerifyEquivalence(m, std::vector<std::string>{"t2", "t3"}));
  EXPECT_THROW(VerifyEquivalence(m, std::vector<std::string>{"nope"}), StructuralError);
}

}  // namespace
}  // namespace ppreuse
