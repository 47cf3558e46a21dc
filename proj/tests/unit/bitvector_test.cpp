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

#include "ppreuse/bitvector.hpp"

#include <gtest/gtest.h>

#include <vector>

#include "ppreuse/rng.hpp"

namespace ppreuse {
namespace {

BitVector Random(std::size_t n, Rng& rng) {
  BitVector v(n);
  for (std::size_t i = 0; i < n; ++i) v.assign(i, Uniform01(rng) < 0.4);
  return v;
}

TEST(BitVector, StringRoundTrip) {
  const BitVector v = BitVector::from_string("1010011");
  EXPECT_EQ(v.size(), 7u);
  EXPECT_EQ(v.count(), 4u);
  EXPECT_EQ(v.to_string(), "1010011");
}

TEST(BitVector, HexRoundTripAcrossWordBoundaries) {
  Rng rng(3);
  for (std::size_t n : {0u, 1u, 4u, 63u, 64u, 65u, 130u, 2000u}) {
    const BitVector v = Random(n, rng);
    const std::string hex = v.to_hex();
    EXPECT_EQ(hex.size(), (n + 3) / 4);
    EXPECT_EQ(BitVector::from_hex(hex, n), v) << n;
  }
}

TEST(BitVector, SetOperationsMatchPerBitLoop) {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + UniformIndex(rng, 300);
    const BitVector a = Random(n, rng);
    const BitVector b = Random(n, rng);
    std::size_t and_not = 0, both = 0;
    bool subset = true;
    for (std::size_t i = 0; i < n; ++i) {
      and_not += a.test(i) && !b.test(i);
      both += a.test(i) && b.test(i);
      subset = subset && (!a.test(i) || b.test(i));
    }
    EXPECT_EQ(a.count_and_not(b), and_not);
    EXPECT_EQ(a.count_and(b), both);
    EXPECT_EQ(a.is_subset_of(b), subset);

    BitVector u = a;
    u |= b;
    BitVector d = a;
    d.subtract(b);
    for (std::size_t i = 0; i < n; ++i) {
      EXPECT_EQ(u.test(i), a.test(i) || b.test(i));
      EXPECT_EQ(d.test(i), a.test(i) && !b.test(i));
    }
  }
}

TEST(BitVector, ForEachSetVisitsInOrder) {
  BitVector v(200);
  const std::vector<std::size_t> want = {0, 5, 63, 64, 127, 199};
  for (std::size_t i : want) v.set(i);
  std::vector<std::size_t> got;
  v.for_each_set([&](std::size_t i) { got.push_back(i); });
  EXPECT_EQ(got, want);
}

}  // namespace
}  // namespace ppreuse
