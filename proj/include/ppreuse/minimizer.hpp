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

// Test-corpus minimization as unweighted set cover: pick the fewest rows
// whose union equals the union of all rows.
//
// Points hit by no row are unconstrained. Points hit by every row are met by
// any nonempty selection and are dropped from the kernel before search.

#ifndef PPREUSE_MINIMIZER_HPP_
#define PPREUSE_MINIMIZER_HPP_

#include <chrono>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ppreuse/coverage.hpp"

namespace ppreuse {

enum class MinimizeMethod { kExact, kGreedy, kGreedyFallback };

std::string_view MinimizeMethodName(MinimizeMethod method);

struct MinimizeResult {
  // Selected test ids in matrix row order.
  std::vector<std::string> selected;
  std::size_t objective = 0;
  MinimizeMethod method = MinimizeMethod::kExact;
  std::chrono::duration<double> elapsed{0};
  // Rows that hit no point; never selected.
  std::vector<std::string> empty_rows;
  // Branch-and-bound nodes expanded (0 for greedy).
  std::size_t nodes = 0;
};

// Minimum-cardinality coverage-equivalent subset. If the budget runs out
// the best incumbent so far is returned with method kGreedyFallback.
MinimizeResult MinimizeExact(
    const CoverageMatrix& matrix,
    std::chrono::duration<double> time_budget = std::chrono::seconds(60));

// Max-marginal-gain greedy. Ties: larger gain, then smaller test id.
MinimizeResult MinimizeGreedy(const CoverageMatrix& matrix);

// True iff the union of the selected rows equals the union of all rows.
// Throws StructuralError for an id not in the matrix.
bool VerifyEquivalence(const CoverageMatrix& matrix,
                       std::span<const std::string> selected);

// Fraction of rows removed, in percent.
double ReductionRate(const CoverageMatrix& matrix, const MinimizeResult& result);

}  // namespace ppreuse

#endif  // PPREUSE_MINIMIZER_HPP_
