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

#include <algorithm>
#include <limits>
#include <numeric>
#include <unordered_map>

#include "ppreuse/errors.hpp"

namespace ppreuse {

namespace {

using Clock = std::chrono::steady_clock;

// Greedy cover of `target` using candidate rows. Returns chosen row indices
// in pick order. Ties: larger gain, then smaller test id.
std::vector<std::size_t> GreedyCover(const std::vector<BitVector>& rows,
                                     const std::vector<const std::string*>& ids,
                                     std::span<const std::size_t> candidates,
                                     BitVector target) {
  std::vector<std::size_t> chosen;
  std::vector<std::size_t> pool(candidates.begin(), candidates.end());
  while (!target.none()) {
    std::size_t best = std::numeric_limits<std::size_t>::max();
    std::size_t best_gain = 0;
    for (std::size_t r : pool) {
      const std::size_t gain = rows[r].count_and(target);
      if (gain == 0) continue;
      if (gain > best_gain || (gain == best_gain && *ids[r] < *ids[best])) {
        best = r;
        best_gain = gain;
      }
    }
    if (best_gain == 0) break;
    chosen.push_back(best);
    target.subtract(rows[best]);
    pool.erase(std::find(pool.begin(), pool.end(), best));
  }
  return chosen;
}

// Depth-first branch and bound over one connected component of the kernel.
class BranchAndBound {
 public:
  BranchAndBound(const std::vector<BitVector>& rows,
                 const std::vector<const std::string*>& ids,
                 std::vector<std::size_t> members, BitVector target,
                 Clock::time_point deadline)
      : rows_(rows),
        ids_(ids),
        members_(std::move(members)),
        target_(std::move(target)),
        deadline_(deadline) {
    // Column -> member mask (bit k = members_[k] hits the column).
    columns_.assign(target_.size(), BitVector(members_.size()));
    for (std::size_t k = 0; k < members_.size(); ++k) {
      BitVector hit = rows_[members_[k]];
      hit &= target_;
      hit.for_each_set([&](std::size_t c) { columns_[c].set(k); });
    }
  }

  // Seeds the incumbent; returns the optimum unless the deadline passed.
  std::vector<std::size_t> Solve(std::vector<std::size_t> incumbent) {
    best_ = std::move(incumbent);
    BitVector allowed(members_.size());
    for (std::size_t k = 0; k < members_.size(); ++k) allowed.set(k);
    std::vector<std::size_t> chosen;
    Search(target_, allowed, chosen);
    return best_;
  }

  bool timed_out() const { return timed_out_; }
  std::size_t nodes() const { return nodes_; }

 private:
  std::size_t LowerBound(const BitVector& uncovered, const BitVector& allowed) const {
    std::size_t max_gain = 0;
    allowed.for_each_set([&](std::size_t k) {
      max_gain = std::max(max_gain, rows_[members_[k]].count_and(uncovered));
    });
    if (max_gain == 0) return std::numeric_limits<std::size_t>::max();
    const std::size_t uncovered_count = uncovered.count();
    const std::size_t by_size = (uncovered_count + max_gain - 1) / max_gain;

    // Columns whose allowed covering rows are pairwise disjoint each need
    // their own row.
    std::vector<std::pair<std::size_t, std::size_t>> order;
    uncovered.for_each_set([&](std::size_t c) {
      order.emplace_back(columns_[c].count_and(allowed), c);
    });
    std::sort(order.begin(), order.end());
    BitVector used(members_.size());
    std::size_t disjoint = 0;
    for (const auto& [n, c] : order) {
      if (n == 0) return std::numeric_limits<std::size_t>::max();
      BitVector cover = columns_[c];
      cover &= allowed;
      if (cover.count_and(used) == 0) {
        ++disjoint;
        used |= cover;
      }
    }
    return std::max(by_size, disjoint);
  }

  void Search(const BitVector& uncovered, BitVector& allowed,
              std::vector<std::size_t>& chosen) {
    if (timed_out_) return;
    if ((++nodes_ & 0x3ff) == 0 && Clock::now() > deadline_) {
      timed_out_ = true;
      return;
    }
    if (uncovered.none()) {
      if (chosen.size() < best_.size()) {
        best_.clear();
        for (std::size_t k : chosen) best_.push_back(members_[k]);
      }
      return;
    }
    const std::size_t lb = LowerBound(uncovered, allowed);
    if (lb == std::numeric_limits<std::size_t>::max()) return;
    if (chosen.size() + lb >= best_.size()) return;

    // Branch on the uncovered column with the fewest allowed covering rows.
    std::size_t pivot = 0;
    std::size_t pivot_n = std::numeric_limits<std::size_t>::max();
    uncovered.for_each_set([&](std::size_t c) {
      const std::size_t n = columns_[c].count_and(allowed);
      if (n < pivot_n) {
        pivot_n = n;
        pivot = c;
      }
    });
    BitVector options = columns_[pivot];
    options &= allowed;
    std::vector<std::pair<std::size_t, std::size_t>> branches;
    options.for_each_set([&](std::size_t k) {
      branches.emplace_back(rows_[members_[k]].count_and(uncovered), k);
    });
    std::sort(branches.begin(), branches.end(), [&](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first > b.first;
      return *ids_[members_[a.second]] < *ids_[members_[b.second]];
    });

    std::vector<std::size_t> excluded;
    for (const auto& [gain, k] : branches) {
      BitVector next = uncovered;
      next.subtract(rows_[members_[k]]);
      allowed.reset(k);
      chosen.push_back(k);
      Search(next, allowed, chosen);
      chosen.pop_back();
      // Later siblings never use k: every cover through k was explored here.
      excluded.push_back(k);
      if (timed_out_) break;
    }
    for (std::size_t k : excluded) allowed.set(k);
  }

  const std::vector<BitVector>& rows_;
  const std::vector<const std::string*>& ids_;
  std::vector<std::size_t> members_;
  BitVector target_;
  Clock::time_point deadline_;
  std::vector<BitVector> columns_;
  std::vector<std::size_t> best_;
  std::size_t nodes_ = 0;
  bool timed_out_ = false;
};

struct Kernel {
  std::vector<std::size_t> forced;  // rows selected by reduction
  std::vector<std::size_t> alive;   // rows left for search
  BitVector target;                 // columns still to cover
};

// Dominated-row removal and essential-row fixing until a fixpoint.
Kernel Reduce(const std::vector<BitVector>& rows,
              const std::vector<const std::string*>& ids,
              std::vector<std::size_t> alive, BitVector target) {
  Kernel out;
  bool changed = true;
  while (changed && !target.none()) {
    changed = false;

    // Restricted rows; drop the ones with nothing left to cover.
    std::vector<BitVector> restricted;
    std::vector<std::size_t> next;
    for (std::size_t r : alive) {
      BitVector b = rows[r];
      b &= target;
      if (!b.none()) {
        restricted.push_back(std::move(b));
        next.push_back(r);
      }
    }
    if (next.size() != alive.size()) changed = true;
    alive = std::move(next);

    // Dominance: drop i if it is a subset of some other alive row. Among equal
    // rows the smaller id survives.
    std::vector<std::size_t> order(alive.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      const std::size_t ca = restricted[a].count(), cb = restricted[b].count();
      if (ca != cb) return ca > cb;
      return *ids[alive[a]] < *ids[alive[b]];
    });
    std::vector<char> dead(alive.size(), 0);
    for (std::size_t x = 0; x < order.size(); ++x) {
      const std::size_t i = order[x];
      for (std::size_t y = 0; y < x; ++y) {
        const std::size_t j = order[y];
        if (!dead[j] && restricted[i].is_subset_of(restricted[j])) {
          dead[i] = 1;
          break;
        }
      }
    }
    std::vector<std::size_t> kept;
    std::vector<BitVector> kept_bits;
    for (std::size_t i = 0; i < alive.size(); ++i) {
      if (dead[i]) {
        changed = true;
      } else {
        kept.push_back(alive[i]);
        kept_bits.push_back(std::move(restricted[i]));
      }
    }
    alive = std::move(kept);

    // Essential rows: sole cover of some column.
    std::vector<std::size_t> counts(target.size(), 0);
    std::vector<std::size_t> last(target.size(), 0);
    for (std::size_t i = 0; i < alive.size(); ++i) {
      kept_bits[i].for_each_set([&](std::size_t c) {
        ++counts[c];
        last[c] = i;
      });
    }
    std::vector<char> essential(alive.size(), 0);
    target.for_each_set([&](std::size_t c) {
      if (counts[c] == 1) essential[last[c]] = 1;
    });
    std::vector<std::size_t> rest;
    for (std::size_t i = 0; i < alive.size(); ++i) {
      if (essential[i]) {
        out.forced.push_back(alive[i]);
        target.subtract(kept_bits[i]);
        changed = true;
      } else {
        rest.push_back(alive[i]);
      }
    }
    alive = std::move(rest);
  }
  if (target.none()) alive.clear();
  out.alive = std::move(alive);
  out.target = std::move(target);
  return out;
}

// Connected components of the row/column incidence restricted to target.
std::vector<std::vector<std::size_t>> Components(const std::vector<BitVector>& rows,
                                                 std::span<const std::size_t> alive,
                                                 const BitVector& target) {
  std::vector<std::size_t> parent(alive.size());
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::vector<std::size_t> owner(target.size(), std::numeric_limits<std::size_t>::max());
  for (std::size_t i = 0; i < alive.size(); ++i) {
    BitVector b = rows[alive[i]];
    b &= target;
    b.for_each_set([&](std::size_t c) {
      if (owner[c] == std::numeric_limits<std::size_t>::max()) {
        owner[c] = i;
      } else {
        parent[find(i)] = find(owner[c]);
      }
    });
  }
  std::unordered_map<std::size_t, std::size_t> index;
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t i = 0; i < alive.size(); ++i) {
    const std::size_t root = find(i);
    auto [it, inserted] = index.emplace(root, out.size());
    if (inserted) out.emplace_back();
    out[it->second].push_back(alive[i]);
  }
  return out;
}

struct Prepared {
  std::vector<BitVector> rows;
  std::vector<const std::string*> ids;
  std::vector<std::size_t> nonempty;
  std::vector<std::string> empty_rows;
  BitVector all;
};

Prepared Prepare(const CoverageMatrix& matrix) {
  Prepared p;
  p.all = BitVector(matrix.num_points());
  for (std::size_t i = 0; i < matrix.num_rows(); ++i) {
    const auto& row = matrix.row(i);
    p.rows.push_back(row.bits);
    p.ids.push_back(&row.test_id);
    if (row.bits.none()) {
      p.empty_rows.push_back(row.test_id);
    } else {
      p.nonempty.push_back(i);
      p.all |= row.bits;
    }
  }
  return p;
}

MinimizeResult Finish(const CoverageMatrix& matrix, std::vector<std::size_t> chosen,
                      MinimizeMethod method, Clock::time_point start,
                      std::vector<std::string> empty_rows, std::size_t nodes) {
  std::sort(chosen.begin(), chosen.end());
  chosen.erase(std::unique(chosen.begin(), chosen.end()), chosen.end());
  MinimizeResult out;
  for (std::size_t i : chosen) out.selected.push_back(matrix.row(i).test_id);
  out.objective = out.selected.size();
  out.method = method;
  out.elapsed = Clock::now() - start;
  out.empty_rows = std::move(empty_rows);
  out.nodes = nodes;
  return out;
}

}  // namespace

std::string_view MinimizeMethodName(MinimizeMethod method) {
  switch (method) {
    case MinimizeMethod::kExact:
      return "exact";
    case MinimizeMethod::kGreedy:
      return "greedy";
    case MinimizeMethod::kGreedyFallback:
      return "greedy-fallback";
  }
  return "?";
}

MinimizeResult MinimizeGreedy(const CoverageMatrix& matrix) {
  const auto start = Clock::now();
  Prepared p = Prepare(matrix);
  auto chosen = GreedyCover(p.rows, p.ids, p.nonempty, p.all);
  return Finish(matrix, std::move(chosen), MinimizeMethod::kGreedy, start,
                std::move(p.empty_rows), 0);
}

MinimizeResult MinimizeExact(const CoverageMatrix& matrix,
                             std::chrono::duration<double> time_budget) {
  const auto start = Clock::now();
  const auto deadline =
      start + std::chrono::duration_cast<Clock::duration>(time_budget);
  Prepared p = Prepare(matrix);
  if (p.all.none()) {
    return Finish(matrix, {}, MinimizeMethod::kExact, start, std::move(p.empty_rows), 0);
  }

  // Columns hit by every row carry no constraint beyond "select something".
  BitVector target = p.all;
  if (p.empty_rows.empty()) {
    BitVector universal = p.all;
    for (const auto& r : p.rows) universal &= r;
    target.subtract(universal);
  }
  if (target.none()) {
    // Any single row covers everything; take the greedy pick.
    auto chosen = GreedyCover(p.rows, p.ids, p.nonempty, p.all);
    chosen.resize(1);
    return Finish(matrix, std::move(chosen), MinimizeMethod::kExact, start,
                  std::move(p.empty_rows), 0);
  }

  Kernel kernel = Reduce(p.rows, p.ids, p.nonempty, target);
  std::vector<std::size_t> chosen = kernel.forced;
  std::size_t nodes = 0;
  bool timed_out = false;
  for (auto& component : Components(p.rows, kernel.alive, kernel.target)) {
    BitVector comp_target(kernel.target.size());
    for (std::size_t r : component) {
      BitVector b = p.rows[r];
      b &= kernel.target;
      comp_target |= b;
    }
    auto incumbent = GreedyCover(p.rows, p.ids, component, comp_target);
    std::vector<std::size_t> solution;
    if (timed_out) {
      solution = std::move(incumbent);
    } else {
      BranchAndBound bnb(p.rows, p.ids, component, comp_target, deadline);
      solution = bnb.Solve(std::move(incumbent));
      nodes += bnb.nodes();
      timed_out = bnb.timed_out();
    }
    chosen.insert(chosen.end(), solution.begin(), solution.end());
  }
  return Finish(matrix, std::move(chosen),
                timed_out ? MinimizeMethod::kGreedyFallback : MinimizeMethod::kExact,
                start, std::move(p.empty_rows), nodes);
}

bool VerifyEquivalence(const CoverageMatrix& matrix,
                       std::span<const std::string> selected) {
  std::unordered_map<std::string_view, std::size_t> index;
  for (std::size_t i = 0; i < matrix.num_rows(); ++i) {
    index.emplace(matrix.row(i).test_id, i);
  }
  BitVector got(matrix.num_points());
  for (const auto& id : selected) {
    auto it = index.find(id);
    if (it == index.end()) {
      throw StructuralError("unknown test id '" + id + "' in selection");
    }
    got |= matrix.row(it->second).bits;
  }
  return got == matrix.union_bits();
}

double ReductionRate(const CoverageMatrix& matrix, const MinimizeResult& result) {
  if (matrix.num_rows() == 0) return 0.0;
  return 100.0 * static_cast<double>(matrix.num_rows() - result.objective) /
         static_cast<double>(matrix.num_rows());
}

}  // namespace ppreuse
