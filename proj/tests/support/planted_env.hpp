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

// Planted bandit environment: a corpus of arms of which a known subset has
// positive expected reward and the rest always return zero.

#ifndef PPREUSE_TESTS_PLANTED_ENV_HPP_
#define PPREUSE_TESTS_PLANTED_ENV_HPP_

#include <cstdio>
#include <set>
#include <string>
#include <vector>

#include "ppreuse/bandit.hpp"
#include "ppreuse/rng.hpp"

namespace ppreuse::testing {

struct PlantedEnv {
  std::vector<std::string> corpus;
  std::set<std::string> effective;

  // Effective arms draw uniformly from [0.5, 1.5]; the rest return 0.
  RewardFn Reward() const {
    return [this](const std::string& id, Rng& rng) {
      return effective.count(id) ? 0.5 + Uniform01(rng) : 0.0;
    };
  }
};

inline PlantedEnv MakePlantedEnv(std::size_t arms, std::size_t effective, std::uint64_t seed) {
  PlantedEnv env;
  for (std::size_t i = 0; i < arms; ++i) {
    char id[16];
    std::snprintf(id, sizeof(id), "a%03zu", i);
    env.corpus.emplace_back(id);
  }
  Rng rng(seed);
  std::vector<std::string> pool = env.corpus;
  for (std::size_t i = 0; i < effective; ++i) {
    const std::size_t j = i + UniformIndex(rng, pool.size() - i);
    std::swap(pool[i], pool[j]);
    env.effective.insert(pool[i]);
  }
  return env;
}

}  // namespace ppreuse::testing

#endif  // PPREUSE_TESTS_PLANTED_ENV_HPP_
