/*
 * Copyright 2026 The erpvis Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace erpvis {

// Engine seeded from a base seed plus a stream path, e.g. (seed, {kTag, i}).
// Two different paths give statistically independent streams.
inline std::mt19937_64 MakeEngine(std::uint64_t seed,
                                  std::initializer_list<std::uint64_t> path) {
  std::vector<std::uint32_t> words;
  words.reserve(2 * (path.size() + 1));
  auto push = [&words](std::uint64_t v) {
    words.push_back(static_cast<std::uint32_t>(v));
    words.push_back(static_cast<std::uint32_t>(v >> 32));
  };
  push(seed);
  for (auto v : path) push(v);
  std::seed_seq seq(words.begin(), words.end());
  return std::mt19937_64(seq);
}

// Stream tags, so that seeds reused across modules never collide.
enum StreamTag : std::uint64_t {
  kTagTemplates = 0x7465'6d70,
  kTagTrialNoise = 0x6e6f'6973,
  kTagPartition = 0x7061'7274,
  kTagSplit = 0x7370'6c74,
  kTagInit = 0x696e'6974,
  kTagShuffle = 0x7368'7566,
};

// Fisher-Yates with an explicit engine draw, so the permutation only depends
// on the engine (std::shuffle's algorithm is implementation-defined).
template <typename T>
void SeededShuffle(std::vector<T>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace erpvis
