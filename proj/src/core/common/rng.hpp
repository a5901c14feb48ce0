// Copyright 2026 The pickcell Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace pickcell {

// Engine used for every stochastic component. Streams are derived from a base
// seed plus a list of salts so independent consumers never share draws.
using Rng = std::mt19937_64;

inline Rng make_rng(std::initializer_list<std::uint64_t> parts) {
  std::vector<std::uint32_t> words;
  words.reserve(parts.size() * 2);
  for (std::uint64_t p : parts) {
    words.push_back(static_cast<std::uint32_t>(p & 0xffffffffu));
    words.push_back(static_cast<std::uint32_t>(p >> 32));
  }
  std::seed_seq mixed(words.begin(), words.end());
  return Rng(mixed);
}

// Uniform draw in [0, 1) built from the top 53 bits; avoids
// implementation-defined distribution objects where exact reproducibility of
// a single draw matters.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace pickcell
