// Copyright 2026 The clonalnas Authors.
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

#ifndef CLONALNAS_RANDOM_H_
#define CLONALNAS_RANDOM_H_

#include <cstdint>
#include <random>

namespace clonalnas {

// All stochastic operations draw from this engine. mt19937_64 output is fixed
// by the standard, unlike the std:: distributions, so the helpers below are
// written out to keep seeded runs identical across standard libraries.
using Rng = std::mt19937_64;

// Uniform integer in [0, bound). bound must be positive.
inline std::uint64_t UniformIndex(Rng& rng, std::uint64_t bound) {
  const std::uint64_t limit = Rng::max() - Rng::max() % bound;
  std::uint64_t draw;
  do {
    draw = rng();
  } while (draw >= limit);
  return draw % bound;
}

inline bool FairCoin(Rng& rng) { return (rng() >> 63) != 0; }

// Fresh seed for a child stream; children are independent of how many draws
// the child later consumes.
inline std::uint64_t SplitSeed(Rng& rng) { return rng(); }

}  // namespace clonalnas

#endif  // CLONALNAS_RANDOM_H_
