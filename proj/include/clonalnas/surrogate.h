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

// NK-style surrogate affinity over the cell genotype.
//
// The candidate is flattened to a symbol string s of length L: the k layer
// indices followed by the B connection bits. Position i contributes
//
//   f_i = (h_i >> 11) * 2^-53
//   h_i = Absorb(...Absorb(Absorb(Absorb(seed, prefix), i), s_i)...,
//                s_{(i+E) mod L})
//
// where E is the epistasis order, prefix is the key of the frozen cells and
//
//   Absorb(h, w) = Mix64(h ^ Mix64(w + 0x9E3779B97F4A7C15))
//   Mix64(z):  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//              z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//              return z ^ (z >> 31)
//
// all in wrapping 64-bit arithmetic. The affinity is the mean of f_i, summed
// in index order. The prefix key starts at 0 and absorbs, per frozen cell in
// chain order, every symbol and then the separator 0xFFFFFFFFFFFFFFFF.

#ifndef CLONALNAS_SURROGATE_H_
#define CLONALNAS_SURROGATE_H_

#include <atomic>
#include <cstdint>
#include <vector>

#include "clonalnas/evaluator.h"
#include "clonalnas/graph.h"

namespace clonalnas {

struct SurrogateLandscape {
  std::uint64_t seed = 0;
  int epistasis = 3;
};

std::uint64_t Mix64(std::uint64_t z);
std::uint64_t Absorb(std::uint64_t h, std::uint64_t w);

// Layer indices followed by connection bits.
std::vector<std::uint64_t> SymbolString(const CellCode& code);

std::uint64_t PrefixKey(const std::vector<CellCode>& frozen_cells);

// Throws InvalidCodeError for an invalid spec and std::invalid_argument for a
// negative epistasis order.
double SurrogateAffinity(const ModelSpec& model,
                         const SurrogateLandscape& landscape);

class SurrogateEvaluator : public Evaluator {
 public:
  explicit SurrogateEvaluator(SurrogateLandscape landscape)
      : landscape_(landscape) {}

  std::vector<EvaluationResponse> Evaluate(
      std::span<const EvaluationRequest> requests) override;

  const SurrogateLandscape& landscape() const { return landscape_; }
  std::uint64_t calls() const { return calls_.load(); }

 private:
  SurrogateLandscape landscape_;
  std::atomic<std::uint64_t> calls_{0};
};

}  // namespace clonalnas

#endif  // CLONALNAS_SURROGATE_H_
