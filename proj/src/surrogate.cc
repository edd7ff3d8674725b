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

#include "clonalnas/surrogate.h"

#include <stdexcept>

namespace clonalnas {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kCellSeparator = 0xFFFFFFFFFFFFFFFFULL;
constexpr double kTwoToMinus53 = 1.0 / 9007199254740992.0;

}  // namespace

std::uint64_t Mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t Absorb(std::uint64_t h, std::uint64_t w) {
  return Mix64(h ^ Mix64(w + kGolden));
}

std::vector<std::uint64_t> SymbolString(const CellCode& code) {
  std::vector<std::uint64_t> symbols;
  symbols.reserve(code.layer_types.size() + code.connections.size());
  for (LayerTypeIndex t : code.layer_types) symbols.push_back(t);
  for (std::uint8_t b : code.connections) symbols.push_back(b);
  return symbols;
}

std::uint64_t PrefixKey(const std::vector<CellCode>& frozen_cells) {
  std::uint64_t key = 0;
  for (const CellCode& cell : frozen_cells) {
    for (std::uint64_t s : SymbolString(cell)) key = Absorb(key, s);
    key = Absorb(key, kCellSeparator);
  }
  return key;
}

double SurrogateAffinity(const ModelSpec& model,
                         const SurrogateLandscape& landscape) {
  RequireValid(model);
  if (landscape.epistasis < 0) {
    throw std::invalid_argument("epistasis order must be non-negative");
  }
  const std::vector<std::uint64_t> symbols = SymbolString(model.candidate_cell);
  const std::uint64_t prefix = PrefixKey(model.frozen_cells);
  const std::size_t length = symbols.size();

  double total = 0.0;
  for (std::size_t i = 0; i < length; ++i) {
    std::uint64_t h = Absorb(landscape.seed, prefix);
    h = Absorb(h, i);
    for (int j = 0; j <= landscape.epistasis; ++j) {
      h = Absorb(h, symbols[(i + j) % length]);
    }
    total += static_cast<double>(h >> 11) * kTwoToMinus53;
  }
  return total / static_cast<double>(length);
}

std::vector<EvaluationResponse> SurrogateEvaluator::Evaluate(
    std::span<const EvaluationRequest> requests) {
  std::vector<EvaluationResponse> responses;
  responses.reserve(requests.size());
  for (const EvaluationRequest& request : requests) {
    ++calls_;
    responses.push_back(EvaluationResponse::Success(
        request.id, SurrogateAffinity(request.model, landscape_)));
  }
  return responses;
}

}  // namespace clonalnas
