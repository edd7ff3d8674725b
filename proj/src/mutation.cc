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

#include "clonalnas/mutation.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace clonalnas {

namespace {

void RequireUnit(double value, const char* what) {
  if (!(value >= 0.0 && value <= 1.0)) {
    throw std::invalid_argument(std::string(what) + " must lie in [0, 1], got " +
                                std::to_string(value));
  }
}

// ceil(part * n / 3) without floating point.
int TertileBoundary(int part, int n) { return (part * n + 2) / 3; }

}  // namespace

std::string_view TierName(MutationTier tier) {
  switch (tier) {
    case MutationTier::kLight:
      return "light";
    case MutationTier::kModerate:
      return "moderate";
    case MutationTier::kDrastic:
      return "drastic";
  }
  return "unknown";
}

std::optional<MutationTier> ParseTier(std::string_view name) {
  if (name == "light") return MutationTier::kLight;
  if (name == "moderate") return MutationTier::kModerate;
  if (name == "drastic") return MutationTier::kDrastic;
  return std::nullopt;
}

void RequireValid(const MutationParams& params) {
  if (!(params.k1 > 0.0 && params.k1 < 1.0 && params.k2 > 0.0 &&
        params.k2 < 1.0)) {
    throw std::invalid_argument("mutation parameters k1, k2 must lie in (0, 1)");
  }
  if (!(params.k1 < params.k2)) {
    throw std::invalid_argument("mutation parameters require k1 < k2, got k1=" +
                                std::to_string(params.k1) +
                                " k2=" + std::to_string(params.k2));
  }
}

double MutationRate(double a_prime, double a_max, double a_avg,
                    const MutationParams& params) {
  RequireUnit(a_prime, "clone affinity");
  RequireUnit(a_max, "pool maximum affinity");
  RequireUnit(a_avg, "pool mean affinity");
  if (a_avg > a_max || a_prime > a_max) {
    throw std::invalid_argument(
        "affinities must satisfy a_avg <= a_max and a' <= a_max");
  }
  if (a_prime < a_avg) return params.k2;
  if (a_max == a_avg) return params.k1;
  const double rate = params.k1 * (a_max - a_prime) / (a_max - a_avg);
  return std::clamp(rate, 0.0, params.k2);
}

MutationTier AssignTier(int rank, int pool_size) {
  if (pool_size <= 0) throw std::invalid_argument("empty clone pool");
  if (rank < 0 || rank >= pool_size) {
    throw std::invalid_argument("rank " + std::to_string(rank) +
                                " outside pool of " + std::to_string(pool_size));
  }
  if (pool_size < 3) {
    if (rank == 0) return MutationTier::kLight;
    if (rank == pool_size - 1) return MutationTier::kDrastic;
    return MutationTier::kModerate;
  }
  if (rank < TertileBoundary(1, pool_size)) return MutationTier::kLight;
  if (rank < TertileBoundary(2, pool_size)) return MutationTier::kModerate;
  return MutationTier::kDrastic;
}

int RegionSize(MutationTier tier, int k) {
  const int bits = SecondComponentLength(k);
  switch (tier) {
    case MutationTier::kLight:
      return k;
    case MutationTier::kModerate:
      return bits;
    case MutationTier::kDrastic:
      return bits + k;
  }
  return 0;
}

int MutationCount(double rate, int region) {
  RequireUnit(rate, "mutation rate");
  const long drawn = std::lround(rate * region);
  return static_cast<int>(std::clamp<long>(drawn, 1, region));
}

MutationOutcome MutateDetailed(const CellCode& code, MutationTier tier,
                               double rate, Rng& rng) {
  RequireValid(code);
  const int k = code.num_layers();
  const int bits = SecondComponentLength(k);
  const int region = RegionSize(tier, k);
  const int count = MutationCount(rate, region);
  // Light covers only the trailing row; shift its offsets onto the bits.
  const int base = tier == MutationTier::kLight ? bits - k : 0;

  // Partial Fisher-Yates: the first `count` entries are a uniform sample
  // without replacement.
  std::vector<int> slots(region);
  std::iota(slots.begin(), slots.end(), base);
  for (int i = 0; i < count; ++i) {
    const int j = i + static_cast<int>(UniformIndex(rng, region - i));
    std::swap(slots[i], slots[j]);
  }

  MutationOutcome outcome{code, {}};
  outcome.positions.assign(slots.begin(), slots.begin() + count);
  std::sort(outcome.positions.begin(), outcome.positions.end());
  for (int pos : outcome.positions) {
    if (pos < bits) {
      outcome.code.connections[pos] ^= 1;
    } else {
      LayerTypeIndex& type = outcome.code.layer_types[pos - bits];
      auto draw = static_cast<LayerTypeIndex>(
          UniformIndex(rng, kNumLayerKinds - 1));
      if (draw >= type) ++draw;
      type = draw;
    }
  }
  return outcome;
}

CellCode Mutate(const CellCode& code, MutationTier tier, double rate,
                Rng& rng) {
  return MutateDetailed(code, tier, rate, rng).code;
}

}  // namespace clonalnas
