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

// Adaptive hypermutation.
//
// The rate of a clone with affinity a' in a pool with maximum a_max and
// mean a_avg is
//
//   P_m = k1 * (a_max - a') / (a_max - a_avg)   if a' >= a_avg
//   P_m = k2                                    if a' <  a_avg
//
// and the clone's rank in the pool picks the region it may touch.

#ifndef CLONALNAS_MUTATION_H_
#define CLONALNAS_MUTATION_H_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "clonalnas/genotype.h"
#include "clonalnas/random.h"

namespace clonalnas {

enum class MutationTier {
  kLight,     // DePooling row only (final k connection bits)
  kModerate,  // all connection bits
  kDrastic,   // connection bits and layer types
};

std::string_view TierName(MutationTier tier);
std::optional<MutationTier> ParseTier(std::string_view name);

struct MutationParams {
  double k1 = 0.1;
  double k2 = 0.2;
};

// Throws std::invalid_argument unless 0 < k1 < k2 < 1.
void RequireValid(const MutationParams& params);

// Throws std::invalid_argument for affinities outside [0, 1] or
// a_avg > a_max or a_prime > a_max. A degenerate pool (a_max == a_avg) rates
// at-or-above-average clones at k1.
double MutationRate(double a_prime, double a_max, double a_avg,
                    const MutationParams& params);

// rank 0 is the highest-affinity clone.
MutationTier AssignTier(int rank, int pool_size);

// Number of positions a tier may touch at layer count k.
int RegionSize(MutationTier tier, int k);

// max(1, round(rate * region)), capped at region.
int MutationCount(double rate, int region);

struct MutationOutcome {
  CellCode code;
  // Positions changed, ascending. Values below B_C index connection bits;
  // B_C + i is layer-type slot i.
  std::vector<int> positions;
};

// Flips the drawn connection bits and resamples drawn layer types from the
// seven other kinds.
MutationOutcome MutateDetailed(const CellCode& code, MutationTier tier,
                               double rate, Rng& rng);

CellCode Mutate(const CellCode& code, MutationTier tier, double rate,
                Rng& rng);

}  // namespace clonalnas

#endif  // CLONALNAS_MUTATION_H_
