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

#ifndef CLONALNAS_SIMILARITY_H_
#define CLONALNAS_SIMILARITY_H_

#include <vector>

#include "clonalnas/antibody.h"
#include "clonalnas/genotype.h"

namespace clonalnas {

inline constexpr double kDefaultSimilarityProportion = 2.0 / 3.0;

// All three throw std::invalid_argument on a length mismatch.
int Hamming(BitSpan a, BitSpan b);
// |A n B| / |A u B| over the set-bit index sets; 1 when both are empty.
double Jaccard(BitSpan a, BitSpan b);
// A.B / (|A|^2 + |B|^2 - A.B); 1 when both are all zero.
double Tanimoto(BitSpan a, BitSpan b);

struct SimilarityVerdict {
  bool similar = false;
  int ones_a = 0;         // set bits in a's DePooling row
  int ones_b = 0;
  int matched_types = 0;  // shared set bits whose source layer types agree
  int reference_ones = 0; // S = max(ones_a, ones_b)
  int threshold = 0;      // ceil(proportion * S)
};

// Compares the DePooling rows (the last k bits). Two codes are similar when
// their row one-counts differ by less than 2 and at least
// ceil(proportion * S) of the shared set bits come from equal layer types.
// Throws std::invalid_argument if the codes differ in k or proportion is
// outside (0, 1].
SimilarityVerdict InterspecificSimilar(const CellCode& x, const CellCode& y,
                                       double proportion);

struct SuppressionResult {
  std::vector<Antibody> kept;
  std::vector<Antibody> removed;
};

// Walks pairs in descending-affinity order and removes the weaker member of
// every similar pair. Removed antibodies cannot remove others. Both outputs
// preserve input order. Throws std::invalid_argument on unevaluated input.
SuppressionResult Suppress(const std::vector<Antibody>& population,
                           double proportion);

}  // namespace clonalnas

#endif  // CLONALNAS_SIMILARITY_H_
