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

#include "clonalnas/similarity.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace clonalnas {

namespace {

void RequireSameLength(BitSpan a, BitSpan b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("bit sequences differ in length: " +
                                std::to_string(a.size()) + " vs " +
                                std::to_string(b.size()));
  }
}

int CountOnes(BitSpan bits) {
  return static_cast<int>(std::count(bits.begin(), bits.end(), 1));
}

}  // namespace

int Hamming(BitSpan a, BitSpan b) {
  RequireSameLength(a, b);
  int distance = 0;
  for (std::size_t i = 0; i < a.size(); ++i) distance += a[i] != b[i];
  return distance;
}

double Jaccard(BitSpan a, BitSpan b) {
  RequireSameLength(a, b);
  int intersection = 0;
  int set_union = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    intersection += a[i] && b[i];
    set_union += a[i] || b[i];
  }
  if (set_union == 0) return 1.0;
  return static_cast<double>(intersection) / set_union;
}

double Tanimoto(BitSpan a, BitSpan b) {
  RequireSameLength(a, b);
  double dot = 0.0;
  double norm_a = 0.0;
  double norm_b = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += static_cast<double>(a[i]) * b[i];
    norm_a += static_cast<double>(a[i]) * a[i];
    norm_b += static_cast<double>(b[i]) * b[i];
  }
  const double denominator = norm_a + norm_b - dot;
  if (denominator == 0.0) return 1.0;
  return dot / denominator;
}

SimilarityVerdict InterspecificSimilar(const CellCode& x, const CellCode& y,
                                       double proportion) {
  if (!(proportion > 0.0 && proportion <= 1.0)) {
    throw std::invalid_argument("similarity proportion must lie in (0, 1]");
  }
  RequireValid(x);
  RequireValid(y);
  const int k = x.num_layers();
  if (y.num_layers() != k) {
    throw std::invalid_argument("cannot compare cells with " +
                                std::to_string(k) + " and " +
                                std::to_string(y.num_layers()) + " layers");
  }
  const BitSpan row_x = x.depooling_row();
  const BitSpan row_y = y.depooling_row();

  SimilarityVerdict verdict;
  verdict.ones_a = CountOnes(row_x);
  verdict.ones_b = CountOnes(row_y);
  for (int i = 0; i < k; ++i) {
    if (row_x[i] && row_y[i] && x.layer_types[i] == y.layer_types[i]) {
      ++verdict.matched_types;
    }
  }
  verdict.reference_ones = std::max(verdict.ones_a, verdict.ones_b);
  // The epsilon absorbs rounding in proportion * S (2/3 * 3 must give 2).
  verdict.threshold =
      static_cast<int>(std::ceil(proportion * verdict.reference_ones - 1e-9));
  verdict.similar = std::abs(verdict.ones_a - verdict.ones_b) < 2 &&
                    verdict.matched_types >= verdict.threshold;
  return verdict;
}

SuppressionResult Suppress(const std::vector<Antibody>& population,
                           double proportion) {
  for (const Antibody& ab : population) {
    if (!ab.evaluated()) {
      throw std::invalid_argument("cannot suppress unevaluated antibody " +
                                  std::to_string(ab.id));
    }
  }
  std::vector<std::size_t> order(population.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return RanksBefore(population[a], population[b]);
                   });

  std::vector<bool> removed(population.size(), false);
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (removed[order[i]]) continue;
    const Antibody& stronger = population[order[i]];
    for (std::size_t j = i + 1; j < order.size(); ++j) {
      if (removed[order[j]]) continue;
      if (InterspecificSimilar(stronger.code, population[order[j]].code,
                               proportion)
              .similar) {
        removed[order[j]] = true;
      }
    }
  }

  SuppressionResult result;
  for (std::size_t i = 0; i < population.size(); ++i) {
    (removed[i] ? result.removed : result.kept).push_back(population[i]);
  }
  return result;
}

}  // namespace clonalnas
