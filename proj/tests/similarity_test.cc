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

#include <algorithm>
#include <set>
#include <vector>

#include "doctest.h"
#include "clonalnas/similarity.h"

namespace clonalnas {
namespace {

constexpr double kP = kDefaultSimilarityProportion;

Bits FromMask(int mask, int length) {
  Bits out(length);
  for (int i = 0; i < length; ++i) out[i] = (mask >> i) & 1;
  return out;
}

Bits B(const char* s) {
  Bits out;
  for (; *s; ++s) out.push_back(*s == '1');
  return out;
}

Antibody Make(AntibodyId id, const char* text, double affinity) {
  return Antibody{FromText(text), affinity, id, 0};
}

std::set<AntibodyId> Ids(const std::vector<Antibody>& list) {
  std::set<AntibodyId> out;
  for (const Antibody& a : list) out.insert(a.id);
  return out;
}

TEST_CASE("hamming") {
  CHECK(Hamming(B("1010"), B("1010")) == 0);
  CHECK(Hamming(B("1010"), B("0101")) == 4);
  CHECK_THROWS_AS(Hamming(B("10"), B("101")), std::invalid_argument);

  Rng rng(4);
  for (int trial = 0; trial < 1000; ++trial) {
    const Bits a = FromMask(static_cast<int>(UniformIndex(rng, 1 << 15)), 15);
    const Bits b = FromMask(static_cast<int>(UniformIndex(rng, 1 << 15)), 15);
    int diff = 0;
    for (int i = 0; i < 15; ++i) diff += a[i] != b[i];
    CHECK(Hamming(a, b) == diff);
  }
}

TEST_CASE("jaccard and tanimoto") {
  CHECK(Jaccard(B("1100"), B("1010")) == doctest::Approx(1.0 / 3.0));
  CHECK(Jaccard(B("0110"), B("0110")) == 1.0);
  CHECK(Jaccard(B("1100"), B("0011")) == 0.0);
  CHECK(Jaccard(B("0000"), B("0000")) == 1.0);
  CHECK(Tanimoto(B("0110"), B("0110")) == 1.0);
  CHECK(Tanimoto(B("1100"), B("0011")) == 0.0);
  CHECK(Tanimoto(B("000"), B("000")) == 1.0);
  CHECK_THROWS_AS(Jaccard(B("1"), B("10")), std::invalid_argument);
  CHECK_THROWS_AS(Tanimoto(B("1"), B("10")), std::invalid_argument);

  SUBCASE("agree on every binary pair up to length 6") {
    for (int length = 1; length <= 6; ++length) {
      for (int x = 0; x < (1 << length); ++x) {
        for (int y = 0; y < (1 << length); ++y) {
          const Bits a = FromMask(x, length);
          const Bits b = FromMask(y, length);
          REQUIRE(Tanimoto(a, b) == doctest::Approx(Jaccard(a, b)).epsilon(1e-15));
        }
      }
    }
  }
}

TEST_CASE("interspecific rule") {
  SUBCASE("identical codes are similar") {
    Rng rng(21);
    for (int trial = 0; trial < 2000; ++trial) {
      const int k = 1 + static_cast<int>(UniformIndex(rng, 10));
      const CellCode code = RandomCode(k, rng);
      const SimilarityVerdict v = InterspecificSimilar(code, code, kP);
      REQUIRE(v.similar);
      CHECK(v.matched_types == v.ones_a);
    }
  }

  SUBCASE("disjoint suffixes") {
    const SimilarityVerdict v = InterspecificSimilar(
        FromText("0,1,2,3/0|00|000|1100"), FromText("0,1,2,3/0|00|000|0011"), kP);
    CHECK_FALSE(v.similar);
    CHECK(v.matched_types == 0);
    CHECK(v.ones_a == 2);
    CHECK(v.ones_b == 2);
  }

  SUBCASE("one-count gap of two or more is never similar") {
    Rng rng(22);
    int checked = 0;
    while (checked < 2000) {
      const int k = 2 + static_cast<int>(UniformIndex(rng, 8));
      const CellCode x = RandomCode(k, rng);
      CellCode y = RandomCode(k, rng);
      y.layer_types = x.layer_types;
      const SimilarityVerdict v = InterspecificSimilar(x, y, kP);
      if (std::abs(v.ones_a - v.ones_b) < 2) continue;
      ++checked;
      REQUIRE_FALSE(v.similar);
    }
    // Row 1111 vs 1000: shared position has equal types but the gate fails.
    CHECK_FALSE(InterspecificSimilar(FromText("0,0,0,0/0|00|000|1111"),
                                     FromText("0,0,0,0/0|00|000|1000"), kP)
                    .similar);
  }

  SUBCASE("threshold uses the larger one-count") {
    const SimilarityVerdict v = InterspecificSimilar(
        FromText("0,1,2/0|00|110"), FromText("0,1,2/0|00|111"), kP);
    CHECK(v.reference_ones == 3);
    CHECK(v.threshold == 2);
    CHECK(v.matched_types == 2);
    CHECK(v.similar);

    // Same rows, but the second source layer type differs.
    const SimilarityVerdict w = InterspecificSimilar(
        FromText("0,1,2/0|00|110"), FromText("0,5,2/0|00|111"), kP);
    CHECK(w.matched_types == 1);
    CHECK_FALSE(w.similar);
  }

  SUBCASE("symmetric") {
    Rng rng(23);
    for (int trial = 0; trial < 3000; ++trial) {
      const CellCode x = RandomCode(4, rng);
      CellCode y = RandomCode(4, rng);
      if (trial % 2 == 0) y.layer_types = x.layer_types;
      const SimilarityVerdict a = InterspecificSimilar(x, y, kP);
      const SimilarityVerdict b = InterspecificSimilar(y, x, kP);
      REQUIRE(a.similar == b.similar);
      CHECK(a.matched_types == b.matched_types);
      CHECK(a.threshold == b.threshold);
    }
  }

  CHECK_THROWS_AS(InterspecificSimilar(FromText("0/1"), FromText("0,0/1|11"), kP),
                  std::invalid_argument);
  CHECK_THROWS_AS(InterspecificSimilar(FromText("0/1"), FromText("0/1"), 0.0),
                  std::invalid_argument);
}

TEST_CASE("suppression") {
  SUBCASE("identical pair keeps the better one") {
    const SuppressionResult r = Suppress(
        {Make(1, "0,1/1|11", 0.5), Make(2, "0,1/1|11", 0.9)}, kP);
    CHECK(Ids(r.kept) == std::set<AntibodyId>{2});
    CHECK(Ids(r.removed) == std::set<AntibodyId>{1});
  }

  SUBCASE("dissimilar population is untouched") {
    const SuppressionResult r = Suppress({Make(1, "0,1,2/0|00|100", 0.3),
                                          Make(2, "0,1,2/0|00|011", 0.9),
                                          Make(3, "3,4,5/0|00|100", 0.5)},
                                         kP);
    CHECK(r.kept.size() == 3);
    CHECK(r.removed.empty());
  }

  SUBCASE("removed antibodies do not remove others") {
    // A ~ B and B ~ C, but A and C are not similar.
    const Antibody a = Make(1, "0,1,2/0|00|110", 0.9);
    const Antibody b = Make(2, "0,1,2/0|00|111", 0.8);
    const Antibody c = Make(3, "0,1,2/0|00|011", 0.7);
    REQUIRE(InterspecificSimilar(a.code, b.code, kP).similar);
    REQUIRE(InterspecificSimilar(b.code, c.code, kP).similar);
    REQUIRE_FALSE(InterspecificSimilar(a.code, c.code, kP).similar);
    const SuppressionResult r = Suppress({c, a, b}, kP);
    CHECK(Ids(r.kept) == std::set<AntibodyId>{1, 3});
    CHECK(Ids(r.removed) == std::set<AntibodyId>{2});
    // Input order is preserved.
    CHECK(r.kept[0].id == 3);
    CHECK(r.kept[1].id == 1);
  }

  SUBCASE("ties fall to the older antibody") {
    const SuppressionResult r = Suppress(
        {Make(9, "0,1/1|11", 0.5), Make(4, "0,1/1|11", 0.5)}, kP);
    CHECK(Ids(r.kept) == std::set<AntibodyId>{4});
  }

  SUBCASE("rejects unevaluated antibodies") {
    Antibody pending = Make(1, "0/1", 0.1);
    pending.affinity.reset();
    CHECK_THROWS_AS(Suppress({pending}, kP), std::invalid_argument);
  }

  SUBCASE("random populations") {
    Rng rng(31);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    int populations_with_removals = 0;
    for (int trial = 0; trial < 1000; ++trial) {
      const int n = 2 + static_cast<int>(UniformIndex(rng, 30));
      std::vector<Antibody> population;
      for (int i = 0; i < n; ++i) {
        CellCode code = RandomCode(3, rng);
        // Two layer kinds so that similar pairs are common.
        for (LayerTypeIndex& t : code.layer_types) t %= 2;
        population.push_back({code, unit(rng), static_cast<AntibodyId>(i + 1), 0});
      }
      const SuppressionResult r = Suppress(population, kP);
      REQUIRE(r.kept.size() + r.removed.size() == population.size());

      const Antibody top =
          *std::min_element(population.begin(), population.end(), RanksBefore);
      REQUIRE(Ids(r.kept).count(top.id) == 1);

      // Survivors are pairwise dissimilar; every removal has a better
      // surviving witness.
      for (std::size_t i = 0; i < r.kept.size(); ++i) {
        for (std::size_t j = i + 1; j < r.kept.size(); ++j) {
          CHECK_FALSE(InterspecificSimilar(r.kept[i].code, r.kept[j].code, kP).similar);
        }
      }
      for (const Antibody& gone : r.removed) {
        CHECK(std::any_of(r.kept.begin(), r.kept.end(), [&](const Antibody& s) {
          return RanksBefore(s, gone) &&
                 InterspecificSimilar(s.code, gone.code, kP).similar;
        }));
      }
      if (!r.removed.empty()) ++populations_with_removals;
    }
    CHECK(populations_with_removals > 500);
  }
}

}  // namespace
}  // namespace clonalnas
