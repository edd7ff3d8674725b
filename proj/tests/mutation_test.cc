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
#include <cmath>
#include <vector>

#include "doctest.h"
#include "clonalnas/mutation.h"

namespace clonalnas {
namespace {

const MutationParams kDefaults{0.1, 0.2};

TEST_CASE("rate anchors") {
  CHECK(MutationRate(0.9, 0.9, 0.6, kDefaults) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(MutationRate(0.6, 0.9, 0.6, kDefaults) == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(MutationRate(0.3, 0.9, 0.6, kDefaults) == 0.2);
  CHECK(MutationRate(0.75, 0.9, 0.6, kDefaults) ==
        doctest::Approx(0.05).epsilon(1e-12));
  // Degenerate pool: every clone sits at the mean.
  CHECK(MutationRate(0.5, 0.5, 0.5, kDefaults) == 0.1);

  CHECK_THROWS_AS(MutationRate(0.5, 0.4, 0.45, kDefaults), std::invalid_argument);
  CHECK_THROWS_AS(MutationRate(0.5, 0.6, 0.7, kDefaults), std::invalid_argument);
  CHECK_THROWS_AS(MutationRate(-0.1, 0.6, 0.5, kDefaults), std::invalid_argument);
  CHECK_THROWS_AS(RequireValid(MutationParams{0.3, 0.2}), std::invalid_argument);
  CHECK_THROWS_AS(RequireValid(MutationParams{0.0, 0.2}), std::invalid_argument);
  CHECK_NOTHROW(RequireValid(kDefaults));
}

TEST_CASE("rate matches the piecewise formula and is monotone above the mean") {
  Rng rng(11);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    double a_max = unit(rng);
    double a_avg = unit(rng) * a_max;
    if (a_max == a_avg) continue;
    double previous = 1.0;
    for (int i = 0; i <= 1000; ++i) {
      const double a = a_avg + (a_max - a_avg) * i / 1000.0;
      const double expected =
          std::min(0.2, 0.1 * (a_max - a) / (a_max - a_avg));
      const double got = MutationRate(std::min(a, a_max), a_max, a_avg, kDefaults);
      REQUIRE(std::abs(got - expected) <= 1e-12);
      REQUIRE(got <= previous + 1e-15);
      previous = got;
    }
    const double below = a_avg * unit(rng);
    if (below < a_avg) CHECK(MutationRate(below, a_max, a_avg, kDefaults) == 0.2);
  }
}

TEST_CASE("tier by rank") {
  const MutationTier L = MutationTier::kLight;
  const MutationTier M = MutationTier::kModerate;
  const MutationTier D = MutationTier::kDrastic;
  auto tiers = [](int n) {
    std::vector<MutationTier> out;
    for (int r = 0; r < n; ++r) out.push_back(AssignTier(r, n));
    return out;
  };
  CHECK(tiers(1) == std::vector<MutationTier>{L});
  CHECK(tiers(2) == std::vector<MutationTier>{L, D});
  CHECK(tiers(3) == std::vector<MutationTier>{L, M, D});
  CHECK(tiers(4) == std::vector<MutationTier>{L, L, M, D});
  CHECK(tiers(10) == std::vector<MutationTier>{L, L, L, L, M, M, M, D, D, D});
  CHECK_THROWS_AS(AssignTier(3, 3), std::invalid_argument);

  for (int n = 3; n <= 100; ++n) {
    const std::vector<MutationTier> t = tiers(n);
    CHECK(std::is_sorted(t.begin(), t.end()));
    const auto count = [&](MutationTier x) {
      return static_cast<int>(std::count(t.begin(), t.end(), x));
    };
    CHECK(std::abs(count(L) - count(D)) <= 1);
    CHECK(count(M) >= 1);
  }
}

TEST_CASE("tier names") {
  CHECK(TierName(MutationTier::kModerate) == "moderate");
  CHECK(ParseTier("drastic") == MutationTier::kDrastic);
  CHECK_FALSE(ParseTier("wild").has_value());
}

TEST_CASE("region sizes and counts") {
  CHECK(RegionSize(MutationTier::kLight, 7) == 7);
  CHECK(RegionSize(MutationTier::kModerate, 7) == 28);
  CHECK(RegionSize(MutationTier::kDrastic, 7) == 35);
  CHECK(MutationCount(0.0, 28) == 1);
  CHECK(MutationCount(0.1, 28) == 3);
  CHECK(MutationCount(0.2, 7) == 1);
  CHECK(MutationCount(0.5, 7) == 4);
  CHECK(MutationCount(1.0, 7) == 7);
}

int Differences(const CellCode& a, const CellCode& b, std::vector<int>* where) {
  const int bits = static_cast<int>(a.connections.size());
  int diff = 0;
  for (int i = 0; i < bits; ++i) {
    if (a.connections[i] != b.connections[i]) {
      ++diff;
      where->push_back(i);
    }
  }
  for (int i = 0; i < a.num_layers(); ++i) {
    if (a.layer_types[i] != b.layer_types[i]) {
      ++diff;
      where->push_back(bits + i);
    }
  }
  return diff;
}

TEST_CASE("mutations stay inside their region and change the drawn count") {
  Rng rng(1234);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int k = 7;
  const int b = SecondComponentLength(k);
  for (int trial = 0; trial < 3000; ++trial) {
    const CellCode parent = RandomCode(k, rng);
    const MutationTier tier = static_cast<MutationTier>(trial % 3);
    const double rate = trial % 10 == 0 ? 0.0 : unit(rng);
    const MutationOutcome out = MutateDetailed(parent, tier, rate, rng);
    REQUIRE(Validate(out.code).ok());

    std::vector<int> where;
    const int diff = Differences(parent, out.code, &where);
    const int region = tier == MutationTier::kLight      ? k
                       : tier == MutationTier::kModerate ? b
                                                         : b + k;
    const int expected = std::max(
        1, std::min(region, static_cast<int>(std::floor(rate * region + 0.5))));
    REQUIRE(diff == expected);
    CHECK(where == out.positions);
    for (int p : where) {
      if (tier == MutationTier::kLight) CHECK(p >= b - k);
      if (tier != MutationTier::kDrastic) CHECK(p < b);
    }
  }
}

TEST_CASE("extreme rates") {
  Rng rng(3);
  const CellCode parent = RandomCode(5, rng);
  std::vector<int> where;
  CHECK(Differences(parent, Mutate(parent, MutationTier::kModerate, 0.0, rng),
                    &where) == 1);
  where.clear();
  const CellCode all = Mutate(parent, MutationTier::kDrastic, 1.0, rng);
  CHECK(Differences(parent, all, &where) == 15 + 5);

  // Equal seeds give equal mutations.
  Rng a(77);
  Rng b(77);
  CHECK(Mutate(parent, MutationTier::kDrastic, 0.3, a) ==
        Mutate(parent, MutationTier::kDrastic, 0.3, b));
}

TEST_CASE("drawn positions are spread over the region") {
  Rng rng(8);
  const CellCode parent = RandomCode(4, rng);
  std::vector<int> hits(10, 0);
  constexpr int kDraws = 20000;
  for (int i = 0; i < kDraws; ++i) {
    const MutationOutcome out =
        MutateDetailed(parent, MutationTier::kModerate, 0.0, rng);
    REQUIRE(out.positions.size() == 1);
    ++hits[out.positions[0]];
  }
  // Expected 2000 per bit, sd ~42.
  for (int h : hits) {
    CHECK(h > 1800);
    CHECK(h < 2200);
  }
}

}  // namespace
}  // namespace clonalnas
