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

#ifndef CLONALNAS_ANTIBODY_H_
#define CLONALNAS_ANTIBODY_H_

#include <cstdint>
#include <optional>
#include <span>

#include "clonalnas/genotype.h"

namespace clonalnas {

using AntibodyId = std::uint64_t;

// One candidate cell. affinity is empty until evaluated.
struct Antibody {
  CellCode code;
  std::optional<double> affinity;
  AntibodyId id = 0;
  int born_generation = 0;

  bool evaluated() const { return affinity.has_value(); }
};

// Descending affinity, older (lower id) first on ties. Unevaluated last.
inline bool RanksBefore(const Antibody& a, const Antibody& b) {
  const double fa = a.affinity.value_or(-1.0);
  const double fb = b.affinity.value_or(-1.0);
  if (fa != fb) return fa > fb;
  return a.id < b.id;
}

}  // namespace clonalnas

#endif  // CLONALNAS_ANTIBODY_H_
