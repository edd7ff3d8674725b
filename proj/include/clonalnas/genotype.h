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

// Two-component cell genotype.
//
// A cell with k layers is encoded as
//   [[T_1, ..., T_k], [A_1, ..., A_B]]   with B = k(k+1)/2,
// where T_i indexes the layer catalog and the A bits are laid out in rows,
// one row per target node in ascending order:
//
//   target layer 2:  source 1                      (1 bit)
//   target layer 3:  sources 1, 2                  (2 bits)
//   ...
//   target layer k:  sources 1..k-1                (k-1 bits)
//   DePooling:       sources 1..k                  (k bits)
//
// Layer 1 has no row; it is always fed by the cell input. Node positions used
// throughout the library are: 0 = cell input, 1..k = layers, k+1 = DePooling.

#ifndef CLONALNAS_GENOTYPE_H_
#define CLONALNAS_GENOTYPE_H_

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "clonalnas/random.h"

namespace clonalnas {

enum class OpClass { kConvolution, kAveragePooling, kMaxPooling };

struct LayerKind {
  std::string_view name;
  OpClass op_class;
  int kernel;   // square kernel side
  int padding;  // (kernel - 1) / 2, stride 1
};

// Index order is part of the wire format; never reorder.
inline constexpr std::array<LayerKind, 8> kLayerCatalog = {{
    {"Conv1x1", OpClass::kConvolution, 1, 0},
    {"Conv3x3", OpClass::kConvolution, 3, 1},
    {"Conv5x5", OpClass::kConvolution, 5, 2},
    {"Conv7x7", OpClass::kConvolution, 7, 3},
    {"AvgPool3x3", OpClass::kAveragePooling, 3, 1},
    {"AvgPool5x5", OpClass::kAveragePooling, 5, 2},
    {"MaxPool3x3", OpClass::kMaxPooling, 3, 1},
    {"MaxPool5x5", OpClass::kMaxPooling, 5, 2},
}};

inline constexpr int kNumLayerKinds = static_cast<int>(kLayerCatalog.size());

using LayerTypeIndex = std::uint8_t;

// 0/1 values, one per byte.
using Bits = std::vector<std::uint8_t>;
using BitSpan = std::span<const std::uint8_t>;

class InvalidCodeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class CodeParseError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct CellCode {
  std::vector<LayerTypeIndex> layer_types;
  Bits connections;

  int num_layers() const { return static_cast<int>(layer_types.size()); }

  // The final k connection bits: sources 1..k into DePooling.
  BitSpan depooling_row() const;

  friend bool operator==(const CellCode&, const CellCode&) = default;
};

// B = (1 + k) * k / 2. Throws std::invalid_argument for k < 1.
int SecondComponentLength(int k);

constexpr int DePoolingPosition(int k) { return k + 1; }

// Zero-based position of the first bit of `target`'s row.
// `target` is a layer in 2..k or DePoolingPosition(k).
int RowOffset(int k, int target);

// Zero-based bit position of the edge source -> target. Sources are layers
// 1..target-1 (DePooling accepts 1..k). Throws std::invalid_argument for any
// slot that has no bit.
int ConnectionBitIndex(int k, int target, int source);

struct ValidityReport {
  std::vector<std::string> violations;

  bool ok() const { return violations.empty(); }
};

ValidityReport Validate(const CellCode& code);

// Throws InvalidCodeError listing every violation.
void RequireValid(const CellCode& code);

// Layer types uniform over the catalog, bits uniform over {0, 1}.
CellCode RandomCode(int k, Rng& rng);

// "0,1,2,3/1|10|010|1010": layer indices, '/', then one '|'-separated row
// per target in layout order.
std::string ToText(const CellCode& code);
CellCode FromText(std::string_view text);

}  // namespace clonalnas

#endif  // CLONALNAS_GENOTYPE_H_
