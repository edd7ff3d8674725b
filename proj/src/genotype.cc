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

#include "clonalnas/genotype.h"

#include <charconv>
#include <sstream>

namespace clonalnas {

namespace {

std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' ||
                        s.front() == '\n' || s.front() == '\r')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' ||
                        s.back() == '\n' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> Split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      parts.push_back(s.substr(start));
      return parts;
    }
    parts.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

}  // namespace

BitSpan CellCode::depooling_row() const {
  const std::size_t k = layer_types.size();
  if (connections.size() < k) return {};
  return BitSpan(connections).subspan(connections.size() - k);
}

int SecondComponentLength(int k) {
  if (k < 1) {
    throw std::invalid_argument("layer count must be at least 1, got " +
                                std::to_string(k));
  }
  return (1 + k) * k / 2;
}

int RowOffset(int k, int target) {
  SecondComponentLength(k);
  if (target < 2 || target > DePoolingPosition(k)) {
    throw std::invalid_argument("node " + std::to_string(target) +
                                " has no connection row at k=" +
                                std::to_string(k));
  }
  return (target - 1) * (target - 2) / 2;
}

int ConnectionBitIndex(int k, int target, int source) {
  const int offset = RowOffset(k, target);
  if (source < 1 || source >= target) {
    throw std::invalid_argument("no connection bit for source " +
                                std::to_string(source) + " into node " +
                                std::to_string(target));
  }
  return offset + (source - 1);
}

ValidityReport Validate(const CellCode& code) {
  ValidityReport report;
  const int k = code.num_layers();
  if (k < 1) {
    report.violations.push_back("layer count must be at least 1");
  } else {
    const std::size_t expected = SecondComponentLength(k);
    if (code.connections.size() != expected) {
      report.violations.push_back(
          "wrong connection length: expected " + std::to_string(expected) +
          " bits for k=" + std::to_string(k) + ", got " +
          std::to_string(code.connections.size()));
    }
  }
  for (std::size_t i = 0; i < code.layer_types.size(); ++i) {
    if (code.layer_types[i] >= kNumLayerKinds) {
      report.violations.push_back(
          "unknown layer type " + std::to_string(code.layer_types[i]) +
          " at layer " + std::to_string(i + 1));
    }
  }
  for (std::size_t i = 0; i < code.connections.size(); ++i) {
    if (code.connections[i] > 1) {
      report.violations.push_back("connection bit " + std::to_string(i) +
                                  " is not 0 or 1");
    }
  }
  return report;
}

void RequireValid(const CellCode& code) {
  const ValidityReport report = Validate(code);
  if (report.ok()) return;
  std::string message = "invalid cell code:";
  for (const std::string& v : report.violations) message += " " + v + ";";
  message.pop_back();
  throw InvalidCodeError(message);
}

CellCode RandomCode(int k, Rng& rng) {
  const int bits = SecondComponentLength(k);
  CellCode code;
  code.layer_types.reserve(k);
  for (int i = 0; i < k; ++i) {
    code.layer_types.push_back(
        static_cast<LayerTypeIndex>(UniformIndex(rng, kNumLayerKinds)));
  }
  code.connections.reserve(bits);
  for (int i = 0; i < bits; ++i) code.connections.push_back(FairCoin(rng));
  return code;
}

std::string ToText(const CellCode& code) {
  RequireValid(code);
  const int k = code.num_layers();
  std::string text;
  for (int i = 0; i < k; ++i) {
    if (i > 0) text += ',';
    text += std::to_string(code.layer_types[i]);
  }
  text += '/';
  for (int target = 2; target <= DePoolingPosition(k); ++target) {
    if (target > 2) text += '|';
    const int offset = RowOffset(k, target);
    for (int s = 0; s < target - 1; ++s) {
      text += code.connections[offset + s] ? '1' : '0';
    }
  }
  return text;
}

CellCode FromText(std::string_view text) {
  const std::string_view trimmed = Trim(text);
  const std::size_t slash = trimmed.find('/');
  if (slash == std::string_view::npos) {
    throw CodeParseError("malformed cell code '" + std::string(trimmed) +
                         "': missing '/' between components");
  }
  CellCode code;
  for (std::string_view field : Split(trimmed.substr(0, slash), ',')) {
    field = Trim(field);
    unsigned value = 0;
    const auto [end, ec] =
        std::from_chars(field.data(), field.data() + field.size(), value);
    if (field.empty() || ec != std::errc() ||
        end != field.data() + field.size()) {
      throw CodeParseError("malformed layer index '" + std::string(field) +
                           "'");
    }
    if (value >= static_cast<unsigned>(kNumLayerKinds)) {
      throw CodeParseError("unknown layer type " + std::to_string(value));
    }
    code.layer_types.push_back(static_cast<LayerTypeIndex>(value));
  }
  const int k = code.num_layers();
  const std::vector<std::string_view> rows =
      Split(trimmed.substr(slash + 1), '|');
  if (static_cast<int>(rows.size()) != k) {
    throw CodeParseError("length mismatch: " + std::to_string(k) +
                         " layers need " + std::to_string(k) +
                         " connection rows, got " +
                         std::to_string(rows.size()));
  }
  for (int r = 0; r < k; ++r) {
    const std::string_view row = Trim(rows[r]);
    const int expected = r + 1;
    if (static_cast<int>(row.size()) != expected) {
      throw CodeParseError("length mismatch: connection row " +
                           std::to_string(r + 1) + " needs " +
                           std::to_string(expected) + " bits, got '" +
                           std::string(row) + "'");
    }
    for (char c : row) {
      if (c != '0' && c != '1') {
        throw CodeParseError(std::string("invalid connection digit '") + c +
                             "'");
      }
      code.connections.push_back(c == '1');
    }
  }
  return code;
}

}  // namespace clonalnas
