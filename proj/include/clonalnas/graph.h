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

#ifndef CLONALNAS_GRAPH_H_
#define CLONALNAS_GRAPH_H_

#include <string>
#include <utility>
#include <vector>

#include "clonalnas/genotype.h"
#include <nlohmann/json.hpp>

namespace clonalnas {

// Realized cell DAG over node positions 0 (input), 1..k (layers) and k+1
// (DePooling). Edges always run from a lower to a strictly higher position.
struct CellGraph {
  struct Edge {
    int source;
    int target;

    friend bool operator==(const Edge&, const Edge&) = default;
    friend auto operator<=>(const Edge&, const Edge&) = default;
  };

  int num_layers = 0;
  std::vector<LayerTypeIndex> layer_types;  // layer i at [i - 1]
  std::vector<bool> present;                // indexed by position
  std::vector<Edge> edges;                  // sorted, unique
  bool pruned = false;

  int depooling() const { return num_layers + 1; }
  bool HasEdge(int source, int target) const;
  int InDegree(int position) const;
  int NumPresentNodes() const;
  std::vector<int> PresentLayers() const;

  // Sources with an edge into `position`, ascending.
  std::vector<int> Predecessors(int position) const;

  // True iff the input reaches DePooling along edges.
  bool InputReachesDePooling() const;

  friend bool operator==(const CellGraph&, const CellGraph&) = default;
};

// Chain of frozen memory cells plus the candidate of the current stage.
struct ModelSpec {
  std::vector<CellCode> frozen_cells;
  CellCode candidate_cell;
  int stage_index = 1;  // frozen_cells.size() + 1
  int layers_per_cell = 0;

  static ModelSpec ForCandidate(std::vector<CellCode> frozen,
                                CellCode candidate);

  // Every cell in chain order, candidate last.
  std::vector<CellCode> Cells() const;

  // Unique textual key: frozen cell texts, then the candidate.
  std::string CanonicalText() const;

  friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

// Throws InvalidCodeError on bad codes or a broken stage/prefix invariant.
void RequireValid(const ModelSpec& spec);

// Decodes with the default-connection rule: a layer (or DePooling) whose row
// is all zero is wired straight to the input, and layer 1 always is.
CellGraph Decode(const CellCode& code);

// Keeps only the ancestors of DePooling (plus input and DePooling).
CellGraph PruneUnreachable(const CellGraph& graph);

// Decode followed by pruning.
CellGraph Realize(const CellCode& code);

std::string ExportDot(const CellGraph& graph);
// One cluster per cell, each pruned, chained DePooling -> next input.
std::string ExportDot(const ModelSpec& spec);

// {"nodes": [...], "edges": [[s, t], ...], "pruned": bool}
nlohmann::json GraphToJson(const CellGraph& graph);

std::string NodeName(const CellGraph& graph, int position);

}  // namespace clonalnas

#endif  // CLONALNAS_GRAPH_H_
