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

#include "clonalnas/graph.h"

#include <algorithm>
#include <sstream>

namespace clonalnas {

namespace {

std::string NodeLabel(const CellGraph& graph, int position) {
  if (position == 0) return "Input";
  if (position == graph.depooling()) return "DePooling\\n1x1 conv";
  const LayerKind& kind = kLayerCatalog[graph.layer_types[position - 1]];
  return "L" + std::to_string(position) + "\\n" + std::string(kind.name) +
         " (k=" + std::to_string(kind.kernel) + ")";
}

void EmitCellBody(std::ostringstream& out, const CellGraph& graph,
                  const std::string& prefix, const std::string& indent) {
  for (int p = 0; p <= graph.depooling(); ++p) {
    if (!graph.present[p]) continue;
    out << indent << prefix << p << " [label=\"" << NodeLabel(graph, p)
        << "\"];\n";
  }
  for (const CellGraph::Edge& e : graph.edges) {
    out << indent << prefix << e.source << " -> " << prefix << e.target
        << ";\n";
  }
}

}  // namespace

bool CellGraph::HasEdge(int source, int target) const {
  return std::binary_search(edges.begin(), edges.end(), Edge{source, target});
}

int CellGraph::InDegree(int position) const {
  return static_cast<int>(std::count_if(
      edges.begin(), edges.end(),
      [position](const Edge& e) { return e.target == position; }));
}

int CellGraph::NumPresentNodes() const {
  return static_cast<int>(std::count(present.begin(), present.end(), true));
}

std::vector<int> CellGraph::PresentLayers() const {
  std::vector<int> layers;
  for (int p = 1; p <= num_layers; ++p) {
    if (present[p]) layers.push_back(p);
  }
  return layers;
}

std::vector<int> CellGraph::Predecessors(int position) const {
  std::vector<int> sources;
  for (const Edge& e : edges) {
    if (e.target == position) sources.push_back(e.source);
  }
  return sources;
}

bool CellGraph::InputReachesDePooling() const {
  std::vector<bool> reached(present.size(), false);
  reached[0] = present[0];
  // Edges are sorted by source, and sources precede targets.
  for (const Edge& e : edges) {
    if (reached[e.source]) reached[e.target] = true;
  }
  return reached[depooling()];
}

ModelSpec ModelSpec::ForCandidate(std::vector<CellCode> frozen,
                                  CellCode candidate) {
  ModelSpec spec;
  spec.stage_index = static_cast<int>(frozen.size()) + 1;
  spec.layers_per_cell = candidate.num_layers();
  spec.frozen_cells = std::move(frozen);
  spec.candidate_cell = std::move(candidate);
  return spec;
}

std::vector<CellCode> ModelSpec::Cells() const {
  std::vector<CellCode> cells = frozen_cells;
  cells.push_back(candidate_cell);
  return cells;
}

std::string ModelSpec::CanonicalText() const {
  std::string text;
  for (const CellCode& c : frozen_cells) text += ToText(c) + ";";
  text += ToText(candidate_cell);
  return text;
}

void RequireValid(const ModelSpec& spec) {
  for (const CellCode& c : spec.frozen_cells) RequireValid(c);
  RequireValid(spec.candidate_cell);
  if (spec.stage_index != static_cast<int>(spec.frozen_cells.size()) + 1) {
    throw InvalidCodeError("stage index " + std::to_string(spec.stage_index) +
                           " does not match " +
                           std::to_string(spec.frozen_cells.size()) +
                           " frozen cells");
  }
  if (spec.candidate_cell.num_layers() != spec.layers_per_cell) {
    throw InvalidCodeError("candidate has " +
                           std::to_string(spec.candidate_cell.num_layers()) +
                           " layers, spec declares " +
                           std::to_string(spec.layers_per_cell));
  }
}

CellGraph Decode(const CellCode& code) {
  RequireValid(code);
  const int k = code.num_layers();
  CellGraph graph;
  graph.num_layers = k;
  graph.layer_types = code.layer_types;
  graph.present.assign(k + 2, true);

  graph.edges.push_back({0, 1});
  for (int target = 2; target <= DePoolingPosition(k); ++target) {
    const int offset = RowOffset(k, target);
    bool any = false;
    for (int source = 1; source < target; ++source) {
      if (code.connections[offset + source - 1]) {
        graph.edges.push_back({source, target});
        any = true;
      }
    }
    if (!any) graph.edges.push_back({0, target});
  }
  std::sort(graph.edges.begin(), graph.edges.end());
  return graph;
}

CellGraph PruneUnreachable(const CellGraph& graph) {
  const int dep = graph.depooling();
  std::vector<bool> keep(graph.present.size(), false);
  keep[dep] = graph.present[dep];
  // Reverse topological sweep: targets are always above their sources.
  for (auto it = graph.edges.rbegin(); it != graph.edges.rend(); ++it) {
    if (keep[it->target]) keep[it->source] = true;
  }
  keep[0] = graph.present[0];

  CellGraph out = graph;
  for (std::size_t p = 0; p < keep.size(); ++p) {
    out.present[p] = graph.present[p] && keep[p];
  }
  std::erase_if(out.edges, [&](const CellGraph::Edge& e) {
    return !out.present[e.source] || !out.present[e.target];
  });
  out.pruned = true;
  return out;
}

CellGraph Realize(const CellCode& code) { return PruneUnreachable(Decode(code)); }

std::string NodeName(const CellGraph& graph, int position) {
  if (position == 0) return "Input";
  if (position == graph.depooling()) return "DePooling";
  return "L" + std::to_string(position);
}

std::string ExportDot(const CellGraph& graph) {
  std::ostringstream out;
  out << "digraph cell {\n";
  out << "  rankdir=TB;\n";
  EmitCellBody(out, graph, "n", "  ");
  out << "}\n";
  return out.str();
}

std::string ExportDot(const ModelSpec& spec) {
  const std::vector<CellCode> cells = spec.Cells();
  std::ostringstream out;
  out << "digraph model {\n";
  out << "  rankdir=TB;\n";
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const CellGraph graph = Realize(cells[c]);
    const std::string prefix = "c" + std::to_string(c + 1) + "_n";
    const bool candidate = c + 1 == cells.size();
    out << "  subgraph cluster_" << c + 1 << " {\n";
    out << "    label=\"cell " << c + 1
        << (candidate ? " (candidate)" : " (frozen)") << "\";\n";
    EmitCellBody(out, graph, prefix, "    ");
    out << "  }\n";
  }
  // Cells chain strictly: DePooling of one cell feeds the next cell's input.
  for (std::size_t c = 0; c + 1 < cells.size(); ++c) {
    out << "  c" << c + 1 << "_n" << DePoolingPosition(cells[c].num_layers())
        << " -> c" << c + 2 << "_n0;\n";
  }
  out << "}\n";
  return out.str();
}

nlohmann::json GraphToJson(const CellGraph& graph) {
  nlohmann::json nodes = nlohmann::json::array();
  for (int p = 0; p <= graph.depooling(); ++p) {
    if (!graph.present[p]) continue;
    nlohmann::json node = {{"position", p}, {"name", NodeName(graph, p)}};
    if (p >= 1 && p <= graph.num_layers) {
      const LayerKind& kind = kLayerCatalog[graph.layer_types[p - 1]];
      node["kind"] = kind.name;
      node["kernel"] = kind.kernel;
    }
    nodes.push_back(std::move(node));
  }
  nlohmann::json edges = nlohmann::json::array();
  for (const CellGraph::Edge& e : graph.edges) {
    edges.push_back({e.source, e.target});
  }
  return {{"nodes", nodes}, {"edges", edges}, {"pruned", graph.pruned}};
}

}  // namespace clonalnas
