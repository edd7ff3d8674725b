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

// Immune-network search over cells.
//
// A search runs stages. Each stage searches one new cell with the best cells
// of earlier stages frozen in front of it, for a fixed number of generations:
//
//   1. evaluate every unevaluated antibody against the task
//   2. suppress antibodies similar to a better one
//   3. clone the top fraction h of the survivors, clone_factor copies each
//   4. hypermutate the clones (tier by rank, rate by affinity)
//   5. evaluate the clones and merge the top fraction h of them back
//   6. cull to N - a and top up with fresh random antibodies to N
//
// The stage's best antibody joins the memory and the search stops once a
// stage fails to beat both of the two stages before it.

#ifndef CLONALNAS_ENGINE_H_
#define CLONALNAS_ENGINE_H_

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "clonalnas/antibody.h"
#include "clonalnas/evaluator.h"
#include "clonalnas/graph.h"
#include "clonalnas/mutation.h"
#include "clonalnas/random.h"
#include "clonalnas/similarity.h"

namespace clonalnas {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// An evaluator gave up; the message names the model being evaluated.
class SearchAbortedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SearchConfig {
  int population_size = 50;   // N
  int generations = 20;       // G
  double select_fraction = 0.2;  // h
  int newcomers = 5;          // a
  int clone_factor = 5;
  int stages_max = 4;
  int layers_per_cell = 5;    // k
  double similarity_proportion = kDefaultSimilarityProportion;
  MutationParams mutation;
  std::uint64_t seed = 0;
  std::string dataset = "mnist";
  EvaluationBudget budget;
  // Accepted for compatibility; the search does not use it.
  std::optional<int> same_structure_cells;
};

// Throws ConfigError naming the first broken invariant.
void RequireValid(const SearchConfig& config);

struct MemoryCell {
  CellCode code;
  double affinity = 0.0;
};

struct StageMemory {
  std::vector<MemoryCell> cells;

  std::vector<CellCode> Codes() const;
  std::vector<CellCode> Prefix(int stages) const;
};

struct EvaluationFailure {
  AntibodyId id = 0;
  std::string message;
};

struct GenerationRecord {
  int stage = 0;
  int generation = 0;
  std::vector<Antibody> population;  // after evaluation, before suppression
  std::vector<AntibodyId> removed;   // by suppression
  int clone_pool_size = 0;
  double clone_a_max = 0.0;
  double clone_a_avg = 0.0;
  int clones_kept = 0;
  std::vector<EvaluationFailure> failures;
  double best_so_far = 0.0;          // stage running maximum
  std::vector<CellCode> memory;      // frozen prefix used for this stage
  std::uint64_t requests = 0;        // cumulative for the search
  std::uint64_t evaluations = 0;     // cumulative, excluding cache hits
};

struct StageRecord {
  int stage = 0;
  Antibody best;
  std::vector<GenerationRecord> generations;
  std::uint64_t evaluations = 0;  // within this stage, excluding cache hits
};

struct TerminationDecision {
  bool stop = false;
  std::string reason;    // "continue", "no_improvement" or "stages_max"
  int final_stage = 0;   // 1-based stage whose prefix is the final model
};

// After stage s >= 3, stops iff best(s) <= max(best(s-1), best(s-2)); also
// stops at stages_max. The final stage is the argmax over the last three
// stage bests, earliest on ties. Throws std::invalid_argument when empty.
TerminationDecision CheckTermination(std::span<const double> stage_bests,
                                     int stages_max);

struct SearchReport {
  SearchConfig config;
  std::vector<StageRecord> stages;
  StageMemory memory;
  TerminationDecision termination;
  ModelSpec final_model;
  double best_affinity = 0.0;
  std::uint64_t requests = 0;
  std::uint64_t evaluations = 0;
};

// Receives records as soon as they are complete.
class ReportSink {
 public:
  virtual ~ReportSink() = default;
  virtual void OnGeneration(const GenerationRecord&) {}
  virtual void OnStage(const StageRecord&) {}
  virtual void OnSummary(const SearchReport&) {}
};

class SearchEngine {
 public:
  // Every evaluation goes through a cache in front of `evaluator`.
  SearchEngine(SearchConfig config, Evaluator& evaluator,
               ReportSink* sink = nullptr);

  // One generation over a population of exactly N; returns exactly N.
  std::vector<Antibody> RunGeneration(std::vector<Antibody> population,
                                      const StageMemory& memory, int stage,
                                      int generation, Rng& rng,
                                      GenerationRecord* record = nullptr);

  // A fresh population searched for G generations against `memory` as the
  // frozen prefix. Returns the best antibody evaluated in the stage.
  Antibody RunStage(const StageMemory& memory, Rng& rng,
                    StageRecord* record = nullptr);

  SearchReport RunSearch(Rng& rng);

  const CachedEvaluator& cache() const { return cache_; }
  const SearchConfig& config() const { return config_; }

 private:
  Antibody Fresh(int generation, Rng& rng);
  void EvaluatePending(std::vector<Antibody>& antibodies,
                       const StageMemory& memory,
                       std::vector<EvaluationFailure>* failures);

  SearchConfig config_;
  CachedEvaluator cache_;
  ReportSink* sink_;
  AntibodyId next_id_ = 1;
  std::uint64_t next_request_id_ = 1;
  std::optional<Antibody> stage_best_;
};

// Convenience wrapper: SearchEngine(config, evaluator, sink).RunSearch(rng).
SearchReport RunSearch(const SearchConfig& config, Evaluator& evaluator,
                       Rng& rng, ReportSink* sink = nullptr);

}  // namespace clonalnas

#endif  // CLONALNAS_ENGINE_H_
