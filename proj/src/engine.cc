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

#include "clonalnas/engine.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <spdlog/spdlog.h>

namespace clonalnas {

namespace {

// ceil(fraction * n), at least 1 for a non-empty set.
int TopCount(double fraction, std::size_t n) {
  if (n == 0) return 0;
  const int count = static_cast<int>(std::ceil(fraction * n - 1e-9));
  return std::clamp(count, 1, static_cast<int>(n));
}

void SortByRank(std::vector<Antibody>& antibodies) {
  std::stable_sort(antibodies.begin(), antibodies.end(), RanksBefore);
}

void Require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

}  // namespace

void RequireValid(const SearchConfig& c) {
  Require(c.population_size >= 1, "population_size must be at least 1");
  Require(c.generations >= 1, "generations must be at least 1");
  Require(c.select_fraction > 0.0 && c.select_fraction <= 1.0,
          "select_fraction must lie in (0, 1]");
  Require(c.newcomers >= 0 && c.newcomers < c.population_size,
          "newcomers must satisfy 0 <= a < population_size");
  Require(c.clone_factor >= 1, "clone_factor must be at least 1");
  Require(c.stages_max >= 1, "stages_max must be at least 1");
  Require(c.layers_per_cell >= 1, "layers_per_cell must be at least 1");
  Require(c.similarity_proportion > 0.0 && c.similarity_proportion <= 1.0,
          "similarity_proportion must lie in (0, 1]");
  try {
    RequireValid(c.mutation);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  Require(!c.dataset.empty(), "dataset must be named");
  Require(c.budget.train_fraction > 0.0 && c.budget.train_fraction <= 1.0,
          "budget.train_fraction must lie in (0, 1]");
  Require(c.budget.epochs >= 1, "budget.epochs must be at least 1");
}

std::vector<CellCode> StageMemory::Codes() const {
  return Prefix(static_cast<int>(cells.size()));
}

std::vector<CellCode> StageMemory::Prefix(int stages) const {
  std::vector<CellCode> codes;
  for (int i = 0; i < stages && i < static_cast<int>(cells.size()); ++i) {
    codes.push_back(cells[i].code);
  }
  return codes;
}

TerminationDecision CheckTermination(std::span<const double> stage_bests,
                                     int stages_max) {
  if (stage_bests.empty()) {
    throw std::invalid_argument("termination needs at least one stage");
  }
  const int s = static_cast<int>(stage_bests.size());
  const int window_start = std::max(0, s - 3);
  int argmax = window_start;
  for (int i = window_start + 1; i < s; ++i) {
    if (stage_bests[i] > stage_bests[argmax]) argmax = i;
  }

  TerminationDecision decision;
  decision.final_stage = argmax + 1;
  if (s >= 3 &&
      stage_bests[s - 1] <= std::max(stage_bests[s - 2], stage_bests[s - 3])) {
    decision.stop = true;
    decision.reason = "no_improvement";
  } else if (s >= stages_max) {
    decision.stop = true;
    decision.reason = "stages_max";
  } else {
    decision.reason = "continue";
  }
  return decision;
}

SearchEngine::SearchEngine(SearchConfig config, Evaluator& evaluator,
                           ReportSink* sink)
    : config_(std::move(config)), cache_(evaluator), sink_(sink) {
  RequireValid(config_);
  if (config_.same_structure_cells) {
    spdlog::warn("same_structure_cells (q) = {} is accepted but ignored",
                 *config_.same_structure_cells);
  }
}

Antibody SearchEngine::Fresh(int generation, Rng& rng) {
  Antibody ab;
  ab.code = RandomCode(config_.layers_per_cell, rng);
  ab.id = next_id_++;
  ab.born_generation = generation;
  return ab;
}

void SearchEngine::EvaluatePending(std::vector<Antibody>& antibodies,
                                   const StageMemory& memory,
                                   std::vector<EvaluationFailure>* failures) {
  std::vector<std::size_t> pending;
  std::vector<EvaluationRequest> requests;
  const std::vector<CellCode> prefix = memory.Codes();
  for (std::size_t i = 0; i < antibodies.size(); ++i) {
    if (antibodies[i].evaluated()) continue;
    EvaluationRequest request;
    request.id = next_request_id_++;
    request.model = ModelSpec::ForCandidate(prefix, antibodies[i].code);
    request.dataset = config_.dataset;
    request.budget = config_.budget;
    request.seed = static_cast<std::int64_t>(config_.seed);
    requests.push_back(std::move(request));
    pending.push_back(i);
  }
  if (requests.empty()) return;

  std::vector<EvaluationResponse> responses;
  try {
    responses = cache_.Evaluate(requests);
  } catch (const EvaluatorError& e) {
    std::string context;
    if (e.request_id()) {
      for (std::size_t r = 0; r < requests.size(); ++r) {
        if (requests[r].id == *e.request_id()) {
          context = " while evaluating " +
                    requests[r].model.CanonicalText();
        }
      }
    } else {
      context = " while evaluating a batch starting with " +
                requests.front().model.CanonicalText();
    }
    throw SearchAbortedError(e.what() + context);
  }

  for (std::size_t r = 0; r < pending.size(); ++r) {
    Antibody& ab = antibodies[pending[r]];
    const EvaluationResponse& response = responses[r];
    if (response.affinity) {
      ab.affinity = std::clamp(*response.affinity, 0.0, 1.0);
    } else {
      ab.affinity = 0.0;
      if (failures) {
        failures->push_back(
            {ab.id, response.error.value_or("evaluation failed")});
      }
    }
    if (!stage_best_ || RanksBefore(ab, *stage_best_)) stage_best_ = ab;
  }
}

std::vector<Antibody> SearchEngine::RunGeneration(
    std::vector<Antibody> population, const StageMemory& memory, int stage,
    int generation, Rng& rng, GenerationRecord* record) {
  const int n = config_.population_size;
  if (static_cast<int>(population.size()) != n) {
    throw std::invalid_argument("population has " +
                                std::to_string(population.size()) +
                                " antibodies, expected " + std::to_string(n));
  }
  for (const Antibody& ab : population) {
    RequireValid(ab.code);
    if (ab.code.num_layers() != config_.layers_per_cell) {
      throw InvalidCodeError("antibody " + std::to_string(ab.id) +
                             " has the wrong layer count");
    }
  }
  GenerationRecord local;
  GenerationRecord& rec = record ? *record : local;
  rec.stage = stage;
  rec.generation = generation;
  rec.memory = memory.Codes();

  // (1) Affinity against the task with the frozen prefix.
  EvaluatePending(population, memory, &rec.failures);
  rec.population = population;

  // (2) Suppression.
  SuppressionResult suppressed =
      Suppress(population, config_.similarity_proportion);
  for (const Antibody& ab : suppressed.removed) rec.removed.push_back(ab.id);
  std::vector<Antibody> survivors = std::move(suppressed.kept);
  SortByRank(survivors);

  // (3) Clone the top fraction.
  const int selected = TopCount(config_.select_fraction, survivors.size());
  std::vector<Antibody> clones;
  std::vector<double> parent_affinity;
  for (int s = 0; s < selected; ++s) {
    for (int c = 0; c < config_.clone_factor; ++c) {
      Antibody clone;
      clone.code = survivors[s].code;
      clone.id = next_id_++;
      clone.born_generation = generation;
      clones.push_back(std::move(clone));
      parent_affinity.push_back(*survivors[s].affinity);
    }
  }

  // (4) Hypermutation. Clones are already in rank order.
  const int pool = static_cast<int>(clones.size());
  const double a_max =
      *std::max_element(parent_affinity.begin(), parent_affinity.end());
  const double a_avg = std::min(
      a_max, std::accumulate(parent_affinity.begin(), parent_affinity.end(),
                             0.0) / pool);
  rec.clone_pool_size = pool;
  rec.clone_a_max = a_max;
  rec.clone_a_avg = a_avg;
  for (int r = 0; r < pool; ++r) {
    const MutationTier tier = AssignTier(r, pool);
    const double rate =
        MutationRate(parent_affinity[r], a_max, a_avg, config_.mutation);
    Rng clone_rng(SplitSeed(rng));
    clones[r].code = Mutate(clones[r].code, tier, rate, clone_rng);
  }

  // (5) Evaluate clones; the best fraction joins the population.
  EvaluatePending(clones, memory, &rec.failures);
  SortByRank(clones);
  const int kept_clones = TopCount(config_.select_fraction, clones.size());
  rec.clones_kept = kept_clones;
  survivors.insert(survivors.end(), std::make_move_iterator(clones.begin()),
                   std::make_move_iterator(clones.begin() + kept_clones));

  // (6) Cull to N - a, then replenish to N.
  SortByRank(survivors);
  const std::size_t keep = static_cast<std::size_t>(n - config_.newcomers);
  if (survivors.size() > keep) survivors.resize(keep);
  while (static_cast<int>(survivors.size()) < n) {
    survivors.push_back(Fresh(generation, rng));
  }

  rec.best_so_far = stage_best_->affinity.value_or(0.0);
  rec.requests = cache_.requests();
  rec.evaluations = cache_.inner_calls();
  if (sink_) sink_->OnGeneration(rec);
  return survivors;
}

Antibody SearchEngine::RunStage(const StageMemory& memory, Rng& rng,
                                StageRecord* record) {
  const int stage = static_cast<int>(memory.cells.size()) + 1;
  StageRecord local;
  StageRecord& rec = record ? *record : local;
  rec.stage = stage;
  rec.generations.clear();
  const std::uint64_t evaluations_before = cache_.inner_calls();
  stage_best_.reset();

  std::vector<Antibody> population;
  population.reserve(config_.population_size);
  for (int i = 0; i < config_.population_size; ++i) {
    population.push_back(Fresh(0, rng));
  }
  for (int g = 1; g <= config_.generations; ++g) {
    GenerationRecord generation;
    population = RunGeneration(std::move(population), memory, stage, g, rng,
                               &generation);
    rec.generations.push_back(std::move(generation));
  }
  rec.best = *stage_best_;
  rec.evaluations = cache_.inner_calls() - evaluations_before;
  if (sink_) sink_->OnStage(rec);
  return rec.best;
}

SearchReport SearchEngine::RunSearch(Rng& rng) {
  SearchReport report;
  report.config = config_;
  std::vector<double> bests;
  while (true) {
    StageRecord stage;
    const Antibody best = RunStage(report.memory, rng, &stage);
    report.memory.cells.push_back({best.code, *best.affinity});
    bests.push_back(*best.affinity);
    report.stages.push_back(std::move(stage));
    report.termination = CheckTermination(bests, config_.stages_max);
    if (report.termination.stop) break;
  }
  const int final_stage = report.termination.final_stage;
  report.final_model = ModelSpec::ForCandidate(
      report.memory.Prefix(final_stage - 1),
      report.memory.cells[final_stage - 1].code);
  report.best_affinity = report.memory.cells[final_stage - 1].affinity;
  report.requests = cache_.requests();
  report.evaluations = cache_.inner_calls();
  if (sink_) sink_->OnSummary(report);
  return report;
}

SearchReport RunSearch(const SearchConfig& config, Evaluator& evaluator,
                       Rng& rng, ReportSink* sink) {
  SearchEngine engine(config, evaluator, sink);
  return engine.RunSearch(rng);
}

}  // namespace clonalnas
