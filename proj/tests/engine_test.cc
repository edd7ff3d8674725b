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
#include <set>
#include <vector>

#include "doctest.h"
#include "clonalnas/engine.h"
#include "clonalnas/surrogate.h"

namespace clonalnas {
namespace {

SearchConfig Small() {
  SearchConfig c;
  c.population_size = 12;
  c.generations = 4;
  c.stages_max = 3;
  c.layers_per_cell = 4;
  c.seed = 5;
  return c;
}

// Wraps the surrogate and keeps every request it sees.
class RecordingEvaluator : public Evaluator {
 public:
  explicit RecordingEvaluator(SurrogateLandscape land) : inner(land) {}
  std::vector<EvaluationResponse> Evaluate(
      std::span<const EvaluationRequest> requests) override {
    seen.insert(seen.end(), requests.begin(), requests.end());
    return inner.Evaluate(requests);
  }
  SurrogateEvaluator inner;
  std::vector<EvaluationRequest> seen;
};

// Fails every candidate whose first layer type is a max-pooling layer.
class PickyEvaluator : public Evaluator {
 public:
  std::vector<EvaluationResponse> Evaluate(
      std::span<const EvaluationRequest> requests) override {
    std::vector<EvaluationResponse> out;
    for (const EvaluationRequest& r : requests) {
      if (r.model.candidate_cell.layer_types[0] >= 6) {
        out.push_back(EvaluationResponse::Failure(r.id, "diverged"));
      } else {
        out.push_back(EvaluationResponse::Success(r.id, 0.5));
      }
    }
    return out;
  }
};

class ExplodingEvaluator : public Evaluator {
 public:
  std::vector<EvaluationResponse> Evaluate(
      std::span<const EvaluationRequest> requests) override {
    throw EvaluatorError("worker exited", requests.back().id);
  }
};

class CollectingSink : public ReportSink {
 public:
  void OnGeneration(const GenerationRecord& g) override { generations.push_back(g); }
  void OnStage(const StageRecord& s) override { stages.push_back(s.stage); }
  void OnSummary(const SearchReport&) override { ++summaries; }
  std::vector<GenerationRecord> generations;
  std::vector<int> stages;
  int summaries = 0;
};

TEST_CASE("config validation") {
  CHECK_NOTHROW(RequireValid(SearchConfig{}));
  auto broken = [](auto mutate) {
    SearchConfig c;
    mutate(c);
    return c;
  };
  CHECK_THROWS_AS(RequireValid(broken([](SearchConfig& c) { c.population_size = 0; })), ConfigError);
  CHECK_THROWS_AS(RequireValid(broken([](SearchConfig& c) { c.newcomers = 50; })), ConfigError);
  CHECK_THROWS_AS(RequireValid(broken([](SearchConfig& c) { c.select_fraction = 0.0; })), ConfigError);
  CHECK_THROWS_AS(RequireValid(broken([](SearchConfig& c) { c.mutation.k1 = 0.3; })), ConfigError);
  CHECK_THROWS_AS(RequireValid(broken([](SearchConfig& c) { c.similarity_proportion = 1.5; })), ConfigError);
  CHECK_THROWS_AS(RequireValid(broken([](SearchConfig& c) { c.budget.epochs = 0; })), ConfigError);
  CHECK_THROWS_AS(RequireValid(broken([](SearchConfig& c) { c.dataset.clear(); })), ConfigError);

  SearchConfig with_q = Small();
  with_q.same_structure_cells = 2;
  SurrogateEvaluator eval({});
  CHECK_NOTHROW(SearchEngine(with_q, eval));
}

TEST_CASE("termination rule") {
  auto decide = [](std::vector<double> bests, int stages_max = 10) {
    return CheckTermination(bests, stages_max);
  };
  CHECK_FALSE(decide({0.5}).stop);
  CHECK_FALSE(decide({0.5, 0.4}).stop);
  const TerminationDecision grow = decide({0.5, 0.6, 0.7});
  CHECK_FALSE(grow.stop);
  CHECK(grow.reason == "continue");

  const TerminationDecision flat = decide({0.5, 0.7, 0.7});
  CHECK(flat.stop);
  CHECK(flat.reason == "no_improvement");
  CHECK(flat.final_stage == 2);

  const TerminationDecision drop = decide({0.5, 0.7, 0.6});
  CHECK(drop.stop);
  CHECK(drop.final_stage == 2);

  // Beats the previous stage but not the one before it.
  CHECK(decide({0.9, 0.5, 0.8}).stop);
  CHECK(decide({0.9, 0.5, 0.8}).final_stage == 1);
  CHECK_FALSE(decide({0.1, 0.9, 0.5, 0.95}).stop);
  CHECK(decide({0.1, 0.9, 0.5, 0.9}).final_stage == 2);

  const TerminationDecision capped = decide({0.1, 0.2, 0.3, 0.4}, 4);
  CHECK(capped.stop);
  CHECK(capped.reason == "stages_max");
  CHECK(capped.final_stage == 4);
  CHECK(decide({0.3}, 1).reason == "stages_max");
  CHECK(decide({0.3}, 1).final_stage == 1);
  CHECK_THROWS_AS(decide({}), std::invalid_argument);
}

TEST_CASE("generation keeps the population at N") {
  SurrogateEvaluator eval({3, 3});
  SearchConfig c = Small();
  for (int n : {1, 2, 3, 7, 12, 30}) {
    c.population_size = n;
    c.newcomers = std::min(2, n - 1);
    SearchEngine engine(c, eval);
    Rng rng(n);
    std::vector<Antibody> pop;
    for (int i = 0; i < n; ++i) {
      pop.push_back({RandomCode(c.layers_per_cell, rng), {}, AntibodyId(1000 + i), 0});
    }
    StageMemory memory;
    for (int g = 1; g <= 5; ++g) {
      GenerationRecord rec;
      pop = engine.RunGeneration(pop, memory, 1, g, rng, &rec);
      REQUIRE(static_cast<int>(pop.size()) == n);
      CHECK(rec.population.size() == static_cast<std::size_t>(n));
      for (const Antibody& ab : rec.population) CHECK(ab.evaluated());
      CHECK(rec.clone_pool_size ==
            c.clone_factor *
                static_cast<int>(std::ceil(c.select_fraction *
                                           (n - static_cast<int>(rec.removed.size())) -
                                           1e-9)));
      CHECK(rec.clone_a_avg <= rec.clone_a_max);
    }
  }
  c.population_size = 12;
  c.newcomers = 5;
  SearchEngine engine(c, eval);
  Rng rng(1);
  CHECK_THROWS_AS(engine.RunGeneration({}, StageMemory{}, 1, 1, rng),
                  std::invalid_argument);
}

TEST_CASE("search records") {
  SurrogateEvaluator eval({11, 3});
  CollectingSink sink;
  SearchConfig c = Small();
  Rng rng(c.seed);
  const SearchReport report = RunSearch(c, eval, rng, &sink);

  REQUIRE(!report.stages.empty());
  CHECK(sink.summaries == 1);
  CHECK(sink.generations.size() == report.stages.size() * c.generations);

  for (const StageRecord& stage : report.stages) {
    REQUIRE(stage.generations.size() == static_cast<std::size_t>(c.generations));
    double previous = 0.0;
    for (const GenerationRecord& g : stage.generations) {
      CHECK(g.best_so_far >= previous);
      previous = g.best_so_far;
      for (const Antibody& ab : g.population) CHECK(*ab.affinity <= g.best_so_far);
      CHECK(static_cast<int>(g.memory.size()) == stage.stage - 1);
      CHECK(g.evaluations <= g.requests);
    }
    CHECK(*stage.best.affinity == stage.generations.back().best_so_far);
  }

  // Memory holds each stage's best; stage s runs against the first s-1.
  REQUIRE(report.memory.cells.size() == report.stages.size());
  for (std::size_t s = 0; s < report.stages.size(); ++s) {
    CHECK(report.memory.cells[s].code == report.stages[s].best.code);
    for (const GenerationRecord& g : report.stages[s].generations) {
      CHECK(g.memory == report.memory.Prefix(static_cast<int>(s)));
    }
  }
  CHECK(report.final_model.stage_index == report.termination.final_stage);
  CHECK(report.best_affinity ==
        report.memory.cells[report.termination.final_stage - 1].affinity);
  CHECK(report.evaluations == eval.calls());
}

TEST_CASE("requests carry the frozen prefix") {
  RecordingEvaluator eval({2, 3});
  SearchConfig c = Small();
  c.stages_max = 2;
  Rng rng(9);
  SearchEngine engine(c, eval);
  const SearchReport report = engine.RunSearch(rng);
  std::set<std::size_t> depths;
  for (const EvaluationRequest& r : eval.seen) {
    depths.insert(r.model.frozen_cells.size());
    CHECK(r.dataset == "mnist");
    CHECK(r.model.layers_per_cell == c.layers_per_cell);
    if (r.model.frozen_cells.size() == 1) {
      CHECK(r.model.frozen_cells[0] == report.memory.cells[0].code);
    }
  }
  CHECK(depths == std::set<std::size_t>{0, 1});
  // Each distinct model reached the evaluator once.
  std::set<std::string> keys;
  for (const EvaluationRequest& r : eval.seen) keys.insert(CacheKey(r));
  CHECK(keys.size() == eval.seen.size());
  CHECK(engine.cache().hits() + eval.seen.size() == engine.cache().requests());
}

TEST_CASE("evaluation count stays within the per-generation budget") {
  SurrogateEvaluator eval({4, 3});
  SearchConfig c = Small();
  c.stages_max = 1;
  Rng rng(4);
  const SearchReport report = RunSearch(c, eval, rng);
  const int clones = c.clone_factor *
                     static_cast<int>(std::ceil(c.select_fraction * c.population_size));
  CHECK(report.requests <=
        static_cast<std::uint64_t>(c.generations * (c.population_size + clones)));
}

TEST_CASE("same seed, same search") {
  SearchConfig c = Small();
  auto run = [&](std::uint64_t seed) {
    SurrogateEvaluator eval({21, 3});
    Rng rng(seed);
    return RunSearch(c, eval, rng);
  };
  const SearchReport a = run(1);
  const SearchReport b = run(1);
  const SearchReport other = run(2);
  REQUIRE(a.stages.size() == b.stages.size());
  for (std::size_t s = 0; s < a.stages.size(); ++s) {
    for (std::size_t g = 0; g < a.stages[s].generations.size(); ++g) {
      const auto& pa = a.stages[s].generations[g].population;
      const auto& pb = b.stages[s].generations[g].population;
      REQUIRE(pa.size() == pb.size());
      for (std::size_t i = 0; i < pa.size(); ++i) {
        CHECK(pa[i].code == pb[i].code);
        CHECK(pa[i].id == pb[i].id);
        CHECK(pa[i].affinity == pb[i].affinity);
      }
    }
  }
  CHECK(a.memory.Codes() == b.memory.Codes());
  CHECK(a.memory.Codes() != other.memory.Codes());
}

TEST_CASE("failed evaluations score zero; evaluator loss aborts") {
  PickyEvaluator picky;
  SearchConfig c = Small();
  c.stages_max = 1;
  CollectingSink sink;
  Rng rng(3);
  const SearchReport report = RunSearch(c, picky, rng, &sink);
  int failures = 0;
  for (const GenerationRecord& g : sink.generations) {
    failures += static_cast<int>(g.failures.size());
    for (const EvaluationFailure& f : g.failures) CHECK(f.message == "diverged");
    for (const Antibody& ab : g.population) {
      CHECK(*ab.affinity == (ab.code.layer_types[0] >= 6 ? 0.0 : 0.5));
    }
  }
  CHECK(failures > 0);
  CHECK(report.best_affinity == 0.5);

  ExplodingEvaluator boom;
  Rng rng2(3);
  try {
    RunSearch(c, boom, rng2);
    FAIL("expected SearchAbortedError");
  } catch (const SearchAbortedError& e) {
    const std::string what = e.what();
    CHECK(what.find("worker exited") != std::string::npos);
    CHECK(what.find(" while evaluating ") != std::string::npos);
  }
}

TEST_CASE("search best is a real code bounded by the exhaustive optimum") {
  // k = 2: 8^2 layer choices times 2^3 connection patterns.
  for (std::uint64_t seed : {1, 2, 3}) {
    const SurrogateLandscape land{seed, 3};
    double best = 0.0;
    for (int t0 = 0; t0 < 8; ++t0) {
      for (int t1 = 0; t1 < 8; ++t1) {
        for (int mask = 0; mask < 8; ++mask) {
          const CellCode code{
              {LayerTypeIndex(t0), LayerTypeIndex(t1)},
              {std::uint8_t(mask & 1), std::uint8_t(mask >> 1 & 1),
               std::uint8_t(mask >> 2 & 1)}};
          best = std::max(best, SurrogateAffinity(ModelSpec::ForCandidate({}, code), land));
        }
      }
    }
    SurrogateEvaluator eval(land);
    SearchConfig c;
    c.layers_per_cell = 2;
    c.stages_max = 1;
    Rng rng(seed);
    const SearchReport report = RunSearch(c, eval, rng);
    CHECK(report.best_affinity <= best);
    CHECK(report.best_affinity ==
          SurrogateAffinity(report.final_model, land));
    CHECK(report.evaluations <= 512);
  }
}

}  // namespace
}  // namespace clonalnas
