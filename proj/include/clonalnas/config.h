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

// Run configuration documents.
//
// A config file is one JSON object whose keys mirror SearchConfig, plus an
// "evaluator" and an "output" section:
//
//   {
//     "population_size": 50, "generations": 20, "select_fraction": 0.2,
//     "newcomers": 5, "clone_factor": 5, "stages_max": 4,
//     "layers_per_cell": 5, "similarity_proportion": 0.6666666666666666,
//     "mutation": {"k1": 0.1, "k2": 0.2}, "seed": 0, "dataset": "mnist",
//     "budget": {"train_fraction": 1.0, "epochs": 1},
//     "evaluator": {"kind": "surrogate", "landscape_seed": 0, "epistasis": 3},
//     "output": {"report": "report.jsonl", "manifest": "manifest.json"}
//   }
//
// Every key is optional; unknown keys are rejected.

#ifndef CLONALNAS_CONFIG_H_
#define CLONALNAS_CONFIG_H_

#include <cstdint>
#include <string>

#include <nlohmann/json.hpp>

#include "clonalnas/engine.h"

namespace clonalnas {

struct EvaluatorSettings {
  std::string kind = "surrogate";  // "surrogate" or "worker"
  std::uint64_t landscape_seed = 0;
  int epistasis = 3;
  std::string command;             // worker only
  double timeout_seconds = 1800.0;
  double handshake_timeout_seconds = 60.0;
};

struct OutputSettings {
  std::string report = "report.jsonl";
  std::string manifest;  // empty: report path + ".manifest.json"
};

struct RunConfig {
  SearchConfig search;
  EvaluatorSettings evaluator;
  OutputSettings output;
};

nlohmann::json SearchConfigToJson(const SearchConfig& config);
nlohmann::json RunConfigToJson(const RunConfig& config);

// Throws ConfigError on unknown keys, wrong types or broken invariants.
RunConfig RunConfigFromJson(const nlohmann::json& document);

// Throws ConfigError if the file is missing or unparsable.
RunConfig LoadRunConfig(const std::string& path);

// "surrogate" or "worker:<command>".
void ApplyEvaluatorFlag(const std::string& flag, EvaluatorSettings& settings);

void RequireValid(const RunConfig& config);

}  // namespace clonalnas

#endif  // CLONALNAS_CONFIG_H_
