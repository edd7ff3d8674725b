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

#include "clonalnas/config.h"

#include <fstream>
#include <functional>
#include <map>

namespace clonalnas {

namespace {

using nlohmann::json;

int GetInt(const json& v, const std::string& key) {
  if (!v.is_number_integer()) throw ConfigError(key + " must be an integer");
  return v.get<int>();
}

std::uint64_t GetUnsigned(const json& v, const std::string& key) {
  if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
    throw ConfigError(key + " must be a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

double GetDouble(const json& v, const std::string& key) {
  if (!v.is_number()) throw ConfigError(key + " must be a number");
  return v.get<double>();
}

std::string GetString(const json& v, const std::string& key) {
  if (!v.is_string()) throw ConfigError(key + " must be a string");
  return v.get<std::string>();
}

using FieldParsers = std::map<std::string, std::function<void(const json&)>>;

void ParseObject(const json& object, const std::string& where,
                 const FieldParsers& fields) {
  if (!object.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [key, value] : object.items()) {
    auto it = fields.find(key);
    const std::string path = where.empty() ? key : where + "." + key;
    if (it == fields.end()) throw ConfigError("unknown config key " + path);
    it->second(value);
  }
}

}  // namespace

json SearchConfigToJson(const SearchConfig& c) {
  json out = {
      {"population_size", c.population_size},
      {"generations", c.generations},
      {"select_fraction", c.select_fraction},
      {"newcomers", c.newcomers},
      {"clone_factor", c.clone_factor},
      {"stages_max", c.stages_max},
      {"layers_per_cell", c.layers_per_cell},
      {"similarity_proportion", c.similarity_proportion},
      {"mutation", {{"k1", c.mutation.k1}, {"k2", c.mutation.k2}}},
      {"seed", c.seed},
      {"dataset", c.dataset},
      {"budget",
       {{"train_fraction", c.budget.train_fraction},
        {"epochs", c.budget.epochs}}},
  };
  if (c.same_structure_cells) {
    out["same_structure_cells"] = *c.same_structure_cells;
  }
  return out;
}

json RunConfigToJson(const RunConfig& config) {
  json out = SearchConfigToJson(config.search);
  json evaluator = {{"kind", config.evaluator.kind}};
  if (config.evaluator.kind == "surrogate") {
    evaluator["landscape_seed"] = config.evaluator.landscape_seed;
    evaluator["epistasis"] = config.evaluator.epistasis;
  } else {
    evaluator["command"] = config.evaluator.command;
    evaluator["timeout_seconds"] = config.evaluator.timeout_seconds;
    evaluator["handshake_timeout_seconds"] =
        config.evaluator.handshake_timeout_seconds;
  }
  out["evaluator"] = evaluator;
  out["output"] = {{"report", config.output.report},
                   {"manifest", config.output.manifest}};
  return out;
}

RunConfig RunConfigFromJson(const json& document) {
  RunConfig config;
  SearchConfig& s = config.search;
  EvaluatorSettings& e = config.evaluator;
  OutputSettings& o = config.output;

  const FieldParsers mutation = {
      {"k1", [&](const json& v) { s.mutation.k1 = GetDouble(v, "mutation.k1"); }},
      {"k2", [&](const json& v) { s.mutation.k2 = GetDouble(v, "mutation.k2"); }},
  };
  const FieldParsers budget = {
      {"train_fraction",
       [&](const json& v) {
         s.budget.train_fraction = GetDouble(v, "budget.train_fraction");
       }},
      {"epochs",
       [&](const json& v) { s.budget.epochs = GetInt(v, "budget.epochs"); }},
  };
  const FieldParsers evaluator = {
      {"kind", [&](const json& v) { e.kind = GetString(v, "evaluator.kind"); }},
      {"landscape_seed",
       [&](const json& v) {
         e.landscape_seed = GetUnsigned(v, "evaluator.landscape_seed");
       }},
      {"epistasis",
       [&](const json& v) { e.epistasis = GetInt(v, "evaluator.epistasis"); }},
      {"command",
       [&](const json& v) { e.command = GetString(v, "evaluator.command"); }},
      {"timeout_seconds",
       [&](const json& v) {
         e.timeout_seconds = GetDouble(v, "evaluator.timeout_seconds");
       }},
      {"handshake_timeout_seconds",
       [&](const json& v) {
         e.handshake_timeout_seconds =
             GetDouble(v, "evaluator.handshake_timeout_seconds");
       }},
  };
  const FieldParsers output = {
      {"report", [&](const json& v) { o.report = GetString(v, "output.report"); }},
      {"manifest",
       [&](const json& v) { o.manifest = GetString(v, "output.manifest"); }},
  };
  const FieldParsers top = {
      {"population_size",
       [&](const json& v) { s.population_size = GetInt(v, "population_size"); }},
      {"generations",
       [&](const json& v) { s.generations = GetInt(v, "generations"); }},
      {"select_fraction",
       [&](const json& v) { s.select_fraction = GetDouble(v, "select_fraction"); }},
      {"newcomers", [&](const json& v) { s.newcomers = GetInt(v, "newcomers"); }},
      {"clone_factor",
       [&](const json& v) { s.clone_factor = GetInt(v, "clone_factor"); }},
      {"stages_max", [&](const json& v) { s.stages_max = GetInt(v, "stages_max"); }},
      {"layers_per_cell",
       [&](const json& v) { s.layers_per_cell = GetInt(v, "layers_per_cell"); }},
      {"similarity_proportion",
       [&](const json& v) {
         s.similarity_proportion = GetDouble(v, "similarity_proportion");
       }},
      {"mutation", [&](const json& v) { ParseObject(v, "mutation", mutation); }},
      {"seed", [&](const json& v) { s.seed = GetUnsigned(v, "seed"); }},
      {"dataset", [&](const json& v) { s.dataset = GetString(v, "dataset"); }},
      {"budget", [&](const json& v) { ParseObject(v, "budget", budget); }},
      {"same_structure_cells",
       [&](const json& v) {
         s.same_structure_cells = GetInt(v, "same_structure_cells");
       }},
      {"evaluator", [&](const json& v) { ParseObject(v, "evaluator", evaluator); }},
      {"output", [&](const json& v) { ParseObject(v, "output", output); }},
  };
  ParseObject(document, "", top);
  RequireValid(config);
  return config;
}

RunConfig LoadRunConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  json document = json::parse(in, nullptr, /*allow_exceptions=*/false,
                              /*ignore_comments=*/true);
  if (document.is_discarded()) {
    throw ConfigError("config file " + path + " is not valid JSON");
  }
  return RunConfigFromJson(document);
}

void ApplyEvaluatorFlag(const std::string& flag, EvaluatorSettings& settings) {
  if (flag == "surrogate") {
    settings.kind = "surrogate";
    return;
  }
  const std::string prefix = "worker:";
  if (flag.rfind(prefix, 0) == 0 && flag.size() > prefix.size()) {
    settings.kind = "worker";
    settings.command = flag.substr(prefix.size());
    return;
  }
  throw ConfigError("evaluator must be 'surrogate' or 'worker:<command>', got '" +
                    flag + "'");
}

void RequireValid(const RunConfig& config) {
  RequireValid(config.search);
  const EvaluatorSettings& e = config.evaluator;
  if (e.kind == "surrogate") {
    if (e.epistasis < 0) throw ConfigError("evaluator.epistasis must be >= 0");
  } else if (e.kind == "worker") {
    if (e.command.empty()) throw ConfigError("evaluator.command is required");
    if (!(e.timeout_seconds > 0.0) || !(e.handshake_timeout_seconds > 0.0)) {
      throw ConfigError("evaluator timeouts must be positive");
    }
  } else {
    throw ConfigError("evaluator.kind must be 'surrogate' or 'worker'");
  }
  if (config.output.report.empty()) {
    throw ConfigError("output.report must not be empty");
  }
}

}  // namespace clonalnas
