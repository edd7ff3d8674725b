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

#include "clonalnas/report.h"

#include <algorithm>
#include <map>
#include <sstream>

#include "clonalnas/config.h"

namespace clonalnas {

namespace {

using nlohmann::json;

json AntibodyToJson(const Antibody& ab) {
  json out = {{"id", ab.id}, {"code", ToText(ab.code)}, {"born", ab.born_generation}};
  out["affinity"] = ab.affinity ? json(*ab.affinity) : json(nullptr);
  return out;
}

json CodesToJson(const std::vector<CellCode>& codes) {
  json out = json::array();
  for (const CellCode& c : codes) out.push_back(ToText(c));
  return out;
}

// Mean and max of the recorded population affinities.
std::pair<double, double> PopulationStats(const json& generation) {
  double total = 0.0;
  double best = 0.0;
  int count = 0;
  for (const json& ab : generation.at("population")) {
    const json& a = ab.at("affinity");
    if (!a.is_number()) continue;
    total += a.get<double>();
    best = std::max(best, a.get<double>());
    ++count;
  }
  return {count ? total / count : 0.0, best};
}

}  // namespace

json HeaderRecord(const SearchConfig& config, const std::string& manifest_path) {
  return {{"record", "run"},
          {"manifest", manifest_path},
          {"seed", config.seed},
          {"config", SearchConfigToJson(config)}};
}

json GenerationToJson(const GenerationRecord& r) {
  json population = json::array();
  for (const Antibody& ab : r.population) population.push_back(AntibodyToJson(ab));
  json failures = json::array();
  for (const EvaluationFailure& f : r.failures) {
    failures.push_back({{"id", f.id}, {"error", f.message}});
  }
  return {
      {"record", "generation"},
      {"stage", r.stage},
      {"generation", r.generation},
      {"population", population},
      {"removed", r.removed},
      {"clone_pool",
       {{"size", r.clone_pool_size},
        {"a_max", r.clone_a_max},
        {"a_avg", r.clone_a_avg},
        {"kept", r.clones_kept}}},
      {"failures", failures},
      {"best_so_far", r.best_so_far},
      {"memory", CodesToJson(r.memory)},
      {"requests", r.requests},
      {"evaluations", r.evaluations},
  };
}

json StageToJson(const StageRecord& r) {
  return {{"record", "stage"},
          {"stage", r.stage},
          {"best", AntibodyToJson(r.best)},
          {"evaluations", r.evaluations}};
}

json SummaryToJson(const SearchReport& report) {
  json memory = json::array();
  json bests = json::array();
  for (const MemoryCell& cell : report.memory.cells) {
    memory.push_back({{"code", ToText(cell.code)}, {"affinity", cell.affinity}});
    bests.push_back(cell.affinity);
  }
  return {
      {"record", "summary"},
      {"termination", report.termination.reason},
      {"final_stage", report.termination.final_stage},
      {"final_model",
       {{"cells", CodesToJson(report.final_model.Cells())},
        {"k", report.final_model.layers_per_cell}}},
      {"best_affinity", report.best_affinity},
      {"stage_bests", bests},
      {"memory", memory},
      {"requests", report.requests},
      {"evaluations", report.evaluations},
  };
}

JsonlReportWriter::JsonlReportWriter(std::ostream& out, const json& header)
    : out_(out) {
  Write(header);
}

void JsonlReportWriter::OnGeneration(const GenerationRecord& record) {
  Write(GenerationToJson(record));
}

void JsonlReportWriter::OnStage(const StageRecord& record) {
  Write(StageToJson(record));
}

void JsonlReportWriter::OnSummary(const SearchReport& report) {
  Write(SummaryToJson(report));
}

void JsonlReportWriter::Write(const json& record) {
  out_ << record.dump() << '\n';
  out_.flush();
}

LoadedReport ReadReport(std::istream& in) {
  LoadedReport report;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    json record = json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (record.is_discarded() || !record.is_object()) {
      throw ReportFormatError(number, "not a JSON object");
    }
    auto kind = record.find("record");
    if (kind == record.end() || !kind->is_string()) {
      throw ReportFormatError(number, "missing record type");
    }
    const std::string type = kind->get<std::string>();
    try {
      if (type == "run") {
        report.header = std::move(record);
      } else if (type == "generation") {
        record.at("stage").get<int>();
        record.at("generation").get<int>();
        record.at("best_so_far").get<double>();
        PopulationStats(record);
        report.generations.push_back(std::move(record));
      } else if (type == "stage") {
        record.at("stage").get<int>();
        record.at("best").at("affinity").get<double>();
        report.stages.push_back(std::move(record));
      } else if (type == "summary") {
        report.summary = std::move(record);
      } else {
        throw ReportFormatError(number, "unknown record type '" + type + "'");
      }
    } catch (const json::exception& e) {
      throw ReportFormatError(number, std::string("bad ") + type +
                                          " record: " + e.what());
    }
  }
  return report;
}

std::vector<StageSummaryRow> SummarizeStages(const LoadedReport& report) {
  struct Accumulator {
    int generations = 0;
    double best = 0.0;
    double total = 0.0;
    int count = 0;
  };
  std::map<int, Accumulator> stages;
  for (const json& g : report.generations) {
    Accumulator& acc = stages[g.at("stage").get<int>()];
    ++acc.generations;
    acc.best = std::max(acc.best, g.at("best_so_far").get<double>());
    for (const json& ab : g.at("population")) {
      if (!ab.at("affinity").is_number()) continue;
      acc.total += ab.at("affinity").get<double>();
      ++acc.count;
    }
  }
  for (const json& s : report.stages) {
    Accumulator& acc = stages[s.at("stage").get<int>()];
    acc.best = std::max(acc.best, s.at("best").at("affinity").get<double>());
  }
  std::vector<StageSummaryRow> rows;
  for (const auto& [stage, acc] : stages) {
    rows.push_back({stage, acc.generations, acc.best,
                    acc.count ? acc.total / acc.count : 0.0});
  }
  return rows;
}

std::string GenerationCsv(const LoadedReport& report) {
  std::ostringstream out;
  out.precision(10);
  out << "stage,generation,best_so_far,population_mean,population_max,"
         "removed,clone_pool_size,clone_a_max,clone_a_avg,evaluations\n";
  for (const json& g : report.generations) {
    const auto [mean, best] = PopulationStats(g);
    const json clone_pool = g.value("clone_pool", json::object());
    out << g.at("stage").get<int>() << ',' << g.at("generation").get<int>()
        << ',' << g.at("best_so_far").get<double>() << ',' << mean << ','
        << best << ',' << g.value("removed", json::array()).size() << ','
        << clone_pool.value("size", 0) << ',' << clone_pool.value("a_max", 0.0)
        << ',' << clone_pool.value("a_avg", 0.0) << ','
        << g.value("evaluations", 0) << '\n';
  }
  return out.str();
}

}  // namespace clonalnas
