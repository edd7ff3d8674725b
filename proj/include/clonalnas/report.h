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

// Search reports as line-delimited JSON. Each line is one record with a
// "record" field: "run" (header), "generation", "stage" or "summary".

#ifndef CLONALNAS_REPORT_H_
#define CLONALNAS_REPORT_H_

#include <istream>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "clonalnas/engine.h"

namespace clonalnas {

nlohmann::json HeaderRecord(const SearchConfig& config,
                            const std::string& manifest_path);
nlohmann::json GenerationToJson(const GenerationRecord& record);
nlohmann::json StageToJson(const StageRecord& record);
nlohmann::json SummaryToJson(const SearchReport& report);

// Appends and flushes one line per record.
class JsonlReportWriter : public ReportSink {
 public:
  JsonlReportWriter(std::ostream& out, const nlohmann::json& header);

  void OnGeneration(const GenerationRecord& record) override;
  void OnStage(const StageRecord& record) override;
  void OnSummary(const SearchReport& report) override;

 private:
  void Write(const nlohmann::json& record);

  std::ostream& out_;
};

class ReportFormatError : public std::runtime_error {
 public:
  ReportFormatError(int line, const std::string& message)
      : std::runtime_error("line " + std::to_string(line) + ": " + message),
        line_(line) {}

  int line() const { return line_; }

 private:
  int line_;
};

struct LoadedReport {
  std::optional<nlohmann::json> header;
  std::vector<nlohmann::json> generations;
  std::vector<nlohmann::json> stages;
  std::optional<nlohmann::json> summary;
};

// Throws ReportFormatError naming the first bad line.
LoadedReport ReadReport(std::istream& in);

struct StageSummaryRow {
  int stage = 0;
  int generations = 0;
  double best = 0.0;
  double mean = 0.0;  // over every affinity recorded in the stage
};

std::vector<StageSummaryRow> SummarizeStages(const LoadedReport& report);

// One row per generation record, with a header line.
std::string GenerationCsv(const LoadedReport& report);

}  // namespace clonalnas

#endif  // CLONALNAS_REPORT_H_
