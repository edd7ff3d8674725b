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

#include "cli.h"

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <memory>
#include <optional>
#include <sstream>

#include <nlohmann/json.hpp>

#include "CLI11.hpp"
#include "clonalnas/config.h"
#include "clonalnas/engine.h"
#include "clonalnas/genotype.h"
#include "clonalnas/graph.h"
#include "clonalnas/mutation.h"
#include "clonalnas/report.h"
#include "clonalnas/similarity.h"
#include "clonalnas/surrogate.h"
#include "clonalnas/worker.h"

namespace clonalnas::cli {

namespace {

using nlohmann::json;

std::string UtcNow() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buffer[32];
  std::strftime(buffer, sizeof(buffer), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buffer;
}

void WriteManifest(const std::string& path, const json& manifest) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write manifest " + path);
  out << manifest.dump(2) << '\n';
}

struct SearchOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> population;
  std::optional<int> generations;
  std::optional<int> stages;
  std::optional<int> layers;
  std::optional<std::string> evaluator;
  std::optional<std::string> report;
  std::optional<std::string> manifest;
  std::optional<std::uint64_t> landscape_seed;
  std::optional<int> epistasis;
  std::optional<double> timeout;
};

int CmdSearch(const SearchOptions& opts, std::ostream& out, std::ostream& err) {
  RunConfig config;
  try {
    std::string path = opts.config_path;
    if (path.empty()) {
      if (const char* env = std::getenv(kConfigEnvVar); env && *env) path = env;
    }
    if (!path.empty()) config = LoadRunConfig(path);
    if (opts.seed) config.search.seed = *opts.seed;
    if (opts.population) config.search.population_size = *opts.population;
    if (opts.generations) config.search.generations = *opts.generations;
    if (opts.stages) config.search.stages_max = *opts.stages;
    if (opts.layers) config.search.layers_per_cell = *opts.layers;
    if (opts.evaluator) ApplyEvaluatorFlag(*opts.evaluator, config.evaluator);
    if (opts.report) config.output.report = *opts.report;
    if (opts.manifest) config.output.manifest = *opts.manifest;
    if (opts.landscape_seed) config.evaluator.landscape_seed = *opts.landscape_seed;
    if (opts.epistasis) config.evaluator.epistasis = *opts.epistasis;
    if (opts.timeout) config.evaluator.timeout_seconds = *opts.timeout;
    RequireValid(config);
  } catch (const ConfigError& e) {
    err << "invalid config: " << e.what() << '\n';
    return kExitInvalidInput;
  }

  const std::string manifest_path = config.output.manifest.empty()
                                        ? config.output.report + ".manifest.json"
                                        : config.output.manifest;
  json manifest = {{"config", RunConfigToJson(config)},
                   {"seed", config.search.seed},
                   {"started_at", UtcNow()},
                   {"finished_at", nullptr},
                   {"status", "running"},
                   {"report", config.output.report},
                   {"manifest", manifest_path}};
  WriteManifest(manifest_path, manifest);

  auto finish = [&](const std::string& status) {
    manifest["finished_at"] = UtcNow();
    manifest["status"] = status;
    WriteManifest(manifest_path, manifest);
  };

  std::unique_ptr<Evaluator> evaluator;
  try {
    if (config.evaluator.kind == "surrogate") {
      evaluator = std::make_unique<SurrogateEvaluator>(SurrogateLandscape{
          config.evaluator.landscape_seed, config.evaluator.epistasis});
    } else {
      WorkerOptions options;
      options.request_timeout = std::chrono::milliseconds(
          static_cast<long long>(config.evaluator.timeout_seconds * 1000));
      options.handshake_timeout = std::chrono::milliseconds(static_cast<long long>(
          config.evaluator.handshake_timeout_seconds * 1000));
      evaluator =
          std::make_unique<WorkerEvaluator>(config.evaluator.command, options);
    }
  } catch (const EvaluatorError& e) {
    err << "evaluator failed to start: " << e.what() << '\n';
    finish("failed");
    return kExitEvaluator;
  }

  std::ofstream report_out(config.output.report, std::ios::trunc);
  if (!report_out) {
    err << "cannot write report " << config.output.report << '\n';
    finish("failed");
    return kExitInternal;
  }
  JsonlReportWriter writer(report_out,
                           HeaderRecord(config.search, manifest_path));

  SearchReport report;
  try {
    Rng rng(config.search.seed);
    report = RunSearch(config.search, *evaluator, rng, &writer);
  } catch (const SearchAbortedError& e) {
    err << "search aborted: " << e.what() << '\n';
    finish("failed");
    return kExitEvaluator;
  } catch (const EvaluatorError& e) {
    err << "search aborted: " << e.what() << '\n';
    finish("failed");
    return kExitEvaluator;
  }
  finish("completed");

  out << "termination: " << report.termination.reason << " after "
      << report.stages.size() << " stage(s)\n";
  out << "final model (" << report.final_model.Cells().size() << " cells):\n";
  for (const CellCode& cell : report.final_model.Cells()) {
    out << "  " << ToText(cell) << '\n';
  }
  out << std::setprecision(6) << std::fixed;
  out << "best affinity: " << report.best_affinity << '\n';
  out << "evaluations: " << report.evaluations << " (" << report.requests
      << " requests)\n";
  out << "report: " << config.output.report << '\n';
  return kExitOk;
}

int CmdDecode(const std::string& text, bool dot, bool json_out, bool unpruned,
              std::ostream& out, std::ostream& err) {
  CellCode code;
  try {
    code = FromText(text);
  } catch (const CodeParseError& e) {
    err << "invalid code: " << e.what() << '\n';
    return kExitInvalidInput;
  }
  const CellGraph decoded = Decode(code);
  const CellGraph realized = PruneUnreachable(decoded);
  const CellGraph& shown = unpruned ? decoded : realized;
  if (dot) {
    out << ExportDot(shown);
    return kExitOk;
  }
  if (json_out) {
    out << GraphToJson(shown).dump() << '\n';
    return kExitOk;
  }

  const int k = code.num_layers();
  out << "cell " << ToText(code) << " (k=" << k << ")\n";
  out << "layers:\n";
  for (int p = 1; p <= k; ++p) {
    const LayerKind& kind = kLayerCatalog[code.layer_types[p - 1]];
    out << "  L" << p << ' ' << kind.name << "  inputs:";
    for (int s : decoded.Predecessors(p)) {
      out << ' ' << NodeName(decoded, s);
      if (s == 0 && p > 1) out << " (default)";
    }
    out << (realized.present[p] ? "  kept" : "  pruned") << '\n';
  }
  const std::vector<int> sources = realized.Predecessors(realized.depooling());
  out << "DePooling inputs (" << sources.size() << "):";
  for (int s : sources) {
    out << ' ' << NodeName(realized, s);
    if (s == 0) out << " (default connection)";
  }
  out << '\n';
  out << "realized: " << realized.NumPresentNodes() << " nodes, "
      << realized.edges.size() << " edges\n";
  return kExitOk;
}

int CmdMutate(const std::string& text, const std::string& tier_name,
              double rate, std::uint64_t seed, std::ostream& out,
              std::ostream& err) {
  CellCode code;
  try {
    code = FromText(text);
  } catch (const CodeParseError& e) {
    err << "invalid code: " << e.what() << '\n';
    return kExitInvalidInput;
  }
  const std::optional<MutationTier> tier = ParseTier(tier_name);
  if (!tier) {
    err << "unknown tier '" << tier_name
        << "' (expected light, moderate or drastic)\n";
    return kExitInvalidInput;
  }
  if (!(rate >= 0.0 && rate <= 1.0)) {
    err << "rate must lie in [0, 1]\n";
    return kExitInvalidInput;
  }
  Rng rng(seed);
  const MutationOutcome outcome = MutateDetailed(code, *tier, rate, rng);
  const int bits = SecondComponentLength(code.num_layers());
  out << "original: " << ToText(code) << '\n';
  out << "mutated:  " << ToText(outcome.code) << '\n';
  out << "tier: " << TierName(*tier) << "  region: "
      << RegionSize(*tier, code.num_layers()) << "  changed: "
      << outcome.positions.size() << '\n';
  out << "changed positions:";
  for (int pos : outcome.positions) {
    if (pos < bits) {
      out << " bit" << pos;
    } else {
      out << " type" << pos - bits + 1;
    }
  }
  out << '\n';
  return kExitOk;
}

int CmdSimilar(const std::string& text_a, const std::string& text_b,
               double proportion, std::ostream& out, std::ostream& err) {
  CellCode a;
  CellCode b;
  try {
    a = FromText(text_a);
    b = FromText(text_b);
  } catch (const CodeParseError& e) {
    err << "invalid code: " << e.what() << '\n';
    return kExitInvalidInput;
  }
  if (a.num_layers() != b.num_layers()) {
    err << "codes differ in layer count\n";
    return kExitInvalidInput;
  }
  if (!(proportion > 0.0 && proportion <= 1.0)) {
    err << "proportion must lie in (0, 1]\n";
    return kExitInvalidInput;
  }
  const SimilarityVerdict v = InterspecificSimilar(a, b, proportion);
  out << "similar: " << (v.similar ? "true" : "false") << '\n';
  out << "ones: " << v.ones_a << " vs " << v.ones_b << '\n';
  out << "counter: " << v.matched_types << '\n';
  out << "S: " << v.reference_ones << '\n';
  out << "threshold: " << v.threshold << '\n';
  out << std::setprecision(6);
  out << "hamming: " << Hamming(a.connections, b.connections) << '\n';
  out << "jaccard: " << Jaccard(a.connections, b.connections) << '\n';
  out << "tanimoto: " << Tanimoto(a.connections, b.connections) << '\n';
  return kExitOk;
}

int CmdReport(const std::string& path, bool csv, std::ostream& out,
              std::ostream& err) {
  std::ifstream in(path);
  if (!in) {
    err << "cannot read report " << path << '\n';
    return kExitInvalidInput;
  }
  LoadedReport report;
  try {
    report = ReadReport(in);
  } catch (const ReportFormatError& e) {
    err << "corrupt report " << path << ": " << e.what() << '\n';
    return kExitInvalidInput;
  }
  if (csv) {
    out << GenerationCsv(report);
    return kExitOk;
  }
  out << "stage  generations  best      mean\n";
  out << std::fixed << std::setprecision(6);
  for (const StageSummaryRow& row : SummarizeStages(report)) {
    out << std::left << std::setw(7) << row.stage << std::setw(13)
        << row.generations << std::setw(10) << row.best << row.mean << '\n';
  }
  if (report.summary) {
    const json& s = *report.summary;
    out << "termination: " << s.value("termination", std::string("?"))
        << ", final stage " << s.value("final_stage", 0)
        << ", best affinity " << s.value("best_affinity", 0.0) << '\n';
  } else {
    out << "no summary record (incomplete run)\n";
  }
  return kExitOk;
}

}  // namespace

int Run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Immune-network cell architecture search"};
  app.require_subcommand(1);

  SearchOptions search;
  CLI::App* search_cmd = app.add_subcommand("search", "Run a search");
  search_cmd->add_option("--config", search.config_path,
                         "JSON config file (default: $CLONALNAS_CONFIG)");
  search_cmd->add_option("--seed", search.seed);
  search_cmd->add_option("--population", search.population, "N");
  search_cmd->add_option("--generations", search.generations, "G");
  search_cmd->add_option("--stages", search.stages, "maximum stages");
  search_cmd->add_option("--layers", search.layers, "layers per cell k");
  search_cmd->add_option("--evaluator", search.evaluator,
                         "surrogate | worker:<command>");
  search_cmd->add_option("--report", search.report, "report path (JSONL)");
  search_cmd->add_option("--manifest", search.manifest, "manifest path");
  search_cmd->add_option("--landscape-seed", search.landscape_seed);
  search_cmd->add_option("--epistasis", search.epistasis);
  search_cmd->add_option("--timeout", search.timeout,
                         "worker request timeout in seconds");

  std::string decode_code;
  bool decode_dot = false;
  bool decode_json = false;
  bool decode_unpruned = false;
  CLI::App* decode_cmd =
      app.add_subcommand("decode", "Decode a cell code into its graph");
  decode_cmd->add_option("code", decode_code, "cell code text")->required();
  decode_cmd->add_flag("--dot", decode_dot, "print Graphviz DOT");
  decode_cmd->add_flag("--json", decode_json, "print node/edge lists");
  decode_cmd->add_flag("--unpruned", decode_unpruned,
                       "show the graph before pruning");

  std::string mutate_code;
  std::string mutate_tier = "moderate";
  double mutate_rate = 0.1;
  std::uint64_t mutate_seed = 0;
  CLI::App* mutate_cmd = app.add_subcommand("mutate", "Mutate a cell code");
  mutate_cmd->add_option("code", mutate_code, "cell code text")->required();
  mutate_cmd->add_option("--tier", mutate_tier, "light | moderate | drastic");
  mutate_cmd->add_option("--rate", mutate_rate, "mutation rate in [0, 1]");
  mutate_cmd->add_option("--seed", mutate_seed);

  std::string similar_a;
  std::string similar_b;
  double similar_proportion = kDefaultSimilarityProportion;
  CLI::App* similar_cmd =
      app.add_subcommand("similar", "Interspecific similarity of two codes");
  similar_cmd->add_option("code1", similar_a)->required();
  similar_cmd->add_option("code2", similar_b)->required();
  similar_cmd->add_option("--proportion", similar_proportion);

  std::string report_path;
  bool report_csv = false;
  CLI::App* report_cmd = app.add_subcommand("report", "Summarize a report");
  report_cmd->add_option("path", report_path)->required();
  report_cmd->add_flag("--csv", report_csv,
                       "one CSV row per generation record");

  std::vector<std::string> argv_storage = {"clonalnas"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (std::string& a : argv_storage) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n';
    return kExitInvalidInput;
  }

  try {
    if (search_cmd->parsed()) return CmdSearch(search, out, err);
    if (decode_cmd->parsed()) {
      return CmdDecode(decode_code, decode_dot, decode_json, decode_unpruned,
                       out, err);
    }
    if (mutate_cmd->parsed()) {
      return CmdMutate(mutate_code, mutate_tier, mutate_rate, mutate_seed, out,
                       err);
    }
    if (similar_cmd->parsed()) {
      return CmdSimilar(similar_a, similar_b, similar_proportion, out, err);
    }
    if (report_cmd->parsed()) {
      return CmdReport(report_path, report_csv, out, err);
    }
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitInternal;
}

}  // namespace clonalnas::cli
