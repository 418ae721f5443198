// Copyright 2026 The tweakscale Authors
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

#include "tweakscale/pipeline.hpp"

#include <algorithm>
#include <set>

#include "json.hpp"
#include "tweakscale/coappear_tool.hpp"
#include "tweakscale/dataset_io.hpp"
#include "tweakscale/error.hpp"
#include "tweakscale/linear_tool.hpp"
#include "tweakscale/pairwise_tool.hpp"
#include "tweakscale/target_io.hpp"

namespace tweakscale {
namespace {

using nlohmann::ordered_json;

template <typename T, typename Same>
std::vector<T> overlay(std::vector<T> generated, const std::vector<T>& explicit_items, Same same) {
  for (const T& e : explicit_items) {
    auto it = std::find_if(generated.begin(), generated.end(), [&](const T& g) { return same(g, e); });
    if (it == generated.end()) throw Error(ErrorCode::kSpecMismatch, "explicit target matches no feature of the tool");
    *it = e;
  }
  return generated;
}

void applyExplicit(Tool& tool, const FeatureTargets& t) {
  if (auto* l = dynamic_cast<LinearTool*>(&tool); l != nullptr && !t.linear.empty()) {
    l->setTargets(overlay(l->targets(), t.linear, [](const auto& a, const auto& b) { return a.chain == b.chain; }));
  }
  if (auto* c = dynamic_cast<CoappearTool*>(&tool); c != nullptr && !t.coappear.empty()) {
    c->setTargets(overlay(c->targets(), t.coappear, [](const auto& a, const auto& b) { return a.group == b.group; }));
  }
  if (auto* p = dynamic_cast<PairwiseTool*>(&tool); p != nullptr && !t.pairwise.empty()) {
    p->setTargets(
        overlay(p->targets(), t.pairwise, [](const auto& a, const auto& b) { return a.binding == b.binding; }));
  }
}

ordered_json optionalNumber(const std::optional<double>& v) { return v ? ordered_json(*v) : ordered_json(nullptr); }

ordered_json errorsJson(const ErrorReport& r) {
  ordered_json out;
  out["linear"] = r.linear;
  out["coappear"] = r.coappear;
  out["pairwise"] = r.pairwise;
  out["means"] = {{"linear", optionalNumber(ErrorReport::mean(r.linear))},
                  {"coappear", optionalNumber(ErrorReport::mean(r.coappear))},
                  {"pairwise", optionalNumber(ErrorReport::mean(r.pairwise))}};
  return out;
}

ordered_json runJson(const ToolRunSummary& s) {
  ordered_json out;
  out["tool"] = s.tool;
  out["proposed"] = s.proposed;
  out["accepted"] = s.accepted;
  out["rejected"] = s.rejected;
  out["relaxed"] = s.relaxed;
  out["relaxations"] = s.relaxations;
  out["deletedCells"] = s.deletedCells;
  out["insertedCells"] = s.insertedCells;
  out["appendedTuples"] = s.appendedTuples;
  out["initialError"] = s.initialError;
  out["finalError"] = s.finalError;
  ordered_json stats = ordered_json::object();
  for (const auto& [k, v] : s.stats) stats[k] = v;
  out["stats"] = stats;
  return out;
}

}  // namespace

std::vector<char> parseOrder(std::string_view order) {
  std::vector<char> out;
  for (char ch : order) {
    if (ch == '-' || ch == ' ' || ch == ',') continue;
    const char up = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    if (up != 'L' && up != 'C' && up != 'P') {
      throw Error(ErrorCode::kConfigError, "order may only contain L, C and P, got '" + std::string(1, ch) + "'");
    }
    if (std::find(out.begin(), out.end(), up) != out.end()) {
      throw Error(ErrorCode::kConfigError, "order lists " + std::string(1, up) + " twice");
    }
    out.push_back(up);
  }
  if (out.empty()) throw Error(ErrorCode::kConfigError, "order names no tool");
  return out;
}

std::unique_ptr<Tool> makeTool(char letter, const DatasetSchema& schema, bool self_responses) {
  switch (letter) {
    case 'L': return std::make_unique<LinearTool>(schema);
    case 'C': return std::make_unique<CoappearTool>(schema);
    case 'P': return std::make_unique<PairwiseTool>(schema, "pairwise", self_responses);
    default: throw Error(ErrorCode::kConfigError, "unknown tool letter " + std::string(1, letter));
  }
}

FeatureTargets collectTargets(const Coordinator& coord) {
  FeatureTargets out;
  for (ToolHandle h = 0; h < coord.toolCount(); ++h) {
    const Tool& t = coord.tool(h);
    if (const auto* l = dynamic_cast<const LinearTool*>(&t)) out.linear = l->targets();
    if (const auto* c = dynamic_cast<const CoappearTool*>(&t)) out.coappear = c->targets();
    if (const auto* p = dynamic_cast<const PairwiseTool*>(&t)) {
      out.pairwise = p->targets();
      out.selfResponses = p->selfResponses();
    }
  }
  return out;
}

FeatureTargets generateTargets(const Dataset& data, const Dataset& reference, const RunOptions& options) {
  Dataset scratch = data;
  Coordinator coord(scratch, options.coordinator);
  for (char letter : parseOrder(options.order)) {
    auto tool = makeTool(letter, data.schema(), options.selfResponses);
    tool->generateTarget(reference, data);
    applyExplicit(*tool, options.explicitTargets);
    tool->prepareTarget(data, options.coordinator.repairTargets);
    coord.registerTool(std::move(tool));
  }
  return collectTargets(coord);
}

RunOutcome runTools(Dataset& data, const Dataset& reference, const RunOptions& options,
                    const std::function<void(std::size_t, const Dataset&)>& on_iteration) {
  if (options.iterations < 1) throw Error(ErrorCode::kConfigError, "iterations must be at least 1");
  const std::vector<char> order = parseOrder(options.order);
  Coordinator coord(data, options.coordinator);
  std::vector<ToolHandle> handles;
  for (char letter : order) {
    auto tool = makeTool(letter, data.schema(), options.selfResponses);
    tool->generateTarget(reference, data);
    applyExplicit(*tool, options.explicitTargets);
    handles.push_back(coord.registerTool(std::move(tool)));
  }

  RunOutcome outcome;
  for (std::size_t it = 1; it <= options.iterations; ++it) {
    IterationRecord record;
    record.iteration = it;
    for (ToolHandle h : handles) record.errors.runs.push_back(coord.runTool(h));
    outcome.targets = collectTargets(coord);
    const ErrorReport measured = featureErrorReport(data, outcome.targets);
    record.errors.linear = measured.linear;
    record.errors.coappear = measured.coappear;
    record.errors.pairwise = measured.pairwise;
    if (on_iteration) on_iteration(it, data);
    outcome.iterations.push_back(std::move(record));
  }
  outcome.final = outcome.iterations.back().errors;
  outcome.final.runs.clear();
  for (const auto& rec : outcome.iterations) {
    outcome.final.runs.insert(outcome.final.runs.end(), rec.errors.runs.begin(), rec.errors.runs.end());
  }
  outcome.journal = coord.journal();
  outcome.access = coord.accessLog();
  return outcome;
}

std::string reportToJson(const RunOutcome& outcome, const std::vector<QueryResult>& queries, const SizeTarget& sizes) {
  ordered_json root;
  ordered_json size_json = ordered_json::object();
  for (const auto& [name, n] : sizes) size_json[name] = n;
  root["sizes"] = size_json;
  ordered_json iterations = ordered_json::array();
  for (const auto& rec : outcome.iterations) {
    ordered_json it;
    it["iteration"] = rec.iteration;
    it["errors"] = errorsJson(rec.errors);
    ordered_json runs = ordered_json::array();
    for (const auto& s : rec.errors.runs) runs.push_back(runJson(s));
    it["runs"] = runs;
    iterations.push_back(it);
  }
  root["iterations"] = iterations;
  root["final"] = errorsJson(outcome.final);
  ordered_json q = ordered_json::array();
  for (const auto& r : queries) {
    q.push_back({{"name", r.name}, {"truth", r.truth}, {"scaled", r.scaled}, {"error", optionalNumber(r.error)}});
  }
  root["queries"] = q;
  std::size_t appended = 0;
  for (const auto& rec : outcome.iterations) {
    for (const auto& s : rec.errors.runs) appended += s.appendedTuples;
  }
  root["journal"] = {{"records", outcome.journal.size()}, {"appendedTuples", appended}};
  return root.dump(2) + "\n";
}

std::string journalToText(const DatasetSchema& schema, const std::vector<JournalRecord>& journal) {
  std::string out;
  for (const auto& r : journal) {
    out += journalLine(schema, r);
    out += '\n';
  }
  return out;
}

PipelineResult runPipeline(const PipelineConfig& cfg) {
  if (cfg.iterations < 1) throw Error(ErrorCode::kConfigError, "iterations must be at least 1");
  parseOrder(cfg.order);
  const DatasetSchema schema = loadSchema(cfg.schemaPath);
  const Dataset input = loadDataset(schema, cfg.dataDir);
  const SizeTarget sizes = cfg.sizeTargetPath ? loadSizeTarget(*cfg.sizeTargetPath) : currentSizes(input);

  RunOptions options;
  options.order = cfg.order;
  options.iterations = cfg.iterations;
  options.selfResponses = cfg.selfResponses;
  options.coordinator.eThreshold = cfg.eThreshold;
  options.coordinator.seed = cfg.seed;
  options.coordinator.maxRelaxationRounds = cfg.maxRelaxationRounds;
  options.coordinator.repairTargets = cfg.repairTargets;
  for (const auto& path : cfg.targets) {
    FeatureTargets t = loadTargets(schema, path);
    auto append = [](auto& into, auto& from) { into.insert(into.end(), from.begin(), from.end()); };
    append(options.explicitTargets.linear, t.linear);
    append(options.explicitTargets.coappear, t.coappear);
    append(options.explicitTargets.pairwise, t.pairwise);
  }
  std::vector<QuerySpec> queries;
  if (cfg.queriesPath) queries = loadQueries(schema, *cfg.queriesPath);
  std::optional<Dataset> truth;
  if (cfg.groundTruthDir) truth = loadDataset(schema, *cfg.groundTruthDir);

  PipelineResult result;
  result.scaled = randScale(input, sizes, cfg.seed);
  result.final = result.scaled;
  auto snapshot = [&](std::size_t it, const Dataset& d) {
    if (cfg.snapshots && !cfg.outputDir.empty()) writeDataset(d, cfg.outputDir / ("iteration-" + std::to_string(it)));
  };
  result.outcome = runTools(result.final, input, options, snapshot);

  std::vector<QueryResult> query_results;
  if (truth) query_results = evaluateQueries(*truth, result.final, queries);
  result.outcome.final.queries = query_results;
  result.reportJson = reportToJson(result.outcome, query_results, currentSizes(result.final));

  if (!cfg.outputDir.empty()) {
    writeDataset(result.final, cfg.outputDir / "data");
    writeFile(cfg.outputDir / "report.json", result.reportJson);
    writeFile(cfg.outputDir / "targets.json", targetsToJson(result.outcome.targets));
  }
  if (cfg.journalPath || !cfg.outputDir.empty()) {
    writeFile(cfg.journalPath.value_or(cfg.outputDir / "journal.ndjson"),
              journalToText(schema, result.outcome.journal));
  }
  return result;
}

}  // namespace tweakscale
