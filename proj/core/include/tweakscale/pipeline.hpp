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

#ifndef TWEAKSCALE_PIPELINE_HPP_
#define TWEAKSCALE_PIPELINE_HPP_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tweakscale/coordinator.hpp"
#include "tweakscale/metrics.hpp"
#include "tweakscale/rand_scaler.hpp"

namespace tweakscale {

/// Tool letters of a permutation string such as "C-L-P" or "LCP".
/// Throws Error(kConfigError) on unknown or repeated letters.
std::vector<char> parseOrder(std::string_view order);

/// Creates the tool for letter L, C or P.
std::unique_ptr<Tool> makeTool(char letter, const DatasetSchema& schema, bool self_responses = true);

/// Targets currently held by the tools registered with `coord`.
FeatureTargets collectTargets(const Coordinator& coord);

struct RunOptions {
  std::string order = "L-C-P";
  std::size_t iterations = 1;
  CoordinatorConfig coordinator;
  bool selfResponses = true;
  /// Items here replace the generated target of the same chain/group/binding.
  FeatureTargets explicitTargets;
};

/// Targets the tools of `options.order` would pursue on `data`, prepared
/// (and repaired if configured) the same way a run prepares them.
FeatureTargets generateTargets(const Dataset& data, const Dataset& reference, const RunOptions& options);

struct IterationRecord {
  std::size_t iteration = 0;  // 1-based
  ErrorReport errors;
};

struct RunOutcome {
  std::vector<IterationRecord> iterations;
  ErrorReport final;
  FeatureTargets targets;
  std::vector<JournalRecord> journal;
  AccessLog access;
};

/// Tweaks `data` in place. Targets default to the features of `reference`
/// rescaled to the sizes of `data`. `on_iteration` sees the dataset after
/// each iteration.
RunOutcome runTools(Dataset& data, const Dataset& reference, const RunOptions& options,
                    const std::function<void(std::size_t, const Dataset&)>& on_iteration = {});

struct PipelineConfig {
  std::filesystem::path schemaPath;
  std::filesystem::path dataDir;
  std::optional<std::filesystem::path> sizeTargetPath;  // default: keep sizes
  std::string order = "L-C-P";
  std::size_t iterations = 1;
  std::uint64_t seed = 0;
  double eThreshold = 0.05;
  std::size_t maxRelaxationRounds = 16;
  bool repairTargets = true;
  bool selfResponses = true;
  std::vector<std::filesystem::path> targets;
  std::optional<std::filesystem::path> groundTruthDir;
  std::optional<std::filesystem::path> queriesPath;
  std::filesystem::path outputDir;
  std::optional<std::filesystem::path> journalPath;  // default: <out>/journal.ndjson
  bool snapshots = false;                            // <out>/iteration-N/
};

struct PipelineResult {
  RunOutcome outcome;
  std::string reportJson;
  Dataset scaled;  // before tweaking
  Dataset final;
};

/// Scale, tweak, measure, and write <out>/data, <out>/report.json and the
/// journal. Throws Error on any failure.
PipelineResult runPipeline(const PipelineConfig& cfg);

/// Report JSON with a fixed key order.
std::string reportToJson(const RunOutcome& outcome, const std::vector<QueryResult>& queries,
                         const SizeTarget& sizes);

/// Journal as newline-delimited JSON.
std::string journalToText(const DatasetSchema& schema, const std::vector<JournalRecord>& journal);

}  // namespace tweakscale

#endif  // TWEAKSCALE_PIPELINE_HPP_
