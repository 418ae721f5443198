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

#ifndef TWEAKSCALE_COORDINATOR_HPP_
#define TWEAKSCALE_COORDINATOR_HPP_

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "tweakscale/dataset.hpp"
#include "tweakscale/modification.hpp"
#include "tweakscale/tool.hpp"

namespace tweakscale {

struct CoordinatorConfig {
  double eThreshold = 0.05;
  std::uint64_t seed = 0;
  std::size_t maxRelaxationRounds = 16;
  bool repairTargets = true;
  /// Compare every simulated error with a full recomputation (slow).
  bool crossCheck = false;
};

struct Verdict {
  bool accepted = false;
  std::map<std::string, double> perFeatureError;
  std::uint64_t version = 0;
};

struct ToolRunSummary {
  std::string tool;
  std::size_t proposed = 0;
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::vector<std::string> relaxed;  // distinct, in order of first relaxation
  std::size_t relaxations = 0;       // validators dropped, summed over submissions
  std::size_t deletedCells = 0;
  std::size_t insertedCells = 0;
  std::size_t appendedTuples = 0;
  double initialError = 0.0;
  double finalError = 0.0;
  std::map<std::string, double> stats;
};

/// Tuples touched per tool, keyed by tool name.
using AccessLog = std::map<std::string, std::set<std::pair<TableId, TupleId>>>;

/// Mediates every dataset change. A tool run proposes batches; each batch is
/// simulated against the features of tools applied earlier and applied only
/// if none of them is pushed above max(eThreshold, its current error).
class Coordinator {
 public:
  explicit Coordinator(Dataset& data, CoordinatorConfig config = {});

  ToolHandle registerTool(std::unique_ptr<Tool> tool);
  [[nodiscard]] Tool& tool(ToolHandle h) { return *tools_.at(h).tool; }
  [[nodiscard]] const Tool& tool(ToolHandle h) const { return *tools_.at(h).tool; }
  [[nodiscard]] std::size_t toolCount() const { return tools_.size(); }
  [[nodiscard]] std::optional<ToolHandle> findTool(std::string_view name) const;

  [[nodiscard]] const Dataset& dataset() const { return data_; }
  [[nodiscard]] const CoordinatorConfig& config() const { return config_; }
  [[nodiscard]] std::uint64_t version() const { return version_; }
  [[nodiscard]] const std::vector<JournalRecord>& journal() const { return journal_; }
  [[nodiscard]] const AccessLog& accessLog() const { return access_; }
  /// Tools in the order their most recent run finished, oldest first.
  [[nodiscard]] std::vector<ToolHandle> appliedOrder() const;

  /// Runs the tool's tweaking algorithm to completion.
  ToolRunSummary runTool(ToolHandle h);

  void beginRun(ToolHandle h);
  ToolRunSummary endRun();

  Verdict propose(ToolHandle h, Batch& batch);
  void apply(ToolHandle h, Batch& batch, const Verdict& verdict);
  /// Applies the first acceptable candidate and returns its index. When all
  /// are rejected, validation of the earliest-applied feature is dropped for
  /// this submission and the candidates are retried.
  std::size_t submit(ToolHandle h, std::vector<Batch>& candidates);

  /// Seed for the current run of tool `h`.
  [[nodiscard]] std::uint64_t runSeed(ToolHandle h) const;

 private:
  struct Entry {
    std::unique_ptr<Tool> tool;
    std::uint64_t appliedAt = 0;  // 0 = never applied
    std::size_t runs = 0;
  };

  void checkCurrent(ToolHandle h) const;
  std::vector<ToolHandle> validators() const;

  Dataset& data_;
  CoordinatorConfig config_;
  std::vector<Entry> tools_;
  std::optional<ToolHandle> current_;
  std::set<ToolHandle> relaxed_;
  ToolRunSummary summary_;
  std::uint64_t version_ = 0;
  std::uint64_t clock_ = 0;
  std::vector<JournalRecord> journal_;
  AccessLog access_;
};

}  // namespace tweakscale

#endif  // TWEAKSCALE_COORDINATOR_HPP_
