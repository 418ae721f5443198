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

#include "tweakscale/coordinator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "tweakscale/error.hpp"
#include "tweakscale/rng.hpp"

namespace tweakscale {

namespace {
constexpr double kSlack = 1e-12;
}

Coordinator::Coordinator(Dataset& data, CoordinatorConfig config) : data_(data), config_(config) {
  if (!(config_.eThreshold >= 0.0 && config_.eThreshold < 1.0)) {
    throw Error(ErrorCode::kConfigError, "eThreshold must lie in [0, 1)");
  }
}

ToolHandle Coordinator::registerTool(std::unique_ptr<Tool> tool) {
  if (findTool(tool->name())) throw Error(ErrorCode::kDuplicateToolName, "tool '" + tool->name() + "' already registered");
  tools_.push_back(Entry{std::move(tool)});
  return tools_.size() - 1;
}

std::optional<ToolHandle> Coordinator::findTool(std::string_view name) const {
  for (ToolHandle h = 0; h < tools_.size(); ++h) {
    if (tools_[h].tool->name() == name) return h;
  }
  return std::nullopt;
}

std::vector<ToolHandle> Coordinator::appliedOrder() const {
  std::vector<ToolHandle> order;
  for (ToolHandle h = 0; h < tools_.size(); ++h) {
    if (tools_[h].appliedAt > 0) order.push_back(h);
  }
  std::sort(order.begin(), order.end(),
            [&](ToolHandle a, ToolHandle b) { return tools_[a].appliedAt < tools_[b].appliedAt; });
  return order;
}

std::vector<ToolHandle> Coordinator::validators() const {
  std::vector<ToolHandle> out;
  for (ToolHandle h : appliedOrder()) {
    if (h != current_ && !relaxed_.contains(h)) out.push_back(h);
  }
  return out;
}

std::uint64_t Coordinator::runSeed(ToolHandle h) const {
  const Entry& e = tools_.at(h);
  return deriveSeed(config_.seed, e.tool->name() + "/" + std::to_string(e.runs));
}

void Coordinator::checkCurrent(ToolHandle h) const {
  if (!current_ || *current_ != h) {
    throw Error(ErrorCode::kNotCurrentTool, "tool handle " + std::to_string(h) + " is not the running tool");
  }
}

void Coordinator::beginRun(ToolHandle h) {
  if (h >= tools_.size()) throw Error(ErrorCode::kNotCurrentTool, "unknown tool handle");
  current_ = h;
  relaxed_.clear();
  Entry& e = tools_[h];
  ++e.runs;
  summary_ = ToolRunSummary{};
  summary_.tool = e.tool->name();
  for (ToolHandle g : appliedOrder()) tools_[g].tool->calculate(data_);
  e.tool->prepareTarget(data_, config_.repairTargets);
  e.tool->calculate(data_);
  summary_.initialError = e.tool->error();
}

ToolRunSummary Coordinator::endRun() {
  if (!current_) throw Error(ErrorCode::kNotCurrentTool, "no tool is running");
  Entry& e = tools_[*current_];
  summary_.finalError = e.tool->error();
  summary_.stats = e.tool->runStats();
  e.appliedAt = ++clock_;
  current_.reset();
  relaxed_.clear();
  return summary_;
}

ToolRunSummary Coordinator::runTool(ToolHandle h) {
  beginRun(h);
  try {
    tools_[h].tool->tweak(*this, h);
  } catch (...) {
    current_.reset();
    relaxed_.clear();
    throw;
  }
  return endRun();
}

Verdict Coordinator::propose(ToolHandle h, Batch& batch) {
  checkCurrent(h);
  const EditList edits = resolve(data_, batch);
  Verdict verdict;
  verdict.version = version_;
  verdict.accepted = true;
  for (ToolHandle g : validators()) {
    Tool& t = *tools_[g].tool;
    const double err = t.simulate(edits);
    if (config_.crossCheck) {
      Dataset copy = data_;
      applyEdits(copy, edits);
      const double full = t.recomputeError(copy);
      if (std::abs(full - err) > 1e-9) {
        throw std::logic_error("validator of " + t.name() + " simulated " + std::to_string(err) +
                               " but recomputation gives " + std::to_string(full));
      }
    }
    verdict.perFeatureError[t.name()] = err;
    if (err > std::max(config_.eThreshold, t.error()) + kSlack) {
      verdict.accepted = false;
      break;
    }
  }
  ++summary_.proposed;
  if (verdict.accepted) {
    ++summary_.accepted;
  } else {
    ++summary_.rejected;
  }
  return verdict;
}

void Coordinator::apply(ToolHandle h, Batch& batch, const Verdict& verdict) {
  checkCurrent(h);
  if (!verdict.accepted) throw Error(ErrorCode::kMalformedModification, "batch was rejected and cannot be applied");
  if (verdict.version != version_) {
    throw Error(ErrorCode::kStaleVerdict, "dataset changed since the batch was validated");
  }
  const EditList edits = resolve(data_, batch);
  applyEdits(data_, edits);
  for (Entry& e : tools_) {
    if (e.tool->calculated()) e.tool->update(edits);
  }
  const std::string& name = summary_.tool;
  auto& touched = access_[name];
  for (const CellEdit& edit : edits) touched.emplace(edit.table, edit.tuple);
  for (const Modification& m : batch) journal_.push_back(JournalRecord{m, name, journal_.size()});
  const CellCounts counts = countCells(batch);
  summary_.deletedCells += counts.deleted;
  summary_.insertedCells += counts.inserted;
  summary_.appendedTuples += counts.appended;
  ++version_;
}

std::size_t Coordinator::submit(ToolHandle h, std::vector<Batch>& candidates) {
  checkCurrent(h);
  if (candidates.empty()) throw Error(ErrorCode::kCoordinatorExhausted, summary_.tool + " offered no candidate edits");
  // Relaxation lasts for this submission only.
  relaxed_.clear();
  struct ClearOnExit {
    std::set<ToolHandle>& s;
    ~ClearOnExit() { s.clear(); }
  } guard{relaxed_};
  for (;;) {
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      const Verdict v = propose(h, candidates[i]);
      if (v.accepted) {
        apply(h, candidates[i], v);
        return i;
      }
    }
    const std::vector<ToolHandle> active = validators();
    if (active.empty() || relaxed_.size() >= config_.maxRelaxationRounds) {
      throw Error(ErrorCode::kCoordinatorExhausted,
                  summary_.tool + ": every candidate rejected after " + std::to_string(relaxed_.size()) +
                      " relaxations");
    }
    relaxed_.insert(active.front());
    ++summary_.relaxations;
    const std::string& name = tools_[active.front()].tool->name();
    if (std::find(summary_.relaxed.begin(), summary_.relaxed.end(), name) == summary_.relaxed.end()) {
      summary_.relaxed.push_back(name);
    }
  }
}

}  // namespace tweakscale
