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

#ifndef TWEAKSCALE_LINEAR_TOOL_HPP_
#define TWEAKSCALE_LINEAR_TOOL_HPP_

#include <map>
#include <string>
#include <vector>

#include "tweakscale/linear.hpp"
#include "tweakscale/rng.hpp"
#include "tweakscale/tool.hpp"

namespace tweakscale {

/// Enforces a linear join matrix on every maximal chain of the schema.
/// Chains are tweaked in enumeration order, rows top-down, entries left to
/// right; every edit is a replaceValues on one foreign key cell.
class LinearTool : public Tool {
 public:
  explicit LinearTool(const DatasetSchema& schema, std::string name = "linear");
  LinearTool(const DatasetSchema& schema, std::vector<ReferenceChain> chains, std::string name = "linear");

  [[nodiscard]] const std::vector<ReferenceChain>& chains() const { return chains_; }
  [[nodiscard]] const std::vector<LinearJoinMatrix>& targets() const { return targets_; }
  /// Targets are matched to chains by their chain field. Throws kSpecMismatch.
  void setTargets(std::vector<LinearJoinMatrix> targets);
  [[nodiscard]] std::vector<LinearJoinMatrix> current() const;

  [[nodiscard]] std::string name() const override { return name_; }
  [[nodiscard]] FeatureKind kind() const override { return FeatureKind::kLinear; }
  void generateTarget(const Dataset& reference, const Dataset& scaled) override;
  void prepareTarget(const Dataset& d, bool repair) override;
  [[nodiscard]] bool hasTarget() const override { return has_target_; }
  void calculate(const Dataset& d) override;
  [[nodiscard]] bool calculated() const override { return calculated_; }
  [[nodiscard]] double error() const override;
  [[nodiscard]] std::vector<double> itemErrors() const override;
  double simulate(const EditList& edits) override;
  void update(const EditList& edits) override;
  [[nodiscard]] double recomputeError(const Dataset& d) const override;
  void tweak(Coordinator& coord, ToolHandle self) override;
  [[nodiscard]] std::map<std::string, double> runStats() const override { return stats_; }

 private:
  void tweakChain(Coordinator& coord, ToolHandle self, std::size_t k, Rng& rng);
  void lowerEntry(Coordinator& coord, ToolHandle self, std::size_t k, std::size_t j, std::size_t i,
                  std::int64_t target, Rng& rng);
  void raiseEntry(Coordinator& coord, ToolHandle self, std::size_t k, std::size_t j, std::size_t i,
                  std::int64_t target, Rng& rng);

  DatasetSchema schema_;
  std::string name_;
  std::vector<ReferenceChain> chains_;
  std::vector<LinearJoinMatrix> targets_;
  std::vector<LinearState> states_;
  bool has_target_ = false;
  bool calculated_ = false;
  std::map<std::string, double> stats_;
};

}  // namespace tweakscale

#endif  // TWEAKSCALE_LINEAR_TOOL_HPP_
