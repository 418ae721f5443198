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

#ifndef TWEAKSCALE_COAPPEAR_TOOL_HPP_
#define TWEAKSCALE_COAPPEAR_TOOL_HPP_

#include <map>
#include <string>
#include <vector>

#include "tweakscale/coappear.hpp"
#include "tweakscale/rng.hpp"
#include "tweakscale/tool.hpp"

namespace tweakscale {

/// Enforces a coappear distribution on every coappear group. Surplus
/// combinations are moved to the closest deficit vector; each unit of work
/// re-points one referencing tuple with deleteValues + insertValues.
class CoappearTool : public Tool {
 public:
  explicit CoappearTool(const DatasetSchema& schema, std::string name = "coappear");
  CoappearTool(const DatasetSchema& schema, std::vector<CoappearGroup> groups, std::string name = "coappear");

  [[nodiscard]] const std::vector<CoappearGroup>& groups() const { return groups_; }
  [[nodiscard]] const std::vector<CoappearDistribution>& targets() const { return targets_; }
  void setTargets(std::vector<CoappearDistribution> targets);
  [[nodiscard]] std::vector<CoappearDistribution> current() const;

  [[nodiscard]] std::string name() const override { return name_; }
  [[nodiscard]] FeatureKind kind() const override { return FeatureKind::kCoappear; }
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
  void bindTargets();
  void tweakGroup(Coordinator& coord, ToolHandle self, std::size_t g, Rng& rng);

  DatasetSchema schema_;
  std::string name_;
  std::vector<CoappearGroup> groups_;
  std::vector<CoappearDistribution> targets_;
  std::vector<CoappearState> states_;
  bool has_target_ = false;
  bool calculated_ = false;
  std::map<std::string, double> stats_;
};

}  // namespace tweakscale

#endif  // TWEAKSCALE_COAPPEAR_TOOL_HPP_
