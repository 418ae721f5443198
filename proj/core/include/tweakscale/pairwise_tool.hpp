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

#ifndef TWEAKSCALE_PAIRWISE_TOOL_HPP_
#define TWEAKSCALE_PAIRWISE_TOOL_HPP_

#include <map>
#include <string>
#include <vector>

#include "tweakscale/pairwise.hpp"
#include "tweakscale/rng.hpp"
#include "tweakscale/tool.hpp"

namespace tweakscale {

/// Enforces pairwise distributions on every declared binding. User pairs are
/// moved to the closest deficit class; responses are re-pointed with
/// deleteValues + insertValues. Owners that need a post get one by re-owning
/// a post of a user with several, or by appending a post.
class PairwiseTool : public Tool {
 public:
  explicit PairwiseTool(const DatasetSchema& schema, std::string name = "pairwise", bool self_responses = true);
  PairwiseTool(const DatasetSchema& schema, std::vector<PairwiseBinding> bindings, std::string name = "pairwise",
               bool self_responses = true);

  [[nodiscard]] const std::vector<PairwiseBinding>& bindings() const { return bindings_; }
  [[nodiscard]] bool selfResponses() const { return self_; }
  [[nodiscard]] const std::vector<PairwiseDistribution>& targets() const { return targets_; }
  void setTargets(std::vector<PairwiseDistribution> targets);
  [[nodiscard]] std::vector<PairwiseDistribution> current() const;
  /// Users and responses of `d` as seen by this tool.
  [[nodiscard]] PairwiseTotals totals(const Dataset& d, std::size_t binding) const;

  [[nodiscard]] std::string name() const override { return name_; }
  [[nodiscard]] FeatureKind kind() const override { return FeatureKind::kPairwise; }
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
  void tweakBinding(Coordinator& coord, ToolHandle self, std::size_t g, Rng& rng);
  void ensurePost(Coordinator& coord, ToolHandle self, std::size_t g, TupleId owner, Rng& rng);

  DatasetSchema schema_;
  std::string name_;
  bool self_;
  std::vector<PairwiseBinding> bindings_;
  std::vector<PairwiseDistribution> targets_;
  std::vector<PairwiseState> states_;
  bool has_target_ = false;
  bool calculated_ = false;
  std::map<std::string, double> stats_;
};

}  // namespace tweakscale

#endif  // TWEAKSCALE_PAIRWISE_TOOL_HPP_
