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

#ifndef TWEAKSCALE_TOOL_HPP_
#define TWEAKSCALE_TOOL_HPP_

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "tweakscale/dataset.hpp"
#include "tweakscale/modification.hpp"

namespace tweakscale {

class Coordinator;
using ToolHandle = std::size_t;

enum class FeatureKind { kLinear, kCoappear, kPairwise, kOther };

/// A tweaking tool. The coordinator drives it through these hooks:
/// generator (generateTarget / prepareTarget), tweaking algorithm (tweak),
/// calculator (calculate), validator (simulate) and updater (update).
class Tool {
 public:
  virtual ~Tool() = default;

  [[nodiscard]] virtual std::string name() const = 0;
  [[nodiscard]] virtual FeatureKind kind() const = 0;

  /// Target = features of `reference`, rescaled to the table sizes of `scaled`.
  virtual void generateTarget(const Dataset& reference, const Dataset& scaled) = 0;
  /// Checks the target against the sizes of `d`. Repairs it if `repair`,
  /// otherwise throws Error(kTargetInfeasible) on a violation.
  virtual void prepareTarget(const Dataset& d, bool repair) = 0;
  [[nodiscard]] virtual bool hasTarget() const = 0;

  virtual void calculate(const Dataset& d) = 0;
  [[nodiscard]] virtual bool calculated() const = 0;
  /// Mean of itemErrors(); 0 when there are no items.
  [[nodiscard]] virtual double error() const = 0;
  [[nodiscard]] virtual std::vector<double> itemErrors() const = 0;
  /// Error the feature would have after `edits`. State is left unchanged.
  virtual double simulate(const EditList& edits) = 0;
  virtual void update(const EditList& edits) = 0;
  /// Full recomputation against `d`, used to cross-check simulate().
  [[nodiscard]] virtual double recomputeError(const Dataset& d) const = 0;

  virtual void tweak(Coordinator& coord, ToolHandle self) = 0;

  /// Tool-specific counters for the last tweak() call.
  [[nodiscard]] virtual std::map<std::string, double> runStats() const { return {}; }
};

}  // namespace tweakscale

#endif  // TWEAKSCALE_TOOL_HPP_
