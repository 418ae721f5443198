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

#ifndef TWEAKSCALE_METRICS_HPP_
#define TWEAKSCALE_METRICS_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tweakscale/coappear.hpp"
#include "tweakscale/coordinator.hpp"
#include "tweakscale/dataset.hpp"
#include "tweakscale/linear.hpp"
#include "tweakscale/pairwise.hpp"

namespace tweakscale {

enum class QueryKind { kChainRootCount, kReferencerThresholdCount, kAverageReferencers, kInteractingUserPairs };

std::string_view queryKindName(QueryKind kind);
/// Throws Error(kConfigError) on an unknown name.
QueryKind parseQueryKind(std::string_view name);

struct QuerySpec {
  std::string name;
  QueryKind kind = QueryKind::kChainRootCount;
  std::vector<std::string> chain;  // chainRootCount, referencing end first
  std::string referencing;         // referencerThresholdCount, averageReferencers
  std::string referenced;
  std::size_t binding = 0;  // interactingUserPairs: index into the schema's bindings
  std::int64_t threshold = 0;
};

/// Throws Error(kSpecMismatch) if `q` names objects `schema` lacks.
void validateQuery(const DatasetSchema& schema, const QuerySpec& q);

/// chainRootCount: roots of the full chain. referencerThresholdCount: tuples
/// of `referenced` with between 1 and `threshold` referencing tuples.
/// averageReferencers: referencing tuples per distinct referenced tuple, 0
/// when nothing is referenced. interactingUserPairs: unordered user pairs with
/// at least one response between them.
double evalQuery(const Dataset& d, const QuerySpec& q);

/// |scaled - truth| / |truth|. Throws Error(kZeroTruth) when truth is 0.
double queryError(double truth, double scaled);

struct FeatureTargets {
  std::vector<LinearJoinMatrix> linear;
  std::vector<CoappearDistribution> coappear;
  std::vector<PairwiseDistribution> pairwise;
  bool selfResponses = true;
};

struct QueryResult {
  std::string name;
  double truth = 0.0;
  double scaled = 0.0;
  std::optional<double> error;  // empty when truth is 0
};

struct ErrorReport {
  std::vector<double> linear;
  std::vector<double> coappear;
  std::vector<double> pairwise;
  std::vector<QueryResult> queries;
  std::vector<ToolRunSummary> runs;

  /// Arithmetic mean, empty for an empty list.
  static std::optional<double> mean(const std::vector<double>& values);
};

ErrorReport featureErrorReport(const Dataset& d, const FeatureTargets& targets);
std::vector<QueryResult> evaluateQueries(const Dataset& truth, const Dataset& scaled,
                                         const std::vector<QuerySpec>& queries);

}  // namespace tweakscale

#endif  // TWEAKSCALE_METRICS_HPP_
