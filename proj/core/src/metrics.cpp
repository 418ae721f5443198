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

#include "tweakscale/metrics.hpp"

#include <cmath>
#include <numeric>
#include <unordered_map>

#include "tweakscale/error.hpp"

namespace tweakscale {
namespace {

constexpr std::pair<QueryKind, std::string_view> kKinds[] = {
    {QueryKind::kChainRootCount, "chainRootCount"},
    {QueryKind::kReferencerThresholdCount, "referencerThresholdCount"},
    {QueryKind::kAverageReferencers, "averageReferencers"},
    {QueryKind::kInteractingUserPairs, "interactingUserPairs"},
};

// Referencing tuples per referenced key.
std::unordered_map<TupleId, std::int64_t> referenceCounts(const Dataset& d, const QuerySpec& q) {
  const std::size_t col = *d.schema().table(q.referencing).fkTo(q.referenced);
  std::unordered_map<TupleId, std::int64_t> out;
  for (const Tuple& t : d.table(q.referencing).rows()) {
    if (auto v = asInt(t.cells[col])) ++out[*v];
  }
  return out;
}

}  // namespace

std::string_view queryKindName(QueryKind kind) {
  for (const auto& [k, n] : kKinds) {
    if (k == kind) return n;
  }
  return "unknown";
}

QueryKind parseQueryKind(std::string_view name) {
  for (const auto& [k, n] : kKinds) {
    if (n == name) return k;
  }
  throw Error(ErrorCode::kConfigError, "unknown query kind '" + std::string(name) + "'");
}

void validateQuery(const DatasetSchema& schema, const QuerySpec& q) {
  auto fail = [&](const std::string& why) { throw Error(ErrorCode::kSpecMismatch, "query " + q.name + ": " + why); };
  switch (q.kind) {
    case QueryKind::kChainRootCount:
      if (q.chain.size() < 2) fail("a chain needs at least two tables");
      for (const auto& t : q.chain) {
        if (!schema.find(t)) fail("unknown table " + t);
      }
      try {
        checkChain(schema, resolveChain(schema, q.chain));
      } catch (const Error& e) {
        fail(e.what());
      }
      break;
    case QueryKind::kReferencerThresholdCount:
    case QueryKind::kAverageReferencers:
      if (!schema.find(q.referencing)) fail("unknown table " + q.referencing);
      if (!schema.find(q.referenced)) fail("unknown table " + q.referenced);
      if (!schema.table(q.referencing).fkTo(q.referenced)) fail(q.referencing + " does not reference " + q.referenced);
      if (q.kind == QueryKind::kReferencerThresholdCount && q.threshold < 1) fail("threshold must be at least 1");
      break;
    case QueryKind::kInteractingUserPairs:
      if (q.binding >= schema.pairwiseBindings.size()) fail("no pairwise binding " + std::to_string(q.binding));
      break;
  }
}

double evalQuery(const Dataset& d, const QuerySpec& q) {
  validateQuery(d.schema(), q);
  switch (q.kind) {
    case QueryKind::kChainRootCount: {
      const LinearJoinMatrix m = computeLinearMatrix(d, resolveChain(d.schema(), q.chain));
      return static_cast<double>(m.h.back().front());
    }
    case QueryKind::kReferencerThresholdCount: {
      std::int64_t n = 0;
      for (const auto& [id, c] : referenceCounts(d, q)) {
        if (c <= q.threshold) ++n;
      }
      return static_cast<double>(n);
    }
    case QueryKind::kAverageReferencers: {
      const auto counts = referenceCounts(d, q);
      if (counts.empty()) return 0.0;
      std::int64_t total = 0;
      for (const auto& [id, c] : counts) total += c;
      return static_cast<double>(total) / static_cast<double>(counts.size());
    }
    case QueryKind::kInteractingUserPairs: {
      const PairwiseDistribution p = computePairwise(d, d.schema().pairwiseBindings[q.binding]);
      std::int64_t ordered = 0;
      for (const auto& [k, v] : p.rhoN) ordered += v;
      return static_cast<double>(ordered / 2);
    }
  }
  return 0.0;
}

double queryError(double truth, double scaled) {
  if (truth == 0.0) throw Error(ErrorCode::kZeroTruth, "query error is undefined for a zero true answer");
  return std::fabs(scaled - truth) / std::fabs(truth);
}

std::optional<double> ErrorReport::mean(const std::vector<double>& values) {
  if (values.empty()) return std::nullopt;
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

ErrorReport featureErrorReport(const Dataset& d, const FeatureTargets& targets) {
  ErrorReport r;
  for (const auto& t : targets.linear) r.linear.push_back(linearError(t, computeLinearMatrix(d, t.chain)));
  for (const auto& t : targets.coappear) r.coappear.push_back(coappearError(t, computeCoappear(d, t.group)));
  for (const auto& t : targets.pairwise) {
    const auto users = static_cast<std::int64_t>(d.table(t.binding.userTable).size());
    r.pairwise.push_back(pairwiseError(t, computePairwise(d, t.binding, targets.selfResponses), users));
  }
  return r;
}

std::vector<QueryResult> evaluateQueries(const Dataset& truth, const Dataset& scaled,
                                         const std::vector<QuerySpec>& queries) {
  std::vector<QueryResult> out;
  for (const auto& q : queries) {
    QueryResult r{q.name, evalQuery(truth, q), evalQuery(scaled, q), std::nullopt};
    if (r.truth != 0.0) r.error = queryError(r.truth, r.scaled);
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace tweakscale
