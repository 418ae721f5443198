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

#include "tweakscale/linear_tool.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "tweakscale/coordinator.hpp"
#include "tweakscale/error.hpp"

namespace tweakscale {
namespace {

constexpr std::size_t kCandidates = 8;

Batch moveTo(TableId table, TupleId tuple, std::size_t column, TupleId parent) {
  return Batch{ReplaceValues{table, {tuple}, {column}, {Cell{parent}}}};
}

}  // namespace

LinearTool::LinearTool(const DatasetSchema& schema, std::string name)
    : LinearTool(schema, enumerateMaximalChains(schema), std::move(name)) {}

LinearTool::LinearTool(const DatasetSchema& schema, std::vector<ReferenceChain> chains, std::string name)
    : schema_(schema), name_(std::move(name)), chains_(std::move(chains)) {
  for (const auto& c : chains_) states_.emplace_back(schema_, c);
}

void LinearTool::setTargets(std::vector<LinearJoinMatrix> targets) {
  std::vector<LinearJoinMatrix> ordered;
  for (const auto& chain : chains_) {
    auto it = std::find_if(targets.begin(), targets.end(), [&](const auto& m) { return m.chain == chain; });
    if (it == targets.end()) {
      throw Error(ErrorCode::kSpecMismatch, "no linear target for chain starting at " + chain.tables.front());
    }
    if (it->h.size() != chain.length()) throw Error(ErrorCode::kShapeMismatch, "linear target has the wrong size");
    ordered.push_back(*it);
  }
  targets_ = std::move(ordered);
  has_target_ = true;
}

std::vector<LinearJoinMatrix> LinearTool::current() const {
  std::vector<LinearJoinMatrix> out;
  for (const auto& s : states_) out.push_back(s.matrix());
  return out;
}

void LinearTool::generateTarget(const Dataset& reference, const Dataset& scaled) {
  const SizeTarget from = currentSizes(reference);
  const SizeTarget to = currentSizes(scaled);
  std::vector<LinearJoinMatrix> targets;
  for (const auto& chain : chains_) targets.push_back(generateTargetL(computeLinearMatrix(reference, chain), from, to));
  setTargets(std::move(targets));
}

void LinearTool::prepareTarget(const Dataset& d, bool repair) {
  if (!has_target_) throw Error(ErrorCode::kConfigError, name_ + " has no target");
  const SizeTarget sizes = currentSizes(d);
  for (auto& target : targets_) {
    const auto violations = checkNecessityL(target, sizes);
    if (violations.empty()) continue;
    if (!repair) {
      throw Error(ErrorCode::kTargetInfeasible,
                  name_ + ": " + violations.front().condition + " violated, " + violations.front().detail);
    }
    target = repairTargetL(target, sizes);
  }
}

void LinearTool::calculate(const Dataset& d) {
  for (auto& s : states_) s.build(d);
  calculated_ = true;
}

std::vector<double> LinearTool::itemErrors() const {
  std::vector<double> out;
  if (!has_target_) return out;
  for (std::size_t k = 0; k < states_.size(); ++k) out.push_back(linearError(targets_[k], states_[k].matrix()));
  return out;
}

double LinearTool::error() const {
  const auto items = itemErrors();
  if (items.empty()) return 0.0;
  return std::accumulate(items.begin(), items.end(), 0.0) / static_cast<double>(items.size());
}

double LinearTool::simulate(const EditList& edits) {
  update(edits);
  const double e = error();
  update(invert(edits));
  return e;
}

void LinearTool::update(const EditList& edits) {
  for (auto& s : states_) s.apply(edits);
}

double LinearTool::recomputeError(const Dataset& d) const {
  if (targets_.empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t k = 0; k < chains_.size(); ++k) sum += linearError(targets_[k], computeLinearMatrix(d, chains_[k]));
  return sum / static_cast<double>(chains_.size());
}

void LinearTool::tweak(Coordinator& coord, ToolHandle self) {
  stats_ = {{"isoAdjustments", 0}, {"isoBoundExceeded", 0}, {"moves", 0}};
  Rng rng(coord.runSeed(self));
  for (std::size_t k = 0; k < chains_.size(); ++k) tweakChain(coord, self, k, rng);
}

void LinearTool::tweakChain(Coordinator& coord, ToolHandle self, std::size_t k, Rng& rng) {
  const LinearState& st = states_[k];
  const LinearJoinMatrix& target = targets_[k];
  for (std::size_t j = 1; j < st.levels(); ++j) {
    for (std::size_t i = 0; i < j; ++i) {
      const std::int64_t want = target.h[j][i];
      if (st.h(j, i) > want) {
        lowerEntry(coord, self, k, j, i, want, rng);
      } else if (st.h(j, i) < want) {
        raiseEntry(coord, self, k, j, i, want, rng);
      }
      if (st.h(j, i) != want) {
        throw Error(ErrorCode::kTargetInfeasible, name_ + ": entry (" + std::to_string(j + 1) + "," +
                                                      std::to_string(i + 1) + ") could not be reached");
      }
    }
  }
}

// Too many roots at level i for depth j: strip every level-j descendant off
// the roots with the fewest of them. Each level i-1 node keeps one of its
// roots so entries to the left stay put.
void LinearTool::lowerEntry(Coordinator& coord, ToolHandle self, std::size_t k, std::size_t j, std::size_t i,
                            std::int64_t target, Rng& rng) {
  const LinearState& st = states_[k];
  std::vector<TupleId> roots;
  for (TupleId id : st.ids(i)) {
    if (static_cast<std::size_t>(st.node(i, id).reach) >= j) roots.push_back(id);
  }
  std::map<TupleId, std::size_t> weight;
  for (TupleId r : roots) weight[r] = st.descendants(i, r, j).size();

  std::set<TupleId> keep;
  if (i > 0) {
    std::map<TupleId, TupleId> best;  // parent -> kept root
    for (TupleId r : roots) {
      const TupleId p = st.node(i, r).parent;
      auto [it, fresh] = best.emplace(p, r);
      if (!fresh && weight[r] > weight[it->second]) it->second = r;
    }
    for (const auto& [p, r] : best) keep.insert(r);
  }

  std::vector<TupleId> pluckable;
  for (TupleId r : roots) {
    if (!keep.contains(r)) pluckable.push_back(r);
  }
  std::stable_sort(pluckable.begin(), pluckable.end(),
                   [&](TupleId a, TupleId b) { return weight[a] < weight[b]; });
  const std::size_t excess = roots.size() - static_cast<std::size_t>(target);
  if (pluckable.size() < excess) {
    throw Error(ErrorCode::kTargetInfeasible, name_ + ": not enough roots can be removed");
  }
  pluckable.resize(excess);
  const std::set<TupleId> victims(pluckable.begin(), pluckable.end());

  std::vector<TupleId> hosts;  // level j-1 nodes with children under a surviving root
  for (TupleId id : st.ids(j - 1)) {
    if (!st.node(j - 1, id).children.empty() && !victims.contains(st.ancestor(j - 1, id, i))) {
      hosts.push_back(id);
    }
  }
  if (hosts.empty()) throw Error(ErrorCode::kTargetInfeasible, name_ + ": no surviving root to re-attach to");

  const TableId table = st.tableAt(j);
  const std::size_t column = st.fkColumnAt(j);
  for (TupleId v : pluckable) {
    for (TupleId x : st.descendants(i, v, j)) {
      std::vector<Batch> candidates;
      for (TupleId p : sample(rng, hosts, kCandidates)) candidates.push_back(moveTo(table, x, column, p));
      coord.submit(self, candidates);
      ++stats_["moves"];
    }
  }
}

// Too few roots: hang spare level-j tuples below level i nodes that reach
// exactly j-1 and whose parent is already a root of depth j. Isomorphic
// re-parenting supplies such nodes when there are not enough.
void LinearTool::raiseEntry(Coordinator& coord, ToolHandle self, std::size_t k, std::size_t j, std::size_t i,
                            std::int64_t target, Rng& rng) {
  const LinearState& st = states_[k];
  const std::size_t deficit = static_cast<std::size_t>(target - st.h(j, i));
  const int shallow = static_cast<int>(j) - 1;

  std::vector<TupleId> ready;
  for (TupleId id : st.ids(i)) {
    const auto& n = st.node(i, id);
    if (n.reach != shallow) continue;
    if (i == 0 || (n.parent != LinearState::kNone && static_cast<std::size_t>(st.node(i - 1, n.parent).reach) >= j)) {
      ready.push_back(id);
    }
  }

  if (ready.size() < deficit) {
    if (i == 0) throw Error(ErrorCode::kTargetInfeasible, name_ + ": too few candidate roots");
    auto diag = [&](std::size_t row, std::size_t col) {
      return row == col ? static_cast<std::int64_t>(st.nodes(row).size()) : st.h(row, col);
    };
    const std::int64_t bound = (diag(j - 1, i) - st.h(j, i)) - (diag(j - 1, i - 1) - st.h(j, i - 1));

    std::vector<TupleId> anchors;  // level i-1 nodes already reaching j
    for (TupleId id : st.ids(i - 1)) {
      if (static_cast<std::size_t>(st.node(i - 1, id).reach) >= j) anchors.push_back(id);
    }
    std::vector<TupleId> movable;
    for (TupleId q : st.ids(i - 1)) {
      if (st.node(i - 1, q).reach != shallow) continue;
      std::vector<TupleId> kids;
      for (TupleId c : st.node(i - 1, q).children) {
        if (st.node(i, c).reach == shallow) kids.push_back(c);
      }
      std::sort(kids.begin(), kids.end());
      movable.insert(movable.end(), kids.begin() + (kids.empty() ? 0 : 1), kids.end());
    }
    std::size_t need = deficit - ready.size();
    if (movable.size() < need || anchors.empty()) {
      throw Error(ErrorCode::kTargetInfeasible, name_ + ": isomorphic adjustment cannot supply enough roots");
    }
    const TableId table = st.tableAt(i);
    const std::size_t column = st.fkColumnAt(i);
    std::int64_t done = 0;
    for (std::size_t m = 0; m < need; ++m) {
      std::vector<Batch> candidates;
      for (TupleId p : sample(rng, anchors, kCandidates)) candidates.push_back(moveTo(table, movable[m], column, p));
      coord.submit(self, candidates);
      ready.push_back(movable[m]);
      ++done;
    }
    stats_["isoAdjustments"] += static_cast<double>(done);
    if (done > bound) ++stats_["isoBoundExceeded"];
  }

  // Every current root keeps one level-j descendant; the rest are spare.
  std::set<TupleId> kept;
  for (TupleId id : st.ids(i)) {
    if (static_cast<std::size_t>(st.node(i, id).reach) < j) continue;
    const auto below = st.descendants(i, id, j);
    kept.insert(below.front());
  }
  std::vector<TupleId> spare;
  for (TupleId x : st.ids(j)) {
    if (!kept.contains(x)) spare.push_back(x);
  }
  // Prefer tuples whose parent keeps another child.
  std::stable_sort(spare.begin(), spare.end(), [&](TupleId a, TupleId b) {
    auto crowded = [&](TupleId x) {
      const TupleId p = st.node(j, x).parent;
      return p != LinearState::kNone && st.node(j - 1, p).children.size() >= 2;
    };
    return crowded(a) > crowded(b);
  });
  if (spare.size() < deficit) throw Error(ErrorCode::kTargetInfeasible, name_ + ": too few spare tuples");

  const TableId table = st.tableAt(j);
  const std::size_t column = st.fkColumnAt(j);
  for (std::size_t u = 0; u < deficit; ++u) {
    const auto hosts = st.descendants(i, ready[u], j - 1);
    std::vector<Batch> candidates;
    for (TupleId z : sample(rng, hosts, kCandidates)) candidates.push_back(moveTo(table, spare[u], column, z));
    coord.submit(self, candidates);
    ++stats_["moves"];
  }
}

}  // namespace tweakscale
