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

#include "tweakscale/coappear_tool.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "tweakscale/coordinator.hpp"
#include "tweakscale/error.hpp"

namespace tweakscale {
namespace {

constexpr std::size_t kCandidates = 8;
constexpr std::size_t kPlanDraws = 16;

std::int64_t manhattan(const CoappearVector& a, const CoappearVector& b) {
  std::int64_t d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d += std::llabs(a[i] - b[i]);
  return d;
}

// Walks all combinations of referenced keys in lexicographic order.
class Odometer {
 public:
  explicit Odometer(std::vector<std::vector<TupleId>> keys) : keys_(std::move(keys)), pos_(keys_.size(), 0) {
    done_ = std::any_of(keys_.begin(), keys_.end(), [](const auto& k) { return k.empty(); });
  }

  std::optional<Combination> next() {
    if (done_) return std::nullopt;
    Combination c(keys_.size());
    for (std::size_t m = 0; m < keys_.size(); ++m) c[m] = keys_[m][pos_[m]];
    std::size_t m = keys_.size();
    while (m-- > 0) {
      if (++pos_[m] < keys_[m].size()) break;
      pos_[m] = 0;
      if (m == 0) done_ = true;
    }
    return c;
  }

 private:
  std::vector<std::vector<TupleId>> keys_;
  std::vector<std::size_t> pos_;
  bool done_ = false;
};

struct Transition {
  Combination combo;
  CoappearVector from;
  CoappearVector to;
};

}  // namespace

CoappearTool::CoappearTool(const DatasetSchema& schema, std::string name)
    : CoappearTool(schema, detectCoappearGroups(schema), std::move(name)) {}

CoappearTool::CoappearTool(const DatasetSchema& schema, std::vector<CoappearGroup> groups, std::string name)
    : schema_(schema), name_(std::move(name)), groups_(std::move(groups)) {
  for (const auto& g : groups_) states_.emplace_back(schema_, g);
}

void CoappearTool::bindTargets() {
  for (std::size_t g = 0; g < states_.size(); ++g) states_[g].setTarget(has_target_ ? &targets_[g] : nullptr);
}

void CoappearTool::setTargets(std::vector<CoappearDistribution> targets) {
  std::vector<CoappearDistribution> ordered;
  for (const auto& group : groups_) {
    auto it = std::find_if(targets.begin(), targets.end(), [&](const auto& t) { return t.group == group; });
    if (it == targets.end()) {
      throw Error(ErrorCode::kGroupMismatch, "no coappear target for the group of " + group.referencing.front());
    }
    ordered.push_back(*it);
  }
  targets_ = std::move(ordered);
  has_target_ = true;
  bindTargets();
}

std::vector<CoappearDistribution> CoappearTool::current() const {
  std::vector<CoappearDistribution> out;
  for (const auto& s : states_) out.push_back(s.distribution());
  return out;
}

void CoappearTool::generateTarget(const Dataset& reference, const Dataset& scaled) {
  const SizeTarget from = currentSizes(reference);
  const SizeTarget to = currentSizes(scaled);
  std::vector<CoappearDistribution> targets;
  for (const auto& g : groups_) targets.push_back(generateTargetC(computeCoappear(reference, g), from, to));
  setTargets(std::move(targets));
}

void CoappearTool::prepareTarget(const Dataset& d, bool repair) {
  if (!has_target_) throw Error(ErrorCode::kConfigError, name_ + " has no target");
  const SizeTarget sizes = currentSizes(d);
  for (auto& target : targets_) {
    const auto violations = checkNecessityC(target, sizes);
    if (violations.empty()) continue;
    if (!repair) {
      throw Error(ErrorCode::kTargetInfeasible,
                  name_ + ": " + violations.front().condition + " violated, " + violations.front().detail);
    }
    target = repairTargetC(target, sizes);
  }
  bindTargets();
}

void CoappearTool::calculate(const Dataset& d) {
  for (auto& s : states_) s.build(d);
  calculated_ = true;
}

std::vector<double> CoappearTool::itemErrors() const {
  std::vector<double> out;
  if (!has_target_) return out;
  for (const auto& s : states_) out.push_back(s.error());
  return out;
}

double CoappearTool::error() const {
  const auto items = itemErrors();
  if (items.empty()) return 0.0;
  return std::accumulate(items.begin(), items.end(), 0.0) / static_cast<double>(items.size());
}

double CoappearTool::simulate(const EditList& edits) {
  update(edits);
  const double e = error();
  update(invert(edits));
  return e;
}

void CoappearTool::update(const EditList& edits) {
  for (auto& s : states_) s.apply(edits);
}

double CoappearTool::recomputeError(const Dataset& d) const {
  if (targets_.empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t g = 0; g < groups_.size(); ++g) sum += coappearError(targets_[g], computeCoappear(d, groups_[g]));
  return sum / static_cast<double>(groups_.size());
}

void CoappearTool::tweak(Coordinator& coord, ToolHandle self) {
  stats_ = {{"moves", 0}, {"combinations", 0}};
  Rng rng(coord.runSeed(self));
  for (std::size_t g = 0; g < groups_.size(); ++g) tweakGroup(coord, self, g, rng);
}

void CoappearTool::tweakGroup(Coordinator& coord, ToolHandle self, std::size_t g, Rng& rng) {
  const CoappearState& st = states_[g];
  const CoappearDistribution& target = targets_[g];
  const std::size_t k = st.arity();
  const CoappearVector zero(k, 0);
  const Dataset& d = coord.dataset();

  // Signed gap per vector class, zero class included.
  std::map<CoappearVector, std::int64_t> gap;
  for (const auto& [v, n] : target.counts) gap[v] += n;
  for (const auto& [v, n] : st.histogram()) gap[v] -= n;
  gap[zero] += zeroMassOf(target, st.nfk()) - st.zeroMass();

  std::map<CoappearVector, std::vector<Combination>> members;
  for (const auto& [c, v] : st.combinations()) members[v].push_back(c);
  for (auto& [v, list] : members) {
    std::sort(list.begin(), list.end());
    list = sample(rng, list, list.size());
  }
  std::map<CoappearVector, std::size_t> cursor;

  std::vector<std::vector<TupleId>> keys;
  for (std::size_t m = 0; m < st.group().referenced.size(); ++m) {
    std::vector<TupleId> ids;
    for (const Tuple& t : d.table(st.referencedTable(m)).rows()) ids.push_back(t.id);
    keys.push_back(std::move(ids));
  }
  Odometer odometer(keys);
  std::set<Combination> planned;
  const auto free = [&](const Combination& c) { return !st.combinations().contains(c) && !planned.contains(c); };
  const auto draw = [&]() -> std::optional<Combination> {
    for (int attempt = 0; attempt < 64; ++attempt) {
      Combination c;
      for (const auto& ids : keys) {
        if (ids.empty()) return std::nullopt;
        c.push_back(ids[uniformBelow(rng, ids.size())]);
      }
      if (free(c)) return c;
    }
    return std::nullopt;
  };

  // refs[i][m][x]: rows of referencing table i whose m-th key is x. net[i][m]
  // is the planned change in distinct keys, which the linear features see.
  std::vector<std::vector<std::map<std::int64_t, std::int64_t>>> refs(k);
  std::vector<std::vector<std::int64_t>> net(k);
  for (std::size_t i = 0; i < k; ++i) {
    const auto& cols = st.fkColumns(i);
    refs[i].resize(cols.size());
    net[i].assign(cols.size(), 0);
    for (const Tuple& t : d.table(st.referencingTable(i)).rows()) {
      for (std::size_t m = 0; m < cols.size(); ++m) ++refs[i][m][asInt(t.cells[cols[m]]).value_or(0)];
    }
  }
  const auto presence = [&](const Combination& c, const CoappearVector& from, const CoappearVector& to) {
    std::vector<std::vector<std::int64_t>> delta(k);
    for (std::size_t i = 0; i < k; ++i) {
      delta[i].assign(c.size(), 0);
      if (from[i] == to[i]) continue;
      for (std::size_t m = 0; m < c.size(); ++m) {
        const auto it = refs[i][m].find(c[m]);
        const std::int64_t before = it == refs[i][m].end() ? 0 : it->second;
        const std::int64_t after = before + to[i] - from[i];
        delta[i][m] = (after > 0 ? 1 : 0) - (before > 0 ? 1 : 0);
      }
    }
    return delta;
  };
  const auto cost = [&](const std::vector<std::vector<std::int64_t>>& delta) {
    std::int64_t s = 0;
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t m = 0; m < delta[i].size(); ++m) s += std::llabs(net[i][m] + delta[i][m]);
    }
    return s;
  };
  // Picks the candidate that keeps the planned distinct-key drift smallest.
  const auto pickBest = [&](const std::vector<Combination>& pool, const CoappearVector& from,
                            const CoappearVector& to) {
    std::size_t best = 0;
    std::int64_t best_cost = 0;
    for (std::size_t c = 0; c < pool.size(); ++c) {
      const std::int64_t x = cost(presence(pool[c], from, to));
      if (c == 0 || x < best_cost) {
        best = c;
        best_cost = x;
      }
    }
    return best;
  };
  const auto commit = [&](const Combination& c, const CoappearVector& from, const CoappearVector& to) {
    const auto delta = presence(c, from, to);
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t m = 0; m < c.size(); ++m) {
        net[i][m] += delta[i][m];
        refs[i][m][c[m]] += to[i] - from[i];
      }
    }
  };

  std::map<CoappearVector, std::int64_t> surplus;
  for (const auto& [v, n] : gap) {
    if (n < 0) surplus[v] = -n;
  }

  // Symbolic plan: each combination changes class at most once.
  std::vector<Transition> plan;
  for (const auto& [v, need] : gap) {
    for (std::int64_t u = 0; u < need; ++u) {
      auto best = surplus.end();
      std::int64_t best_dist = 0;
      for (auto it = surplus.begin(); it != surplus.end(); ++it) {
        const std::int64_t dist = manhattan(v, it->first);
        if (best == surplus.end() || dist < best_dist) {
          best = it;
          best_dist = dist;
        }
      }
      if (best == surplus.end()) throw Error(ErrorCode::kTargetInfeasible, name_ + ": target mass does not balance");
      const CoappearVector from = best->first;
      Combination combo;
      if (from == zero) {
        std::vector<Combination> pool;
        for (std::size_t c = 0; c < kPlanDraws; ++c) {
          auto drawn = draw();
          if (!drawn) break;
          if (std::find(pool.begin(), pool.end(), *drawn) == pool.end()) pool.push_back(std::move(*drawn));
        }
        if (pool.empty()) {
          while (auto c = odometer.next()) {
            if (free(*c)) {
              pool.push_back(std::move(*c));
              break;
            }
          }
        }
        if (pool.empty()) throw Error(ErrorCode::kTargetInfeasible, name_ + ": ran out of unused combinations");
        combo = std::move(pool[pickBest(pool, from, v)]);
        planned.insert(combo);
      } else {
        auto& list = members[from];
        std::size_t& at = cursor[from];
        const std::size_t end = std::min(list.size(), at + kPlanDraws);
        const std::vector<Combination> pool(list.begin() + static_cast<std::ptrdiff_t>(at),
                                            list.begin() + static_cast<std::ptrdiff_t>(end));
        std::swap(list[at], list[at + pickBest(pool, from, v)]);
        combo = list[at++];
      }
      commit(combo, from, v);
      plan.push_back({std::move(combo), from, v});
      if (--best->second == 0) surplus.erase(best);
    }
  }
  stats_["combinations"] += static_cast<double>(plan.size());

  for (std::size_t i = 0; i < k; ++i) {
    std::vector<const Combination*> removals;
    std::vector<const Combination*> additions;
    std::set<Combination> losing;
    for (const Transition& t : plan) {
      for (std::int64_t n = t.to[i]; n < t.from[i]; ++n) removals.push_back(&t.combo);
      for (std::int64_t n = t.from[i]; n < t.to[i]; ++n) additions.push_back(&t.combo);
      if (t.from[i] > t.to[i]) losing.insert(t.combo);
    }
    if (removals.size() != additions.size()) {
      throw Error(ErrorCode::kTargetInfeasible, name_ + ": marginal of " + st.group().referencing[i] + " not preserved");
    }
    if (removals.empty()) continue;

    const TableId table = st.referencingTable(i);
    const auto& cols = st.fkColumns(i);
    std::map<Combination, std::vector<TupleId>> holders;
    // refs[m][x]: rows of this table whose m-th key column holds x.
    std::vector<std::map<std::int64_t, std::int64_t>> refs(cols.size());
    for (const Tuple& t : d.table(table).rows()) {
      Combination c;
      for (std::size_t col : cols) c.push_back(asInt(t.cells[col]).value_or(0));
      for (std::size_t m = 0; m < c.size(); ++m) ++refs[m][c[m]];
      if (losing.contains(c)) holders[c].push_back(t.id);
    }

    // Any pairing of removals with additions yields the same histogram, so
    // each addition may take its source from any pending removal. Sources
    // that leave the number of distinct referenced keys per column unchanged
    // disturb the linear features least.
    const auto score = [&](const Combination& from, const Combination& to) {
      int s = 0;
      for (std::size_t m = 0; m < cols.size(); ++m) {
        if (from[m] == to[m]) continue;
        const auto& r = refs[m];
        const auto a = r.find(from[m]);
        const auto b = r.find(to[m]);
        const int lost = (a == r.end() || a->second <= 1) ? 1 : 0;
        const int gained = (b == r.end() || b->second == 0) ? 1 : 0;
        s -= std::abs(gained - lost);
      }
      return s;
    };
    while (!additions.empty()) {
      const Combination& to = *additions.back();
      std::vector<std::size_t> order(removals.size());
      std::iota(order.begin(), order.end(), std::size_t{0});
      std::vector<int> scores(removals.size());
      for (std::size_t r = 0; r < removals.size(); ++r) scores[r] = score(*removals[r], to);
      std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return scores[x] > scores[y]; });

      struct Choice {
        std::size_t removal;
        TupleId rid;
      };
      std::vector<Choice> choices;
      std::vector<Batch> candidates;
      std::set<Combination> used;
      for (std::size_t r : order) {
        if (candidates.size() >= kCandidates) break;
        const Combination& from = *removals[r];
        if (!used.insert(from).second) continue;
        std::vector<std::size_t> changed;
        std::vector<Cell> values;
        for (std::size_t m = 0; m < cols.size(); ++m) {
          if (from[m] != to[m]) {
            changed.push_back(cols[m]);
            values.emplace_back(to[m]);
          }
        }
        const auto& pool = holders[from];
        for (std::size_t c = 0; c < pool.size() && c < 2 && candidates.size() < kCandidates; ++c) {
          choices.push_back({r, pool[c]});
          candidates.push_back(Batch{DeleteValues{table, {pool[c]}, changed},
                                     InsertValues{table, {pool[c]}, changed, values}});
        }
      }
      const Choice pick = choices[coord.submit(self, candidates)];
      const Combination& from = *removals[pick.removal];
      for (std::size_t m = 0; m < cols.size(); ++m) {
        --refs[m][from[m]];
        ++refs[m][to[m]];
      }
      auto& pool = holders[from];
      pool.erase(std::find(pool.begin(), pool.end(), pick.rid));
      removals.erase(removals.begin() + static_cast<std::ptrdiff_t>(pick.removal));
      additions.pop_back();
      ++stats_["moves"];
    }
  }
  if (states_[g].error() > 0.0) {
    throw Error(ErrorCode::kTargetInfeasible, name_ + ": group of " + st.group().referencing.front() +
                                                  " did not reach its target");
  }
}

}  // namespace tweakscale
