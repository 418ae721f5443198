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

#include "tweakscale/pairwise_tool.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "tweakscale/coordinator.hpp"
#include "tweakscale/error.hpp"

namespace tweakscale {
namespace {

constexpr std::size_t kCandidates = 8;
constexpr std::size_t kPlanDraws = 16;

using UserPair = std::pair<TupleId, TupleId>;

CountPair sortedPair(std::int64_t a, std::int64_t b) { return a <= b ? CountPair{a, b} : CountPair{b, a}; }

// Unordered pair classes (x <= y) from an ordered distribution.
std::map<CountPair, std::int64_t> unorderedClasses(const std::map<CountPair, std::int64_t>& rho) {
  std::map<CountPair, std::int64_t> out;
  for (const auto& [k, v] : rho) {
    if (k.first < k.second) out[k] += v;
    if (k.first == k.second) out[k] += v / 2;
  }
  return out;
}

std::int64_t manhattan(const CountPair& a, const CountPair& b) {
  return std::llabs(a.first - b.first) + std::llabs(a.second - b.second);
}

std::map<TupleId, std::vector<TupleId>> postsByOwner(const Dataset& d, TableId posts, std::size_t owner_col) {
  std::map<TupleId, std::vector<TupleId>> out;
  for (const Tuple& t : d.table(posts).rows()) {
    if (auto o = asInt(t.cells[owner_col])) out[*o].push_back(t.id);
  }
  return out;
}

}  // namespace

PairwiseTool::PairwiseTool(const DatasetSchema& schema, std::string name, bool self_responses)
    : PairwiseTool(schema, schema.pairwiseBindings, std::move(name), self_responses) {}

PairwiseTool::PairwiseTool(const DatasetSchema& schema, std::vector<PairwiseBinding> bindings, std::string name,
                           bool self_responses)
    : schema_(schema), name_(std::move(name)), self_(self_responses), bindings_(std::move(bindings)) {
  for (const auto& b : bindings_) states_.emplace_back(schema_, b, self_);
}

void PairwiseTool::bindTargets() {
  for (std::size_t g = 0; g < states_.size(); ++g) states_[g].setTarget(has_target_ ? &targets_[g] : nullptr);
}

void PairwiseTool::setTargets(std::vector<PairwiseDistribution> targets) {
  std::vector<PairwiseDistribution> ordered;
  for (const auto& b : bindings_) {
    auto it = std::find_if(targets.begin(), targets.end(), [&](const auto& t) { return t.binding == b; });
    if (it == targets.end()) throw Error(ErrorCode::kBindingMismatch, "no pairwise target for " + b.responseTable);
    ordered.push_back(*it);
  }
  targets_ = std::move(ordered);
  has_target_ = true;
  bindTargets();
}

std::vector<PairwiseDistribution> PairwiseTool::current() const {
  std::vector<PairwiseDistribution> out;
  for (const auto& s : states_) out.push_back(s.distribution());
  return out;
}

PairwiseTotals PairwiseTool::totals(const Dataset& d, std::size_t binding) const {
  const PairwiseBinding& b = bindings_.at(binding);
  PairwiseTotals t{static_cast<std::int64_t>(d.table(b.userTable).size()),
                   static_cast<std::int64_t>(d.table(b.responseTable).size())};
  if (!self_) t.responses -= countSelfResponses(d, b);
  return t;
}

void PairwiseTool::generateTarget(const Dataset& reference, const Dataset& scaled) {
  std::vector<PairwiseDistribution> targets;
  for (std::size_t g = 0; g < bindings_.size(); ++g) {
    const auto users = static_cast<std::int64_t>(reference.table(bindings_[g].userTable).size());
    targets.push_back(
        generateTargetP(computePairwise(reference, bindings_[g], self_), users, totals(scaled, g), self_));
  }
  setTargets(std::move(targets));
}

void PairwiseTool::prepareTarget(const Dataset& d, bool repair) {
  if (!has_target_) throw Error(ErrorCode::kConfigError, name_ + " has no target");
  for (std::size_t g = 0; g < targets_.size(); ++g) {
    const PairwiseTotals t = totals(d, g);
    const auto violations = checkNecessityP(targets_[g], t, self_);
    if (violations.empty()) continue;
    if (!repair) {
      throw Error(ErrorCode::kTargetInfeasible,
                  name_ + ": " + violations.front().condition + " violated, " + violations.front().detail);
    }
    targets_[g] = repairTargetP(targets_[g], t, self_);
  }
  bindTargets();
}

void PairwiseTool::calculate(const Dataset& d) {
  for (auto& s : states_) s.build(d);
  calculated_ = true;
}

std::vector<double> PairwiseTool::itemErrors() const {
  std::vector<double> out;
  if (!has_target_) return out;
  for (const auto& s : states_) out.push_back(s.error());
  return out;
}

double PairwiseTool::error() const {
  const auto items = itemErrors();
  if (items.empty()) return 0.0;
  return std::accumulate(items.begin(), items.end(), 0.0) / static_cast<double>(items.size());
}

double PairwiseTool::simulate(const EditList& edits) {
  update(edits);
  const double e = error();
  update(invert(edits));
  return e;
}

void PairwiseTool::update(const EditList& edits) {
  for (auto& s : states_) s.apply(edits);
}

double PairwiseTool::recomputeError(const Dataset& d) const {
  if (targets_.empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t g = 0; g < bindings_.size(); ++g) {
    const auto users = static_cast<std::int64_t>(d.table(bindings_[g].userTable).size());
    sum += pairwiseError(targets_[g], computePairwise(d, bindings_[g], self_), users);
  }
  return sum / static_cast<double>(bindings_.size());
}

void PairwiseTool::tweak(Coordinator& coord, ToolHandle self) {
  stats_ = {{"moves", 0}, {"pairs", 0}, {"reownedPosts", 0}, {"appendedPosts", 0}};
  Rng rng(coord.runSeed(self));
  for (std::size_t g = 0; g < bindings_.size(); ++g) tweakBinding(coord, self, g, rng);
}

void PairwiseTool::tweakBinding(Coordinator& coord, ToolHandle self, std::size_t g, Rng& rng) {
  const PairwiseState& st = states_[g];
  const PairwiseDistribution& target = targets_[g];
  const Dataset& d = coord.dataset();
  const std::int64_t n_users = st.users();

  std::vector<TupleId> users;
  for (const Tuple& t : d.table(st.userTable()).rows()) users.push_back(t.id);

  // Target minus current, per unordered class; (0,0) is the zero class.
  std::map<CountPair, std::int64_t> gap;
  for (const auto& [k, v] : unorderedClasses(target.rhoN)) gap[k] += v;
  for (const auto& [k, v] : unorderedClasses(st.histN())) gap[k] -= v;
  gap[{0, 0}] += (zeroPairMass(target, n_users) - st.zeroPairs()) / 2;

  std::set<UserPair> interacting;
  for (const auto& [uw, n] : st.counts()) {
    if (uw.first != uw.second) interacting.insert({std::min(uw.first, uw.second), std::max(uw.first, uw.second)});
  }
  std::map<CountPair, std::vector<UserPair>> members;
  for (const UserPair& p : interacting) {
    members[sortedPair(st.count(p.first, p.second), st.count(p.second, p.first))].push_back(p);
  }
  // Pairs are taken from a class front to back. Pairs whose users keep other
  // interactions go first, so moving them leaves who responds, and whose posts
  // are responded to, unchanged where possible.
  std::unordered_map<TupleId, std::int64_t> out_n;
  std::unordered_map<TupleId, std::int64_t> in_n;
  for (const auto& [uw, n] : st.counts()) {
    if (uw.first == uw.second) continue;
    out_n[uw.first] += n;
    in_n[uw.second] += n;
  }
  auto keeps = [&](const UserPair& p) {
    const std::int64_t ab = st.count(p.first, p.second);
    const std::int64_t ba = st.count(p.second, p.first);
    return (out_n[p.first] > ab ? 1 : 0) + (out_n[p.second] > ba ? 1 : 0) + (in_n[p.first] > ba ? 1 : 0) +
           (in_n[p.second] > ab ? 1 : 0);
  };
  for (auto& [k, list] : members) {
    std::vector<std::pair<int, UserPair>> keyed;
    for (const UserPair& p : list) keyed.emplace_back(keeps(p), p);
    std::stable_sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::size_t i = 0; i < list.size(); ++i) list[i] = keyed[i].second;
  }
  std::map<CountPair, std::size_t> cursor;

  // Idle pairs are drawn uniformly; the ordered walk only serves nearly
  // saturated user sets.
  std::set<UserPair> planned;
  const auto idle = [&](const UserPair& p) { return !interacting.contains(p) && !planned.contains(p); };
  const auto drawIdle = [&]() -> std::optional<UserPair> {
    if (users.size() < 2) return std::nullopt;
    for (int attempt = 0; attempt < 64; ++attempt) {
      const TupleId a = users[uniformBelow(rng, users.size())];
      const TupleId b = users[uniformBelow(rng, users.size())];
      const UserPair p{std::min(a, b), std::max(a, b)};
      if (a != b && idle(p)) return p;
    }
    return std::nullopt;
  };
  std::size_t zi = 0;
  std::size_t zj = 1;
  auto nextIdlePair = [&]() -> std::optional<UserPair> {
    for (; zi < users.size(); ++zi, zj = zi + 1) {
      for (; zj < users.size(); ++zj) {
        const UserPair p{std::min(users[zi], users[zj]), std::max(users[zi], users[zj])};
        if (idle(p)) {
          ++zj;
          return p;
        }
      }
    }
    return std::nullopt;
  };

  // net_out / net_in: planned change in the number of users that respond /
  // are responded to, which the linear features over the response table see.
  std::int64_t net_out = 0;
  std::int64_t net_in = 0;
  struct Option {
    UserPair p;
    CountPair to;
  };
  const auto shift = [&](const Option& o) {
    const std::int64_t dab = o.to.first - st.count(o.p.first, o.p.second);
    const std::int64_t dba = o.to.second - st.count(o.p.second, o.p.first);
    const auto flips = [](std::int64_t before, std::int64_t d) {
      return (before + d > 0 ? 1 : 0) - (before > 0 ? 1 : 0);
    };
    return std::pair{flips(out_n[o.p.first], dab) + flips(out_n[o.p.second], dba),
                     flips(in_n[o.p.second], dab) + flips(in_n[o.p.first], dba)};
  };
  const auto orientations = [&](const UserPair& p, const CountPair& want, std::vector<Option>& out) {
    const std::int64_t a = st.count(p.first, p.second);
    const std::int64_t b = st.count(p.second, p.first);
    const CountPair flipped{want.second, want.first};
    const std::int64_t straight = manhattan({a, b}, want);
    const std::int64_t swapped = manhattan({a, b}, flipped);
    if (straight <= swapped) out.push_back({p, want});
    if (swapped <= straight && flipped != want) out.push_back({p, flipped});
  };

  std::map<CountPair, std::int64_t> surplus;
  for (const auto& [k, v] : gap) {
    if (v < 0) surplus[k] = -v;
  }
  std::map<UserPair, std::int64_t> delta;
  for (const auto& [want, need] : gap) {
    for (std::int64_t unit = 0; unit < need; ++unit) {
      auto best = surplus.end();
      std::int64_t best_dist = 0;
      for (auto it = surplus.begin(); it != surplus.end(); ++it) {
        const std::int64_t dist = manhattan(want, it->first);
        if (best == surplus.end() || dist < best_dist) {
          best = it;
          best_dist = dist;
        }
      }
      if (best == surplus.end()) throw Error(ErrorCode::kTargetInfeasible, name_ + ": pair mass does not balance");
      const CountPair from = best->first;
      std::vector<Option> options;
      std::size_t pos = 0;
      if (from == CountPair{0, 0}) {
        for (std::size_t c = 0; c < kPlanDraws; ++c) {
          if (auto p = drawIdle()) orientations(*p, want, options);
        }
        if (options.empty()) {
          if (auto p = nextIdlePair()) orientations(*p, want, options);
        }
        if (options.empty()) throw Error(ErrorCode::kTargetInfeasible, name_ + ": ran out of idle user pairs");
      } else {
        auto& list = members[from];
        pos = cursor[from];
        for (std::size_t c = pos; c < list.size() && c < pos + kPlanDraws; ++c) orientations(list[c], want, options);
      }
      // Keep the planned change in responders and responded-to users small.
      std::size_t pick = 0;
      std::int64_t pick_cost = 0;
      for (std::size_t o = 0; o < options.size(); ++o) {
        const auto [d_out, d_in] = shift(options[o]);
        const std::int64_t c = std::llabs(net_out + d_out) + std::llabs(net_in + d_in);
        if (o == 0 || c < pick_cost) {
          pick = o;
          pick_cost = c;
        }
      }
      const Option chosen = options[pick];
      const UserPair p = chosen.p;
      if (from == CountPair{0, 0}) {
        planned.insert(p);
      } else {
        auto& list = members[from];
        std::swap(list[pos], *std::find(list.begin() + static_cast<std::ptrdiff_t>(pos), list.end(), p));
        ++cursor[from];
      }
      const auto [d_out, d_in] = shift(chosen);
      net_out += d_out;
      net_in += d_in;
      const std::int64_t a = st.count(p.first, p.second);
      const std::int64_t b = st.count(p.second, p.first);
      out_n[p.first] += chosen.to.first - a;
      in_n[p.second] += chosen.to.first - a;
      out_n[p.second] += chosen.to.second - b;
      in_n[p.first] += chosen.to.second - b;
      delta[p] += chosen.to.first - a;
      delta[{p.second, p.first}] += chosen.to.second - b;
      ++stats_["pairs"];
      if (--best->second == 0) surplus.erase(best);
    }
  }

  if (self_) {
    std::map<std::int64_t, std::int64_t> gap_s;
    for (const auto& [x, v] : target.rhoS) gap_s[x] += v;
    for (const auto& [x, v] : st.histS()) gap_s[x] -= v;
    gap_s[0] += zeroSelfMass(target, n_users) - st.zeroSelf();
    std::map<std::int64_t, std::vector<TupleId>> by_self;
    for (TupleId u : users) by_self[st.count(u, u)].push_back(u);
    std::map<std::int64_t, std::size_t> used;
    std::map<std::int64_t, std::int64_t> spare;
    for (const auto& [x, v] : gap_s) {
      if (v < 0) spare[x] = -v;
    }
    for (const auto& [want, need] : gap_s) {
      for (std::int64_t unit = 0; unit < need; ++unit) {
        auto best = spare.end();
        for (auto it = spare.begin(); it != spare.end(); ++it) {
          if (best == spare.end() || std::llabs(it->first - want) < std::llabs(best->first - want)) best = it;
        }
        if (best == spare.end()) throw Error(ErrorCode::kTargetInfeasible, name_ + ": self mass does not balance");
        const TupleId u = by_self[best->first][used[best->first]++];
        delta[{u, u}] += want - best->first;
        if (--best->second == 0) spare.erase(best);
      }
    }
  }

  std::vector<UserPair> removals;
  std::vector<UserPair> additions;
  for (const auto& [uw, n] : delta) {
    for (std::int64_t i = 0; i < -n; ++i) removals.push_back(uw);
    for (std::int64_t i = 0; i < n; ++i) additions.push_back(uw);
  }
  if (removals.size() != additions.size()) {
    throw Error(ErrorCode::kTargetInfeasible, name_ + ": response total of " + st.binding().responseTable +
                                                  " not preserved");
  }

  std::set<TupleId> owners;
  for (const UserPair& uw : additions) owners.insert(uw.second);
  for (TupleId w : owners) ensurePost(coord, self, g, w, rng);

  const TableId rt = st.responseTable();
  const Table& posts = d.table(st.postTable());
  const auto owned = postsByOwner(d, st.postTable(), st.ownerColumn());
  const std::set<UserPair> losing(removals.begin(), removals.end());
  std::map<UserPair, std::vector<TupleId>> holders;
  for (const Tuple& r : d.table(rt).rows()) {
    auto u = asInt(r.cells[st.userColumn()]);
    auto p = asInt(r.cells[st.postColumn()]);
    if (!u || !p) continue;
    const Tuple* post = posts.find(*p);
    if (post == nullptr) continue;
    auto w = asInt(post->cells[st.ownerColumn()]);
    if (w && losing.contains({*u, *w})) holders[{*u, *w}].push_back(r.id);
  }

  // Any matching of removals to additions yields the same pairwise counts,
  // so each submission offers several removals for the next addition, the
  // ones keeping the responder or the post owner first.
  auto postChoices = [&](TupleId w2) {
    const auto& choice = owned.at(w2);
    std::vector<TupleId> out;
    std::vector<TupleId> responded;
    for (TupleId q : choice) {
      if (st.responded(q)) responded.push_back(q);
    }
    if (!responded.empty()) out.push_back(responded[uniformBelow(rng, responded.size())]);
    const TupleId any = choice[uniformBelow(rng, choice.size())];
    if (out.empty() || out.front() != any) out.push_back(any);
    return out;
  };
  while (!additions.empty()) {
    const auto [u2, w2] = additions.back();
    std::vector<std::size_t> order(removals.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    auto score = [&](std::size_t r) { return (removals[r].first == u2 ? 2 : 0) + (removals[r].second == w2 ? 1 : 0); };
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return score(a) > score(b); });

    struct Choice {
      std::size_t removal;
      TupleId rid;
    };
    std::vector<Batch> candidates;
    std::vector<Choice> chosen_by;
    std::set<UserPair> seen;
    for (std::size_t r : order) {
      if (seen.size() >= kCandidates) break;
      if (!seen.insert(removals[r]).second) continue;
      const auto [u, w] = removals[r];
      const auto& pool = holders[removals[r]];
      const std::vector<TupleId> posts_for = w == w2 ? std::vector<TupleId>{} : postChoices(w2);
      for (std::size_t c = 0; c < pool.size() && c < 2; ++c) {
        for (std::size_t k = 0; k < std::max<std::size_t>(posts_for.size(), 1); ++k) {
          std::vector<std::size_t> cols;
          std::vector<Cell> values;
          if (u != u2) {
            cols.push_back(st.userColumn());
            values.emplace_back(u2);
          }
          if (w != w2) {
            cols.push_back(st.postColumn());
            values.emplace_back(posts_for[k]);
          }
          candidates.push_back(Batch{DeleteValues{rt, {pool[c]}, cols}, InsertValues{rt, {pool[c]}, cols, values}});
          chosen_by.push_back({r, pool[c]});
        }
      }
    }
    const Choice pick = chosen_by.at(coord.submit(self, candidates));
    auto& pool = holders[removals[pick.removal]];
    pool.erase(std::find(pool.begin(), pool.end(), pick.rid));
    removals.erase(removals.begin() + static_cast<std::ptrdiff_t>(pick.removal));
    additions.pop_back();
    ++stats_["moves"];
  }
  if (states_[g].error() > 0.0) {
    throw Error(ErrorCode::kTargetInfeasible, name_ + ": " + st.binding().responseTable + " did not reach its target");
  }
}

void PairwiseTool::ensurePost(Coordinator& coord, ToolHandle self, std::size_t g, TupleId owner, Rng& rng) {
  const PairwiseState& st = states_[g];
  const Dataset& d = coord.dataset();
  const TableId pt = st.postTable();
  const auto owned = postsByOwner(d, pt, st.ownerColumn());
  if (owned.contains(owner)) return;

  // Response tables whose pairwise feature depends on who owns these posts.
  struct Bound {
    TableId table;
    std::size_t postCol;
  };
  std::vector<Bound> bound;
  for (const auto& b : schema_.pairwiseBindings) {
    if (b.postTable != bindings_[g].postTable || b.postOwnerColumn != bindings_[g].postOwnerColumn) continue;
    const TableId t = schema_.id(b.responseTable);
    const std::size_t col = *schema_.table(b.responseTable).valueColumnIndex(b.responsePostColumn);
    if (std::none_of(bound.begin(), bound.end(), [&](const Bound& x) { return x.table == t && x.postCol == col; })) {
      bound.push_back({t, col});
    }
  }
  if (std::none_of(bound.begin(), bound.end(), [&](const Bound& x) { return x.table == st.responseTable(); })) {
    bound.push_back({st.responseTable(), st.postColumn()});
  }

  std::vector<std::pair<std::int64_t, TupleId>> donor_posts;
  std::map<TupleId, TupleId> owner_of;
  std::map<TupleId, std::vector<std::pair<std::size_t, TupleId>>> responses_on;  // post -> (bound idx, response)
  for (const auto& [v, ps] : owned) {
    if (ps.size() < 2) continue;
    for (TupleId p : ps) owner_of[p] = v;
  }
  if (!owner_of.empty()) {
    for (std::size_t bi = 0; bi < bound.size(); ++bi) {
      for (const Tuple& r : d.table(bound[bi].table).rows()) {
        auto p = asInt(r.cells[bound[bi].postCol]);
        if (p && owner_of.contains(*p)) responses_on[*p].emplace_back(bi, r.id);
      }
    }
    for (const auto& [p, v] : owner_of) {
      auto it = responses_on.find(p);
      donor_posts.emplace_back(it == responses_on.end() ? 0 : static_cast<std::int64_t>(it->second.size()), p);
    }
    std::sort(donor_posts.begin(), donor_posts.end());

    std::vector<Batch> candidates;
    for (std::size_t c = 0; c < donor_posts.size() && c < kCandidates; ++c) {
      const TupleId p = donor_posts[c].second;
      const TupleId v = owner_of[p];
      std::vector<TupleId> others;
      for (TupleId q : owned.at(v)) {
        if (q != p) others.push_back(q);
      }
      // (bound idx, new post) -> responses
      std::map<std::pair<std::size_t, TupleId>, std::vector<TupleId>> shifts;
      if (auto it = responses_on.find(p); it != responses_on.end()) {
        for (const auto& [bi, rid] : it->second) shifts[{bi, others[uniformBelow(rng, others.size())]}].push_back(rid);
      }
      Batch batch;
      for (const auto& [key, rids] : shifts) {
        batch.push_back(ReplaceValues{bound[key.first].table, rids, {bound[key.first].postCol}, {Cell{key.second}}});
      }
      batch.push_back(ReplaceValues{pt, {p}, {st.ownerColumn()}, {Cell{owner}}});
      candidates.push_back(std::move(batch));
    }
    coord.submit(self, candidates);
    ++stats_["reownedPosts"];
    return;
  }

  const TableSchema& ps = schema_.tables[pt];
  std::vector<Cell> values;
  const Table& posts = d.table(pt);
  if (!posts.empty()) {
    values = posts.rows()[uniformBelow(rng, posts.size())].cells;
  } else {
    for (std::size_t col = 0; col < ps.valueColumnCount(); ++col) {
      const ColumnSchema& cs = ps.valueColumn(col);
      auto fk = std::find_if(ps.foreignKeys.begin(), ps.foreignKeys.end(),
                             [&](const ForeignKey& k) { return k.column == cs.name; });
      if (fk != ps.foreignKeys.end()) {
        const Table& ref = d.table(fk->references);
        if (ref.empty()) throw Error(ErrorCode::kTargetInfeasible, name_ + ": cannot create a post, " + fk->references + " is empty");
        values.emplace_back(ref.rows().front().id);
      } else if (cs.kind == ColumnKind::kInteger) {
        values.emplace_back(std::int64_t{0});
      } else {
        values.emplace_back(std::string{});
      }
    }
  }
  values[st.ownerColumn()] = Cell{owner};
  std::vector<Batch> candidates{Batch{AppendTuple{pt, std::move(values), 0}}};
  coord.submit(self, candidates);
  ++stats_["appendedPosts"];
}

}  // namespace tweakscale
