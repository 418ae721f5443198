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

#include "tweakscale/pairwise.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "tweakscale/error.hpp"

namespace tweakscale {
namespace {

using Classes = std::map<CountPair, std::int64_t>;
using SelfClasses = std::map<std::int64_t, std::int64_t>;

template <typename Map>
std::int64_t mass(const Map& m) {
  std::int64_t s = 0;
  for (const auto& [k, v] : m) s += v;
  return s;
}

template <typename Map>
typename Map::iterator heaviest(Map& m) {
  auto best = m.end();
  for (auto it = m.begin(); it != m.end(); ++it) {
    if (best == m.end() || it->second > best->second) best = it;
  }
  return best;
}

template <typename Map>
void shift(Map& m, typename Map::iterator from, const typename Map::key_type& to, std::int64_t k, bool keep_to) {
  if ((from->second -= k) == 0) m.erase(from);
  if (keep_to) m[to] += k;
}

std::int64_t width(const CountPair& k) { return k.first + k.second; }
std::int64_t width(std::int64_t x) { return x; }

// Class with the most responses per unit among those wider than `floor`.
template <typename Map>
typename Map::iterator widest(Map& m, std::int64_t floor) {
  auto best = m.end();
  for (auto it = m.begin(); it != m.end(); ++it) {
    if (width(it->first) > floor && (best == m.end() || width(it->first) > width(best->first))) best = it;
  }
  return best;
}

// Multiplies every count by `f`, largest-remainder rounding to the rounded
// total.
template <typename Map>
void rescale(Map& m, double f) {
  const auto goal = static_cast<std::int64_t>(std::llround(f * static_cast<double>(mass(m))));
  std::vector<std::pair<double, typename Map::key_type>> rest;
  Map out;
  std::int64_t floors = 0;
  for (const auto& [k, v] : m) {
    const double exact = f * static_cast<double>(v);
    const auto fl = static_cast<std::int64_t>(std::floor(exact));
    if (fl > 0) out[k] = fl;
    floors += fl;
    rest.emplace_back(exact - static_cast<double>(fl), k);
  }
  std::stable_sort(rest.begin(), rest.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t r = 0; floors < goal && r < rest.size(); ++r, ++floors) ++out[rest[r].second];
  m = std::move(out);
}

CountPair sorted(std::int64_t a, std::int64_t b) { return a <= b ? CountPair{a, b} : CountPair{b, a}; }

std::int64_t responsesOf(const Classes& un, const SelfClasses& s) {
  std::int64_t t = 0;
  for (const auto& [k, v] : un) t += (k.first + k.second) * v;
  for (const auto& [x, v] : s) t += x * v;
  return t;
}

// Merges pairs of units until at most `cap` remain; each merge keeps the
// response total.
void mergeDown(Classes& un, std::int64_t cap) {
  while (mass(un) > cap) {
    const std::int64_t excess = mass(un) - cap;
    auto a = heaviest(un);
    const CountPair ka = a->first;
    if (a->second >= 2) {
      const std::int64_t k = std::min(excess, a->second / 2);
      shift(un, a, CountPair{}, 2 * k, false);
      un[{2 * ka.first, 2 * ka.second}] += k;
      continue;
    }
    shift(un, a, CountPair{}, 1, false);
    auto b = heaviest(un);
    const CountPair kb = b->first;
    shift(un, b, CountPair{}, 1, false);
    ++un[sorted(ka.first + kb.first, ka.second + kb.second)];
  }
}

void mergeDown(SelfClasses& s, std::int64_t cap) {
  while (mass(s) > cap) {
    const std::int64_t excess = mass(s) - cap;
    auto a = heaviest(s);
    const std::int64_t xa = a->first;
    if (a->second >= 2) {
      const std::int64_t k = std::min(excess, a->second / 2);
      shift(s, a, 0, 2 * k, false);
      s[2 * xa] += k;
      continue;
    }
    shift(s, a, 0, 1, false);
    auto b = heaviest(s);
    const std::int64_t xb = b->first;
    shift(s, b, 0, 1, false);
    ++s[xa + xb];
  }
}

Classes toOrdered(const Classes& un) {
  Classes out;
  for (const auto& [k, v] : un) {
    if (k.first == k.second) {
      out[k] += 2 * v;
    } else {
      out[k] += v;
      out[{k.second, k.first}] += v;
    }
  }
  return out;
}

std::string pairName(const CountPair& k) {
  return "(" + std::to_string(k.first) + "," + std::to_string(k.second) + ")";
}

}  // namespace

PairwiseTotals pairwiseTotals(const PairwiseBinding& b, const SizeTarget& sizes) {
  auto size = [&](const std::string& t) {
    auto it = sizes.find(t);
    if (it == sizes.end()) throw Error(ErrorCode::kSpecMismatch, "no size for table " + t);
    return static_cast<std::int64_t>(it->second);
  };
  return {size(b.userTable), size(b.responseTable)};
}

std::int64_t countSelfResponses(const Dataset& d, const PairwiseBinding& b) {
  const auto& post_schema = d.schema().table(b.postTable);
  const auto& resp_schema = d.schema().table(b.responseTable);
  const std::size_t owner_col = *post_schema.valueColumnIndex(b.postOwnerColumn);
  const std::size_t post_col = *resp_schema.valueColumnIndex(b.responsePostColumn);
  const std::size_t user_col = *resp_schema.valueColumnIndex(b.responseUserColumn);
  const Table& posts = d.table(b.postTable);
  std::int64_t n = 0;
  for (const Tuple& r : d.table(b.responseTable).rows()) {
    auto p = asInt(r.cells[post_col]);
    auto u = asInt(r.cells[user_col]);
    if (!p || !u) continue;
    const Tuple* post = posts.find(*p);
    if (post != nullptr && asInt(post->cells[owner_col]) == u) ++n;
  }
  return n;
}

std::int64_t zeroPairMass(const PairwiseDistribution& dist, std::int64_t users) {
  return dist.rhoN00.value_or(users * (users - 1) - mass(dist.rhoN));
}

std::int64_t zeroSelfMass(const PairwiseDistribution& dist, std::int64_t users) {
  return dist.rhoS0.value_or(users - mass(dist.rhoS));
}

PairwiseDistribution computePairwise(const Dataset& d, const PairwiseBinding& b, bool self_responses) {
  PairwiseState state(d.schema(), b, self_responses);
  state.build(d);
  return state.distribution();
}

std::vector<Violation> checkNecessityP(const PairwiseDistribution& target, const PairwiseTotals& totals,
                                       bool self_responses) {
  std::vector<Violation> out;
  const std::int64_t users = totals.users;
  for (const auto& [k, v] : target.rhoN) {
    if (k.first < 0 || k.second < 0 || v < 0) out.push_back({"P-nonneg", "negative entry at " + pairName(k)});
    if (k == CountPair{0, 0}) out.push_back({"shape", "the (0,0) class belongs in the zero mass"});
    auto mirror = target.rhoN.find({k.second, k.first});
    const std::int64_t other = mirror == target.rhoN.end() ? 0 : mirror->second;
    if (k.first < k.second && other != v) {
      out.push_back({"P1", pairName(k) + " has " + std::to_string(v) + " pairs but its mirror has " +
                               std::to_string(other)});
    }
    if (k.first > k.second && mirror == target.rhoN.end() && v != 0) {
      out.push_back({"P1", pairName(k) + " has no mirror entry"});
    }
    if (k.first == k.second && v % 2 != 0) out.push_back({"P-diag", pairName(k) + " has an odd count"});
  }
  for (const auto& [x, v] : target.rhoS) {
    if (x <= 0 || v < 0) out.push_back({"P-nonneg", "invalid self entry at " + std::to_string(x)});
  }
  if (!self_responses && (!target.rhoS.empty() || target.rhoS0.value_or(0) != 0)) {
    out.push_back({"SP-off", "self-response classes given while self responses are not modelled"});
  }

  std::int64_t weighted = 0;
  for (const auto& [k, v] : target.rhoN) weighted += (k.first + k.second) * v;
  for (const auto& [x, v] : target.rhoS) weighted += 2 * x * v;
  if (weighted != 2 * totals.responses) {
    out.push_back({"P2", "classes account for " + std::to_string(weighted) + " response endpoints, expected " +
                             std::to_string(2 * totals.responses)});
  }
  const std::int64_t pairs = users * (users - 1);
  const std::int64_t zero = zeroPairMass(target, users);
  if (zero < 0 || mass(target.rhoN) + zero != pairs) {
    out.push_back({"P3", "pair mass differs from " + std::to_string(pairs)});
  }
  if (self_responses) {
    const std::int64_t zs = zeroSelfMass(target, users);
    if (zs < 0 || mass(target.rhoS) + zs != users) {
      out.push_back({"SP2", "self mass differs from " + std::to_string(users)});
    }
  }
  return out;
}

PairwiseDistribution repairTargetP(const PairwiseDistribution& raw, const PairwiseTotals& totals,
                                   bool self_responses) {
  if (checkNecessityP(raw, totals, self_responses).empty()) {
    PairwiseDistribution out = raw;
    out.rhoN00 = zeroPairMass(raw, totals.users);
    if (self_responses) out.rhoS0 = zeroSelfMass(raw, totals.users);
    return out;
  }
  const std::int64_t users = totals.users;
  const std::int64_t responses = totals.responses;
  if (responses > 0 && (users == 0 || (users == 1 && !self_responses))) {
    throw Error(ErrorCode::kInfeasibleRepair, "responses cannot be placed on " + std::to_string(users) + " users");
  }
  const std::int64_t cap = users * (users - 1) / 2;

  // Unordered classes, symmetrised with alternating rounding of odd sums.
  Classes un;
  bool up = true;
  auto at = [&](const CountPair& k) {
    auto it = raw.rhoN.find(k);
    return it == raw.rhoN.end() ? 0 : std::max<std::int64_t>(it->second, 0);
  };
  std::set<CountPair> keys;
  for (const auto& [k, v] : raw.rhoN) {
    if (k.first >= 0 && k.second >= 0 && k != CountPair{0, 0}) keys.insert(sorted(k.first, k.second));
  }
  for (const CountPair& k : keys) {
    const std::int64_t sum = k.first == k.second ? at(k) : at(k) + at({k.second, k.first});
    std::int64_t half = sum / 2;
    if (sum % 2 != 0) {
      half += up ? 1 : 0;
      up = !up;
    }
    if (half > 0) un[k] = half;
  }
  SelfClasses s;
  if (self_responses) {
    for (const auto& [x, v] : raw.rhoS) {
      if (x > 0 && v > 0) s[x] = v;
    }
  }
  if (cap == 0) un.clear();
  mergeDown(un, cap);
  mergeDown(s, self_responses ? users : 0);

  std::int64_t have = responsesOf(un, s);
  if (have > 0 && have != responses) {
    const double f = static_cast<double>(responses) / static_cast<double>(have);
    rescale(un, f);
    rescale(s, f);
    mergeDown(un, cap);
    mergeDown(s, self_responses ? users : 0);
    have = responsesOf(un, s);
  }
  // Residual responses go on or come off the widest classes, so that the
  // number of interacting pairs stays put where possible.
  while (have < responses) {
    const std::int64_t need = responses - have;
    if (cap > 0) {
      auto src = widest(un, 0);
      if (src == un.end()) {
        un[{0, 1}] += std::min(need, cap);
      } else {
        const CountPair k = src->first;
        shift(un, src, CountPair{k.first, k.second + 1}, std::min(need, src->second), true);
      }
    } else {
      auto src = widest(s, 0);
      if (src == s.end()) {
        s[1] += std::min(need, users);
      } else {
        shift(s, src, src->first + 1, std::min(need, src->second), true);
      }
    }
    have = responsesOf(un, s);
  }
  while (have > responses) {
    const std::int64_t excess = have - responses;
    auto src = widest(un, 1);
    if (src == un.end()) src = heaviest(un);
    auto ss = widest(s, 1);
    if (src != un.end() && (ss == s.end() || width(src->first) > 1)) {
      const CountPair k = src->first;
      const CountPair to = sorted(k.first, k.second - 1);
      shift(un, src, to, std::min(excess, src->second), to != CountPair{0, 0});
    } else {
      if (ss == s.end()) ss = heaviest(s);
      const std::int64_t x = ss->first;
      shift(s, ss, x - 1, std::min(excess, ss->second), x > 1);
    }
    have = responsesOf(un, s);
  }

  PairwiseDistribution out;
  out.binding = raw.binding;
  out.rhoN = toOrdered(un);
  out.rhoN00 = users * (users - 1) - mass(out.rhoN);
  if (self_responses) {
    out.rhoS = std::move(s);
    out.rhoS0 = users - mass(out.rhoS);
  }
  return out;
}

PairwiseDistribution generateTargetP(const PairwiseDistribution& orig, std::int64_t orig_users,
                                     const PairwiseTotals& new_totals, bool self_responses) {
  PairwiseDistribution scaled;
  scaled.binding = orig.binding;
  const std::int64_t u0 = orig_users;
  const std::int64_t u1 = new_totals.users;
  if (u0 > 1) {
    const double r = static_cast<double>(u1 * (u1 - 1)) / static_cast<double>(u0 * (u0 - 1));
    for (const auto& [k, v] : orig.rhoN) {
      if (k.first > k.second) continue;
      if (k.first == k.second) {
        const auto c = 2 * std::llround(static_cast<double>(v / 2) * r);
        if (c > 0) scaled.rhoN[k] = c;
      } else {
        const auto c = std::llround(static_cast<double>(v) * r);
        if (c > 0) {
          scaled.rhoN[k] = c;
          scaled.rhoN[{k.second, k.first}] = c;
        }
      }
    }
  }
  if (self_responses && u0 > 0) {
    const double r = static_cast<double>(u1) / static_cast<double>(u0);
    for (const auto& [x, v] : orig.rhoS) {
      const auto c = std::llround(static_cast<double>(v) * r);
      if (c > 0) scaled.rhoS[x] = c;
    }
  }
  return repairTargetP(scaled, new_totals, self_responses);
}

double pairwiseError(const PairwiseDistribution& target, const PairwiseDistribution& actual, std::int64_t users) {
  if (!(target.binding == actual.binding)) {
    throw Error(ErrorCode::kBindingMismatch, "pairwise distributions of different bindings");
  }
  auto diff = [](const auto& a, const auto& b) {
    std::int64_t total = 0;
    for (const auto& [k, v] : a) {
      auto it = b.find(k);
      total += std::llabs(v - (it == b.end() ? 0 : it->second));
    }
    for (const auto& [k, v] : b) {
      if (!a.contains(k)) total += std::llabs(v);
    }
    return total;
  };
  const std::int64_t pairs = users * (users - 1);
  double e_n = 0.0;
  if (pairs > 0) {
    const std::int64_t d = diff(actual.rhoN, target.rhoN) +
                           std::llabs(zeroPairMass(actual, users) - zeroPairMass(target, users));
    e_n = static_cast<double>(d) / static_cast<double>(pairs);
  }
  double e_s = 0.0;
  if (users > 0) {
    const std::int64_t d = diff(actual.rhoS, target.rhoS) +
                           std::llabs(zeroSelfMass(actual, users) - zeroSelfMass(target, users));
    e_s = static_cast<double>(d) / static_cast<double>(users);
  }
  return std::max(e_n, e_s);
}

PairwiseState::PairwiseState(const DatasetSchema& schema, PairwiseBinding binding, bool self_responses)
    : binding_(std::move(binding)), self_(self_responses) {
  auto column = [&](const std::string& table, const std::string& col) {
    auto idx = schema.table(table).valueColumnIndex(col);
    if (!idx) throw Error(ErrorCode::kBindingMismatch, table + " has no column " + col);
    return *idx;
  };
  user_table_ = schema.id(binding_.userTable);
  post_table_ = schema.id(binding_.postTable);
  response_table_ = schema.id(binding_.responseTable);
  owner_col_ = column(binding_.postTable, binding_.postOwnerColumn);
  post_col_ = column(binding_.responseTable, binding_.responsePostColumn);
  user_col_ = column(binding_.responseTable, binding_.responseUserColumn);
}

void PairwiseState::build(const Dataset& d) {
  users_.clear();
  owner_.clear();
  responses_.clear();
  post_resp_.clear();
  c_.clear();
  hist_n_.clear();
  hist_s_.clear();
  sum_n_ = 0;
  sum_s_ = 0;
  recomputeAbs();
  for (const Tuple& t : d.table(user_table_).rows()) users_.emplace(t.id, 0);
  for (const Tuple& t : d.table(post_table_).rows()) owner_[t.id] = asInt(t.cells[owner_col_]).value_or(kNone);
  for (const Tuple& t : d.table(response_table_).rows()) {
    Response r{asInt(t.cells[user_col_]).value_or(kNone), asInt(t.cells[post_col_]).value_or(kNone)};
    responses_[t.id] = r;
    contribute(r.user, r.post, +1);
  }
}

void PairwiseState::setTarget(const PairwiseDistribution* target) {
  target_ = target;
  recomputeAbs();
}

void PairwiseState::recomputeAbs() {
  abs_n_ = 0;
  abs_s_ = 0;
  if (target_ == nullptr) return;
  for (const auto& [k, v] : hist_n_) {
    auto it = target_->rhoN.find(k);
    abs_n_ += std::llabs(v - (it == target_->rhoN.end() ? 0 : it->second));
  }
  for (const auto& [k, v] : target_->rhoN) {
    if (!hist_n_.contains(k)) abs_n_ += std::llabs(v);
  }
  for (const auto& [x, v] : hist_s_) {
    auto it = target_->rhoS.find(x);
    abs_s_ += std::llabs(v - (it == target_->rhoS.end() ? 0 : it->second));
  }
  for (const auto& [x, v] : target_->rhoS) {
    if (!hist_s_.contains(x)) abs_s_ += std::llabs(v);
  }
}

void PairwiseState::bumpN(const CountPair& k, std::int64_t delta) {
  std::int64_t want = 0;
  if (target_ != nullptr) {
    auto t = target_->rhoN.find(k);
    if (t != target_->rhoN.end()) want = t->second;
  }
  auto it = hist_n_.try_emplace(k, 0).first;
  const std::int64_t before = it->second;
  it->second += delta;
  abs_n_ += std::llabs(it->second - want) - std::llabs(before - want);
  sum_n_ += delta;
  if (it->second == 0) hist_n_.erase(it);
}

void PairwiseState::bumpS(std::int64_t x, std::int64_t delta) {
  std::int64_t want = 0;
  if (target_ != nullptr) {
    auto t = target_->rhoS.find(x);
    if (t != target_->rhoS.end()) want = t->second;
  }
  auto it = hist_s_.try_emplace(x, 0).first;
  const std::int64_t before = it->second;
  it->second += delta;
  abs_s_ += std::llabs(it->second - want) - std::llabs(before - want);
  sum_s_ += delta;
  if (it->second == 0) hist_s_.erase(it);
}

std::int64_t PairwiseState::count(TupleId u, TupleId w) const {
  auto it = c_.find({u, w});
  return it == c_.end() ? 0 : it->second;
}

void PairwiseState::moveCount(TupleId u, TupleId w, std::int64_t delta) {
  const std::int64_t a = count(u, w);
  const std::int64_t after = a + delta;
  if (after == 0) {
    c_.erase({u, w});
  } else {
    c_[{u, w}] = after;
  }
  if (u == w) {
    if (!self_) return;
    if (a > 0) bumpS(a, -1);
    if (after > 0) bumpS(after, +1);
    return;
  }
  const std::int64_t b = count(w, u);
  if (a != 0 || b != 0) {
    bumpN({a, b}, -1);
    bumpN({b, a}, -1);
  }
  if (after != 0 || b != 0) {
    bumpN({after, b}, +1);
    bumpN({b, after}, +1);
  }
}

void PairwiseState::contribute(TupleId u, TupleId post, std::int64_t delta) {
  if (u == kNone || post == kNone) return;
  auto& per_user = post_resp_[post];
  if ((per_user[u] += delta) == 0) per_user.erase(u);
  if (per_user.empty()) post_resp_.erase(post);
  auto it = owner_.find(post);
  if (it == owner_.end() || it->second == kNone) return;
  moveCount(u, it->second, delta);
}

void PairwiseState::applyOne(const CellEdit& e) {
  using Kind = CellEdit::Kind;
  if (e.table == user_table_) {
    if (e.kind == Kind::kAppend) users_.emplace(e.tuple, 0);
    if (e.kind == Kind::kRemove) users_.erase(e.tuple);
  }
  if (e.table == post_table_) {
    auto reown = [&](TupleId post, TupleId to) {
      TupleId& slot = owner_[post];
      auto rs = post_resp_.find(post);
      if (rs != post_resp_.end()) {
        for (const auto& [u, n] : rs->second) {
          if (slot != kNone) moveCount(u, slot, -n);
          if (to != kNone) moveCount(u, to, +n);
        }
      }
      slot = to;
    };
    switch (e.kind) {
      case Kind::kSet:
        if (e.column == owner_col_) reown(e.tuple, asInt(e.after).value_or(kNone));
        break;
      case Kind::kAppend:
        owner_[e.tuple] = kNone;
        reown(e.tuple, asInt(e.cells[owner_col_]).value_or(kNone));
        break;
      case Kind::kRemove:
        reown(e.tuple, kNone);
        owner_.erase(e.tuple);
        break;
    }
  }
  if (e.table == response_table_) {
    switch (e.kind) {
      case Kind::kSet: {
        if (e.column != user_col_ && e.column != post_col_) break;
        Response& r = responses_.at(e.tuple);
        contribute(r.user, r.post, -1);
        (e.column == user_col_ ? r.user : r.post) = asInt(e.after).value_or(kNone);
        contribute(r.user, r.post, +1);
        break;
      }
      case Kind::kAppend: {
        Response r{asInt(e.cells[user_col_]).value_or(kNone), asInt(e.cells[post_col_]).value_or(kNone)};
        responses_[e.tuple] = r;
        contribute(r.user, r.post, +1);
        break;
      }
      case Kind::kRemove: {
        auto it = responses_.find(e.tuple);
        contribute(it->second.user, it->second.post, -1);
        responses_.erase(it);
        break;
      }
    }
  }
}

void PairwiseState::apply(const EditList& edits) {
  for (const CellEdit& e : edits) applyOne(e);
}

std::int64_t PairwiseState::zeroPairs() const { return users() * (users() - 1) - sum_n_; }

std::int64_t PairwiseState::zeroSelf() const { return users() - sum_s_; }

PairwiseDistribution PairwiseState::distribution() const {
  PairwiseDistribution out;
  out.binding = binding_;
  out.rhoN = hist_n_;
  out.rhoN00 = zeroPairs();
  if (self_) {
    out.rhoS = hist_s_;
    out.rhoS0 = zeroSelf();
  }
  return out;
}

double PairwiseState::error() const {
  if (target_ == nullptr) return 0.0;
  const std::int64_t u = users();
  const std::int64_t pairs = u * (u - 1);
  double e_n = 0.0;
  if (pairs > 0) {
    const std::int64_t d = abs_n_ + std::llabs(zeroPairs() - zeroPairMass(*target_, u));
    e_n = static_cast<double>(d) / static_cast<double>(pairs);
  }
  double e_s = 0.0;
  if (self_ && u > 0) {
    const std::int64_t d = abs_s_ + std::llabs(zeroSelf() - zeroSelfMass(*target_, u));
    e_s = static_cast<double>(d) / static_cast<double>(u);
  }
  return std::max(e_n, e_s);
}

}  // namespace tweakscale
