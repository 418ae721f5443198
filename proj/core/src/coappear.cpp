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

#include "tweakscale/coappear.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "tweakscale/error.hpp"

namespace tweakscale {
namespace {

constexpr std::int64_t kMissing = std::numeric_limits<std::int64_t>::min();

bool isZero(const CoappearVector& v) {
  return std::all_of(v.begin(), v.end(), [](std::int64_t x) { return x == 0; });
}

bool complete(const Combination& c) {
  return std::none_of(c.begin(), c.end(), [](std::int64_t x) { return x == kMissing; });
}

std::vector<std::int64_t> marginals(const std::map<CoappearVector, std::int64_t>& counts, std::size_t k) {
  std::vector<std::int64_t> m(k, 0);
  for (const auto& [v, n] : counts) {
    for (std::size_t i = 0; i < k && i < v.size(); ++i) m[i] += v[i] * n;
  }
  return m;
}

std::int64_t total(const std::map<CoappearVector, std::int64_t>& counts) {
  std::int64_t s = 0;
  for (const auto& [v, n] : counts) s += n;
  return s;
}

// Vector with the largest count among those accepted by `ok`; ties go to
// the lexicographically smallest. Returns end() if none.
template <typename Pred>
std::map<CoappearVector, std::int64_t>::iterator heaviest(std::map<CoappearVector, std::int64_t>& counts, Pred ok) {
  auto best = counts.end();
  for (auto it = counts.begin(); it != counts.end(); ++it) {
    if (it->second > 0 && ok(it->first) && (best == counts.end() || it->second > best->second)) best = it;
  }
  return best;
}

// Class with the largest entry at `i` among those with an entry above `floor`.
std::map<CoappearVector, std::int64_t>::iterator widest(std::map<CoappearVector, std::int64_t>& counts, std::size_t i,
                                                        std::int64_t floor) {
  auto best = counts.end();
  for (auto it = counts.begin(); it != counts.end(); ++it) {
    if (it->second > 0 && it->first[i] > floor && (best == counts.end() || it->first[i] > best->first[i])) best = it;
  }
  return best;
}

void take(std::map<CoappearVector, std::int64_t>& counts, std::map<CoappearVector, std::int64_t>::iterator it) {
  if (--it->second == 0) counts.erase(it);
}

}  // namespace

std::size_t CombinationHash::operator()(const std::vector<std::int64_t>& v) const noexcept {
  std::uint64_t h = 0x9e3779b97f4a7c15ULL;
  for (std::int64_t x : v) {
    h ^= static_cast<std::uint64_t>(x) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return static_cast<std::size_t>(h);
}

std::vector<CoappearGroup> detectCoappearGroups(const DatasetSchema& schema) {
  std::map<std::vector<std::string>, std::vector<std::string>> by_set;
  for (const auto& t : schema.tables) {
    if (t.foreignKeys.empty()) continue;
    std::set<std::string> refs;
    for (const auto& fk : t.foreignKeys) refs.insert(fk.references);
    if (refs.size() != t.foreignKeys.size()) continue;  // two keys into one table
    by_set[std::vector<std::string>(refs.begin(), refs.end())].push_back(t.name);
  }
  std::vector<CoappearGroup> groups;
  for (auto& [refs, tables] : by_set) {
    CoappearGroup g;
    std::sort(tables.begin(), tables.end());
    g.referencing = tables;
    g.referenced = refs;
    for (const auto& name : tables) {
      std::vector<std::string> cols;
      for (const auto& r : refs) {
        for (const auto& fk : schema.table(name).foreignKeys) {
          if (fk.references == r) cols.push_back(fk.column);
        }
      }
      g.fkColumns.push_back(std::move(cols));
    }
    groups.push_back(std::move(g));
  }
  std::sort(groups.begin(), groups.end(), [](const auto& a, const auto& b) {
    return std::tie(a.referencing, a.referenced) < std::tie(b.referencing, b.referenced);
  });
  return groups;
}

std::int64_t combinationCount(const CoappearGroup& g, const SizeTarget& sizes) {
  std::int64_t n = 1;
  for (const auto& r : g.referenced) {
    auto it = sizes.find(r);
    if (it == sizes.end()) throw Error(ErrorCode::kSpecMismatch, "no size for referenced table " + r);
    n *= static_cast<std::int64_t>(it->second);
  }
  return n;
}

std::int64_t zeroMassOf(const CoappearDistribution& dist, std::int64_t n_fk) {
  return dist.zeroMass.value_or(n_fk - total(dist.counts));
}

CoappearDistribution computeCoappear(const Dataset& d, const CoappearGroup& g) {
  CoappearState state(d.schema(), g);
  state.build(d);
  return state.distribution();
}

std::vector<Violation> checkNecessityC(const CoappearDistribution& target, const SizeTarget& sizes) {
  const CoappearGroup& g = target.group;
  const std::size_t k = g.referencing.size();
  std::vector<Violation> out;
  for (const auto& [v, n] : target.counts) {
    if (v.size() != k) {
      out.push_back({"shape", "vector of length " + std::to_string(v.size()) + " in a group of " + std::to_string(k)});
      return out;
    }
    if (n < 0 || std::any_of(v.begin(), v.end(), [](std::int64_t x) { return x < 0; })) {
      out.push_back({"C-nonneg", "negative count or vector entry"});
    }
  }
  const auto m = marginals(target.counts, k);
  for (std::size_t i = 0; i < k; ++i) {
    auto it = sizes.find(g.referencing[i]);
    if (it == sizes.end()) throw Error(ErrorCode::kSpecMismatch, "no size for " + g.referencing[i]);
    if (m[i] != static_cast<std::int64_t>(it->second)) {
      out.push_back({"C1", g.referencing[i] + " appears " + std::to_string(m[i]) + " times but has " +
                               std::to_string(it->second) + " tuples"});
    }
  }
  const std::int64_t n_fk = combinationCount(g, sizes);
  const std::int64_t zero = zeroMassOf(target, n_fk);
  if (zero < 0 || total(target.counts) + zero != n_fk) {
    out.push_back({"C2", "total mass " + std::to_string(total(target.counts) + std::max<std::int64_t>(zero, 0)) +
                             " differs from N_FK " + std::to_string(n_fk)});
  }
  return out;
}

namespace {

// `rescale` first brings the counts to the wanted table sizes by a common
// factor; without it only single-unit residual shifts are made.
CoappearDistribution repairCounts(const CoappearDistribution& raw, const SizeTarget& sizes, bool rescale) {
  const CoappearGroup& g = raw.group;
  const std::int64_t n_fk = combinationCount(g, sizes);
  if (checkNecessityC(raw, sizes).empty()) {
    CoappearDistribution out = raw;
    out.zeroMass = zeroMassOf(raw, n_fk);
    return out;
  }
  const std::size_t k = g.referencing.size();
  std::vector<std::int64_t> want(k);
  for (std::size_t i = 0; i < k; ++i) want[i] = static_cast<std::int64_t>(sizes.at(g.referencing[i]));
  const std::int64_t want_total = std::accumulate(want.begin(), want.end(), std::int64_t{0});
  if (want_total > 0 && n_fk == 0) {
    throw Error(ErrorCode::kInfeasibleRepair, "referencing tables are non-empty but a referenced table is empty");
  }

  std::map<CoappearVector, std::int64_t> counts;
  for (const auto& [v, n] : raw.counts) {
    if (n > 0 && v.size() == k && !isZero(v) && std::all_of(v.begin(), v.end(), [](auto x) { return x >= 0; })) {
      counts[v] = n;
    }
  }

  auto have = marginals(counts, k);
  if (have != want) {
    const std::int64_t have_total = std::accumulate(have.begin(), have.end(), std::int64_t{0});
    if (rescale && have_total > 0) {
      // Common factor, largest-remainder rounding of the counts.
      const double f = static_cast<double>(want_total) / static_cast<double>(have_total);
      const auto goal = static_cast<std::int64_t>(std::llround(f * static_cast<double>(total(counts))));
      std::vector<std::pair<double, CoappearVector>> remainders;
      std::map<CoappearVector, std::int64_t> scaled;
      std::int64_t floors = 0;
      for (const auto& [v, n] : counts) {
        const double exact = f * static_cast<double>(n);
        const auto fl = static_cast<std::int64_t>(std::floor(exact));
        if (fl > 0) scaled[v] = fl;
        floors += fl;
        remainders.emplace_back(exact - static_cast<double>(fl), v);
      }
      std::stable_sort(remainders.begin(), remainders.end(),
                       [](const auto& a, const auto& b) { return a.first > b.first; });
      for (std::size_t r = 0; floors < goal && r < remainders.size(); ++r, ++floors) ++scaled[remainders[r].second];
      counts = std::move(scaled);
    }
    // Residual marginals: shift single units along one coordinate, on the
    // combinations with the largest entry there so that no combination
    // gains or loses its last reference unless nothing else is left.
    have = marginals(counts, k);
    for (std::size_t i = 0; i < k; ++i) {
      for (; have[i] < want[i]; ++have[i]) {
        auto src = widest(counts, i, 0);
        if (src == counts.end()) src = heaviest(counts, [](const CoappearVector&) { return true; });
        CoappearVector v(k, 0);
        if (src != counts.end()) {
          v = src->first;
          take(counts, src);
        }
        ++v[i];
        ++counts[v];
      }
      for (; have[i] > want[i]; --have[i]) {
        auto src = widest(counts, i, 1);
        if (src == counts.end()) src = heaviest(counts, [i](const CoappearVector& v) { return v[i] > 0; });
        CoappearVector v = src->first;
        take(counts, src);
        --v[i];
        if (!isZero(v)) ++counts[v];
      }
    }
  }
  // Too many non-zero combinations for N_FK: merge pairs of them.
  while (total(counts) > n_fk) {
    auto a = heaviest(counts, [](const CoappearVector&) { return true; });
    CoappearVector v = a->first;
    take(counts, a);
    auto b = heaviest(counts, [](const CoappearVector&) { return true; });
    CoappearVector w = b->first;
    take(counts, b);
    for (std::size_t i = 0; i < k; ++i) v[i] += w[i];
    ++counts[v];
  }
  CoappearDistribution out;
  out.group = g;
  out.counts = std::move(counts);
  out.zeroMass = n_fk - total(out.counts);
  return out;
}

}  // namespace

CoappearDistribution repairTargetC(const CoappearDistribution& raw, const SizeTarget& sizes) {
  return repairCounts(raw, sizes, true);
}

CoappearDistribution generateTargetC(const CoappearDistribution& orig, const SizeTarget& orig_sizes,
                                     const SizeTarget& new_sizes) {
  std::int64_t before = 0;
  std::int64_t after = 0;
  for (const auto& t : orig.group.referencing) {
    before += static_cast<std::int64_t>(orig_sizes.at(t));
    after += static_cast<std::int64_t>(new_sizes.at(t));
  }
  CoappearDistribution scaled;
  scaled.group = orig.group;
  if (before > 0) {
    const double f = static_cast<double>(after) / static_cast<double>(before);
    for (const auto& [v, n] : orig.counts) {
      const auto c = std::llround(static_cast<double>(n) * f);
      if (c > 0) scaled.counts[v] = c;
    }
  }
  return repairCounts(scaled, new_sizes, false);
}

double coappearError(const CoappearDistribution& target, const CoappearDistribution& actual) {
  if (!(target.group == actual.group)) throw Error(ErrorCode::kGroupMismatch, "coappear distributions of different groups");
  const std::int64_t n_fk = total(actual.counts) + actual.zeroMass.value_or(0);
  if (n_fk <= 0) return 0.0;
  std::int64_t diff = 0;
  std::set<CoappearVector> keys;
  for (const auto& [v, n] : target.counts) keys.insert(v);
  for (const auto& [v, n] : actual.counts) keys.insert(v);
  for (const auto& v : keys) {
    auto a = actual.counts.find(v);
    auto t = target.counts.find(v);
    diff += std::llabs((a == actual.counts.end() ? 0 : a->second) - (t == target.counts.end() ? 0 : t->second));
  }
  diff += std::llabs(zeroMassOf(actual, n_fk) - zeroMassOf(target, n_fk));
  return static_cast<double>(diff) / static_cast<double>(n_fk);
}

CoappearState::CoappearState(const DatasetSchema& schema, CoappearGroup group) : group_(std::move(group)) {
  for (std::size_t i = 0; i < group_.referencing.size(); ++i) {
    const TableSchema& ts = schema.table(group_.referencing[i]);
    referencing_.push_back(schema.id(ts.name));
    std::vector<std::size_t> cols;
    for (const auto& c : group_.fkColumns.at(i)) {
      auto idx = ts.valueColumnIndex(c);
      if (!idx) throw Error(ErrorCode::kGroupMismatch, ts.name + " has no column " + c);
      cols.push_back(*idx);
    }
    if (cols.size() != group_.referenced.size()) throw Error(ErrorCode::kGroupMismatch, "group needs one key per referenced table");
    fk_.push_back(std::move(cols));
  }
  for (const auto& r : group_.referenced) referenced_.push_back(schema.id(r));
  referenced_sizes_.assign(referenced_.size(), 0);
  tuples_.resize(referencing_.size());
}

void CoappearState::build(const Dataset& d) {
  combos_.clear();
  hist_.clear();
  nonzero_total_ = 0;
  for (std::size_t m = 0; m < referenced_.size(); ++m) {
    referenced_sizes_[m] = static_cast<std::int64_t>(d.table(referenced_[m]).size());
  }
  const std::size_t k = referencing_.size();
  for (std::size_t i = 0; i < k; ++i) {
    tuples_[i].clear();
    for (const Tuple& t : d.table(referencing_[i]).rows()) {
      Combination c;
      for (std::size_t col : fk_[i]) c.push_back(asInt(t.cells[col]).value_or(kMissing));
      if (complete(c)) {
        auto [it, fresh] = combos_.try_emplace(c, CoappearVector(k, 0));
        ++it->second[i];
      }
      tuples_[i].emplace(t.id, std::move(c));
    }
  }
  for (const auto& [c, v] : combos_) {
    ++hist_[v];
    ++nonzero_total_;
  }
  recomputeAbs();
}

void CoappearState::setTarget(const CoappearDistribution* target) {
  target_ = target;
  recomputeAbs();
}

void CoappearState::recomputeAbs() {
  abs_ = 0;
  if (target_ == nullptr) return;
  for (const auto& [v, n] : hist_) {
    auto t = target_->counts.find(v);
    abs_ += std::llabs(n - (t == target_->counts.end() ? 0 : t->second));
  }
  for (const auto& [v, n] : target_->counts) {
    if (!hist_.contains(v)) abs_ += std::llabs(n);
  }
}

void CoappearState::bump(const CoappearVector& v, std::int64_t delta) {
  std::int64_t want = 0;
  if (target_ != nullptr) {
    auto t = target_->counts.find(v);
    if (t != target_->counts.end()) want = t->second;
  }
  auto it = hist_.try_emplace(v, 0).first;
  const std::int64_t before = it->second;
  it->second += delta;
  abs_ += std::llabs(it->second - want) - std::llabs(before - want);
  nonzero_total_ += delta;
  if (it->second == 0) hist_.erase(it);
}

void CoappearState::addOccurrence(std::size_t i, const Combination& c, int delta) {
  const std::size_t k = referencing_.size();
  auto it = combos_.try_emplace(c, CoappearVector(k, 0)).first;
  CoappearVector before = it->second;
  it->second[i] += delta;
  if (!isZero(before)) bump(before, -1);
  if (isZero(it->second)) {
    combos_.erase(it);
  } else {
    bump(it->second, +1);
  }
}

void CoappearState::applyOne(const CellEdit& e) {
  for (std::size_t m = 0; m < referenced_.size(); ++m) {
    if (referenced_[m] != e.table) continue;
    if (e.kind == CellEdit::Kind::kAppend) ++referenced_sizes_[m];
    if (e.kind == CellEdit::Kind::kRemove) --referenced_sizes_[m];
  }
  for (std::size_t i = 0; i < referencing_.size(); ++i) {
    if (referencing_[i] != e.table) continue;
    auto& rows = tuples_[i];
    switch (e.kind) {
      case CellEdit::Kind::kSet: {
        auto pos = std::find(fk_[i].begin(), fk_[i].end(), e.column);
        if (pos == fk_[i].end()) break;
        Combination& c = rows.at(e.tuple);
        if (complete(c)) addOccurrence(i, c, -1);
        c[static_cast<std::size_t>(pos - fk_[i].begin())] = asInt(e.after).value_or(kMissing);
        if (complete(c)) addOccurrence(i, c, +1);
        break;
      }
      case CellEdit::Kind::kAppend: {
        Combination c;
        for (std::size_t col : fk_[i]) c.push_back(asInt(e.cells[col]).value_or(kMissing));
        if (complete(c)) addOccurrence(i, c, +1);
        rows.emplace(e.tuple, std::move(c));
        break;
      }
      case CellEdit::Kind::kRemove: {
        auto it = rows.find(e.tuple);
        if (complete(it->second)) addOccurrence(i, it->second, -1);
        rows.erase(it);
        break;
      }
    }
  }
}

void CoappearState::apply(const EditList& edits) {
  for (const CellEdit& e : edits) applyOne(e);
}

std::int64_t CoappearState::nfk() const {
  std::int64_t n = 1;
  for (std::int64_t s : referenced_sizes_) n *= s;
  return n;
}

std::int64_t CoappearState::zeroMass() const { return nfk() - nonzero_total_; }

CoappearDistribution CoappearState::distribution() const {
  CoappearDistribution out;
  out.group = group_;
  out.counts = hist_;
  out.zeroMass = zeroMass();
  return out;
}

double CoappearState::error() const {
  if (target_ == nullptr) return 0.0;
  const std::int64_t n = nfk();
  if (n <= 0) return 0.0;
  const std::int64_t zero_diff = std::llabs(zeroMass() - zeroMassOf(*target_, n));
  return static_cast<double>(abs_ + zero_diff) / static_cast<double>(n);
}

}  // namespace tweakscale
