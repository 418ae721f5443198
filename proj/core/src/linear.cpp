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

#include "tweakscale/linear.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "tweakscale/error.hpp"

namespace tweakscale {
namespace {

std::string entry(std::size_t j, std::size_t i) {
  // Reported 1-based, root table = 1.
  return "h(" + std::to_string(j + 1) + "," + std::to_string(i + 1) + ")";
}

// min |T_l| over levels i..j
std::int64_t cap(const std::vector<std::size_t>& s, std::size_t i, std::size_t j) {
  std::size_t m = s[i];
  for (std::size_t l = i; l <= j; ++l) m = std::min(m, s[l]);
  return static_cast<std::int64_t>(m);
}

}  // namespace

LinearJoinMatrix emptyMatrix(const ReferenceChain& chain) {
  LinearJoinMatrix m;
  m.chain = chain;
  for (std::size_t j = 0; j < chain.length(); ++j) m.h.emplace_back(j + 1, 0);
  return m;
}

LinearJoinMatrix computeLinearMatrix(const Dataset& d, const ReferenceChain& chain) {
  LinearState state(d.schema(), chain);
  state.build(d);
  return state.matrix();
}

std::vector<std::size_t> chainSizes(const ReferenceChain& chain, const SizeTarget& sizes) {
  std::vector<std::size_t> out;
  for (auto it = chain.tables.rbegin(); it != chain.tables.rend(); ++it) {
    auto found = sizes.find(*it);
    if (found == sizes.end()) throw Error(ErrorCode::kSpecMismatch, "no size for chain table " + *it);
    out.push_back(found->second);
  }
  return out;
}

std::vector<Violation> checkNecessityL(const LinearJoinMatrix& target, const SizeTarget& sizes) {
  const std::vector<std::size_t> s = chainSizes(target.chain, sizes);
  const std::size_t n = s.size();
  if (target.h.size() != n) throw Error(ErrorCode::kShapeMismatch, "matrix does not match its chain length");
  auto H = [&](std::size_t j, std::size_t i) -> std::int64_t {
    if (i == j) return static_cast<std::int64_t>(s[j]);
    return target.h[j][i];
  };
  std::vector<Violation> out;
  for (std::size_t j = 0; j < n; ++j) {
    if (target.h[j].size() != j + 1) throw Error(ErrorCode::kShapeMismatch, "row " + std::to_string(j + 1) + " has the wrong width");
    for (std::size_t i = 0; i < j; ++i) {
      if (target.h[j][i] < 0) out.push_back({"L1", entry(j, i) + " is negative"});
      if (target.h[j][i] > cap(s, i, j)) {
        out.push_back({"L1", entry(j, i) + " exceeds the smallest table size " + std::to_string(cap(s, i, j))});
      }
      if (j + 1 < n && H(j + 1, i) > H(j, i)) {
        out.push_back({"L2", entry(j + 1, i) + " > " + entry(j, i)});
      }
      if (i + 1 < j && H(j, i) > H(j, i + 1)) {
        out.push_back({"L3", entry(j, i) + " > " + entry(j, i + 1)});
      }
      // For i + 1 == j the left side uses h(j,j) = |T_j|.
      if (j + 1 < n && H(j, i + 1) - H(j + 1, i + 1) < H(j, i) - H(j + 1, i)) {
        out.push_back({i + 1 < j ? "L4" : "L4-diagonal",
                       entry(j, i + 1) + " - " + entry(j + 1, i + 1) + " < " + entry(j, i) + " - " + entry(j + 1, i)});
      }
    }
    // A non-empty table whose ancestors are non-empty reaches at least one root.
    if (j > 0 && cap(s, 0, j) > 0 && target.h[j][0] < 1) {
      out.push_back({"L-nonempty", entry(j, 0) + " must be at least 1"});
    }
  }
  return out;
}

LinearJoinMatrix repairTargetL(const LinearJoinMatrix& raw, const SizeTarget& sizes) {
  const std::vector<std::size_t> s = chainSizes(raw.chain, sizes);
  const std::size_t n = s.size();
  if (raw.h.size() != n) throw Error(ErrorCode::kShapeMismatch, "matrix does not match its chain length");
  LinearJoinMatrix out = emptyMatrix(raw.chain);
  for (std::size_t j = 1; j < n; ++j) {
    if (raw.h[j].size() != j + 1) throw Error(ErrorCode::kShapeMismatch, "row " + std::to_string(j + 1) + " has the wrong width");
    // prev[i] is the repaired row above with its diagonal read as |T_{j-1}|.
    std::vector<std::int64_t> prev(out.h[j - 1].begin(), out.h[j - 1].end());
    prev[j - 1] = static_cast<std::int64_t>(s[j - 1]);
    const std::int64_t lo = cap(s, 0, j) > 0 ? 1 : 0;
    for (std::size_t i = 0; i < j; ++i) {
      const std::int64_t upper = std::min(cap(s, i, j), prev[i]);
      std::int64_t low = lo;
      std::int64_t high = upper;
      if (i > 0) {
        low = out.h[j][i - 1];
        high = std::min(upper, out.h[j][i - 1] + (prev[i] - prev[i - 1]));
      }
      out.h[j][i] = std::clamp(raw.h[j][i], low, std::max(low, high));
    }
  }
  return out;
}

LinearJoinMatrix generateTargetL(const LinearJoinMatrix& orig, const SizeTarget& orig_sizes,
                                 const SizeTarget& new_sizes) {
  const std::vector<std::size_t> so = chainSizes(orig.chain, orig_sizes);
  const std::vector<std::size_t> sn = chainSizes(orig.chain, new_sizes);
  LinearJoinMatrix scaled = emptyMatrix(orig.chain);
  for (std::size_t j = 0; j < orig.h.size(); ++j) {
    for (std::size_t i = 0; i < j; ++i) {
      if (so[i] == 0) continue;
      const double ratio = static_cast<double>(sn[i]) / static_cast<double>(so[i]);
      scaled.h[j][i] = std::llround(static_cast<double>(orig.h[j][i]) * ratio);
    }
  }
  return repairTargetL(scaled, new_sizes);
}

double linearError(const LinearJoinMatrix& target, const LinearJoinMatrix& actual) {
  if (target.chain != actual.chain || target.h.size() != actual.h.size()) {
    throw Error(ErrorCode::kShapeMismatch, "linear join matrices belong to different chains");
  }
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t j = 0; j < target.h.size(); ++j) {
    if (target.h[j].size() != j + 1 || actual.h[j].size() != j + 1) {
      throw Error(ErrorCode::kShapeMismatch, "linear join matrix rows have the wrong width");
    }
    for (std::size_t i = 0; i < j; ++i) {
      const std::int64_t t = target.h[j][i];
      const std::int64_t a = actual.h[j][i];
      if (t == 0) {
        sum += a == 0 ? 0.0 : 1.0;
      } else {
        sum += static_cast<double>(std::llabs(a - t)) / static_cast<double>(t);
      }
      ++count;
    }
  }
  return count == 0 ? 0.0 : sum / static_cast<double>(count);
}

LinearState::LinearState(const DatasetSchema& schema, ReferenceChain chain) : chain_(std::move(chain)) {
  checkChain(schema, chain_);
  const std::size_t n = chain_.length();
  tables_.resize(n);
  fk_.assign(n, 0);
  for (std::size_t l = 0; l < n; ++l) {
    const std::size_t pos = n - 1 - l;
    tables_[l] = schema.id(chain_.tables[pos]);
    if (l > 0) fk_[l] = *schema.tables[tables_[l]].valueColumnIndex(chain_.fkColumns[pos]);
  }
  nodes_.resize(n);
  hist_.assign(n, std::vector<std::int64_t>(n, 0));
}

void LinearState::build(const Dataset& d) {
  const std::size_t n = levels();
  for (auto& level : nodes_) level.clear();
  for (auto& row : hist_) std::fill(row.begin(), row.end(), 0);
  for (std::size_t l = 0; l < n; ++l) {
    const Table& t = d.table(tables_[l]);
    nodes_[l].reserve(t.size());
    for (const Tuple& tuple : t.rows()) {
      Node node;
      node.reach = static_cast<int>(l);
      node.childReach.assign(n, 0);
      nodes_[l].emplace(tuple.id, std::move(node));
    }
  }
  // Link children, then settle reach bottom-up: deepest level first.
  for (std::size_t l = 1; l < n; ++l) {
    for (const Tuple& tuple : d.table(tables_[l]).rows()) {
      auto v = asInt(tuple.cells[fk_[l]]);
      if (!v) continue;
      auto it = nodes_[l - 1].find(*v);
      if (it == nodes_[l - 1].end()) continue;
      nodes_[l].at(tuple.id).parent = *v;
      it->second.children.push_back(tuple.id);
    }
  }
  for (std::size_t l = n; l-- > 0;) {
    for (auto& [id, node] : nodes_[l]) {
      node.reach = computeReach(node, l);
      ++hist_[l][node.reach];
      if (l > 0 && node.parent != kNone) ++nodes_[l - 1].at(node.parent).childReach[node.reach];
    }
  }
}

int LinearState::computeReach(const Node& n, std::size_t level) const {
  for (std::size_t r = levels(); r-- > level + 1;) {
    if (n.childReach[r] > 0) return static_cast<int>(r);
  }
  return static_cast<int>(level);
}

void LinearState::propagate(std::size_t level, TupleId id, int removed, int added) {
  while (true) {
    Node& p = nodes_[level].at(id);
    if (removed >= 0) --p.childReach[removed];
    if (added >= 0) ++p.childReach[added];
    const int old_reach = p.reach;
    const int new_reach = computeReach(p, level);
    if (new_reach == old_reach) return;
    --hist_[level][old_reach];
    ++hist_[level][new_reach];
    p.reach = new_reach;
    if (level == 0 || p.parent == kNone) return;
    removed = old_reach;
    added = new_reach;
    id = p.parent;
    --level;
  }
}

void LinearState::attach(std::size_t level, TupleId child, TupleId parent) {
  auto it = nodes_[level - 1].find(parent);
  if (it == nodes_[level - 1].end()) return;
  Node& c = nodes_[level].at(child);
  c.parent = parent;
  it->second.children.push_back(child);
  propagate(level - 1, parent, -1, c.reach);
}

void LinearState::detach(std::size_t level, TupleId child) {
  Node& c = nodes_[level].at(child);
  if (c.parent == kNone) return;
  const TupleId parent = c.parent;
  c.parent = kNone;
  auto& siblings = nodes_[level - 1].at(parent).children;
  auto pos = std::find(siblings.begin(), siblings.end(), child);
  *pos = siblings.back();
  siblings.pop_back();
  propagate(level - 1, parent, c.reach, -1);
}

void LinearState::applyOne(const CellEdit& e) {
  const std::size_t n = levels();
  std::size_t level = n;
  for (std::size_t l = 0; l < n; ++l) {
    if (tables_[l] == e.table) level = l;
  }
  if (level == n) return;
  switch (e.kind) {
    case CellEdit::Kind::kSet: {
      if (level == 0 || e.column != fk_[level]) return;
      detach(level, e.tuple);
      if (auto v = asInt(e.after)) attach(level, e.tuple, *v);
      break;
    }
    case CellEdit::Kind::kAppend: {
      Node node;
      node.reach = static_cast<int>(level);
      node.childReach.assign(n, 0);
      nodes_[level].emplace(e.tuple, std::move(node));
      ++hist_[level][level];
      if (level > 0) {
        if (auto v = asInt(e.cells[fk_[level]])) attach(level, e.tuple, *v);
      }
      break;
    }
    case CellEdit::Kind::kRemove: {
      if (level > 0) detach(level, e.tuple);
      auto it = nodes_[level].find(e.tuple);
      --hist_[level][it->second.reach];
      nodes_[level].erase(it);
      break;
    }
  }
}

void LinearState::apply(const EditList& edits) {
  for (const CellEdit& e : edits) applyOne(e);
}

std::int64_t LinearState::h(std::size_t j, std::size_t i) const {
  if (i >= j) return 0;
  std::int64_t total = 0;
  for (std::size_t r = j; r < levels(); ++r) total += hist_[i][r];
  return total;
}

LinearJoinMatrix LinearState::matrix() const {
  LinearJoinMatrix m = emptyMatrix(chain_);
  for (std::size_t j = 0; j < levels(); ++j) {
    for (std::size_t i = 0; i < j; ++i) m.h[j][i] = h(j, i);
  }
  return m;
}

std::vector<TupleId> LinearState::ids(std::size_t level) const {
  std::vector<TupleId> out;
  out.reserve(nodes_[level].size());
  for (const auto& [id, node] : nodes_[level]) out.push_back(id);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<TupleId> LinearState::descendants(std::size_t level, TupleId id, std::size_t target_level) const {
  std::vector<TupleId> frontier{id};
  for (std::size_t l = level; l < target_level; ++l) {
    std::vector<TupleId> next;
    for (TupleId t : frontier) {
      const auto& kids = nodes_[l].at(t).children;
      next.insert(next.end(), kids.begin(), kids.end());
    }
    frontier = std::move(next);
  }
  std::sort(frontier.begin(), frontier.end());
  return frontier;
}

TupleId LinearState::ancestor(std::size_t level, TupleId id, std::size_t target_level) const {
  while (level > target_level) {
    id = nodes_[level].at(id).parent;
    if (id == kNone) return kNone;
    --level;
  }
  return id;
}

}  // namespace tweakscale
