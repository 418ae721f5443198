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

#include "tweakscale/overlap.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <set>

#include "tweakscale/error.hpp"

namespace tweakscale {
namespace {

constexpr std::size_t kMaxNodes = 30;

using Mask = std::uint32_t;

int lowestBit(Mask m) { return std::countr_zero(m); }

// Size of a maximum independent set within `mask`.
int alpha(const std::vector<Mask>& adj, Mask mask) {
  if (mask == 0) return 0;
  const int v = lowestBit(mask);
  const Mask rest = mask & ~(Mask{1} << v);
  const Mask nv = adj[v] & mask;
  // A vertex of degree <= 1 is always in some maximum set.
  if (std::popcount(nv) <= 1) return 1 + alpha(adj, rest & ~nv);
  return std::max(1 + alpha(adj, rest & ~nv), alpha(adj, rest));
}

}  // namespace

bool OverlapGraph::adjacent(std::size_t a, std::size_t b) const {
  if (a > b) std::swap(a, b);
  return std::find(edges.begin(), edges.end(), std::make_pair(a, b)) != edges.end();
}

OverlapGraph overlapGraph(const AccessLog& log, const std::vector<std::string>& extra) {
  std::set<std::string> names(extra.begin(), extra.end());
  for (const auto& [name, touched] : log) names.insert(name);
  OverlapGraph g;
  g.nodes.assign(names.begin(), names.end());

  static const std::set<std::pair<TableId, TupleId>> kNone;
  auto touched = [&](const std::string& name) -> const auto& {
    auto it = log.find(name);
    return it == log.end() ? kNone : it->second;
  };
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    const auto& a = touched(g.nodes[i]);
    for (std::size_t j = i + 1; j < g.nodes.size(); ++j) {
      const auto& b = touched(g.nodes[j]);
      auto ia = a.begin();
      auto ib = b.begin();
      while (ia != a.end() && ib != b.end()) {
        if (*ia < *ib) {
          ++ia;
        } else if (*ib < *ia) {
          ++ib;
        } else {
          g.edges.emplace_back(i, j);
          break;
        }
      }
    }
  }
  return g;
}

std::vector<std::string> maximumIndependentSet(const OverlapGraph& g) {
  const std::size_t n = g.nodes.size();
  if (n > kMaxNodes) {
    throw Error(ErrorCode::kGraphTooLarge, "overlap graph has " + std::to_string(n) + " nodes, limit is 30");
  }
  std::vector<Mask> adj(n, 0);
  for (auto [a, b] : g.edges) {
    adj[a] |= Mask{1} << b;
    adj[b] |= Mask{1} << a;
  }
  const Mask all = n == 0 ? 0 : static_cast<Mask>((std::uint64_t{1} << n) - 1);
  const int best = alpha(adj, all);

  // Nodes are name-sorted, so taking each node whenever a maximum set can
  // still be completed yields the lexicographically least maximum set.
  std::vector<std::string> chosen;
  Mask available = all;
  int taken = 0;
  for (std::size_t v = 0; v < n; ++v) {
    const Mask bit = Mask{1} << v;
    if ((available & bit) == 0) continue;
    const Mask after = available & ~bit & ~adj[v] & ~((bit << 1) - 1);
    if (taken + 1 + alpha(adj, after) == best) {
      chosen.push_back(g.nodes[v]);
      ++taken;
      available = after;
    } else {
      available &= ~bit;
    }
  }
  return chosen;
}

}  // namespace tweakscale
