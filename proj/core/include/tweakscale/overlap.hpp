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

#ifndef TWEAKSCALE_OVERLAP_HPP_
#define TWEAKSCALE_OVERLAP_HPP_

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "tweakscale/coordinator.hpp"

namespace tweakscale {

/// Undirected graph over tool names. Nodes are sorted by name.
struct OverlapGraph {
  std::vector<std::string> nodes;
  std::vector<std::pair<std::size_t, std::size_t>> edges;  // (i, j) with i < j

  [[nodiscard]] bool adjacent(std::size_t a, std::size_t b) const;
};

/// Edge (i, j) iff tools i and j touched a common (table, tuple). Tools in
/// `extra` that touched nothing still get a node.
OverlapGraph overlapGraph(const AccessLog& log, const std::vector<std::string>& extra = {});

/// Exact maximum independent set; among maximum sets, the lexicographically
/// least sequence of names. Throws Error(kGraphTooLarge) above 30 nodes.
std::vector<std::string> maximumIndependentSet(const OverlapGraph& g);

}  // namespace tweakscale

#endif  // TWEAKSCALE_OVERLAP_HPP_
