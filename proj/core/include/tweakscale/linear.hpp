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

#ifndef TWEAKSCALE_LINEAR_HPP_
#define TWEAKSCALE_LINEAR_HPP_

#include <cstddef>
#include <cstdint>
#include <limits>
#include <unordered_map>
#include <vector>

#include "tweakscale/chains.hpp"
#include "tweakscale/dataset.hpp"
#include "tweakscale/modification.hpp"
#include "tweakscale/rand_scaler.hpp"
#include "tweakscale/violation.hpp"

namespace tweakscale {

/// Lower-triangular root counts of a chain. Indices count from the
/// referenced end: h[j][i] (0-based, i < j) is the number of tuples of the
/// chain's (i+1)-th table from the end that are roots of the sub-chain
/// ending there and starting at the (j+1)-th table from the end. Row j holds
/// j+1 entries; the diagonal is stored as 0.
struct LinearJoinMatrix {
  ReferenceChain chain;
  std::vector<std::vector<std::int64_t>> h;

  [[nodiscard]] std::size_t size() const { return h.size(); }
  bool operator==(const LinearJoinMatrix&) const = default;
};

/// Zero matrix shaped for `chain`.
LinearJoinMatrix emptyMatrix(const ReferenceChain& chain);

LinearJoinMatrix computeLinearMatrix(const Dataset& d, const ReferenceChain& chain);

/// Table sizes along the chain, referenced end first.
std::vector<std::size_t> chainSizes(const ReferenceChain& chain, const SizeTarget& sizes);

std::vector<Violation> checkNecessityL(const LinearJoinMatrix& target, const SizeTarget& sizes);
LinearJoinMatrix repairTargetL(const LinearJoinMatrix& raw, const SizeTarget& sizes);
LinearJoinMatrix generateTargetL(const LinearJoinMatrix& orig, const SizeTarget& orig_sizes,
                                 const SizeTarget& new_sizes);

/// Mean over strictly lower entries of |actual - target| / target. A zero
/// target entry contributes 0 if matched and 1 otherwise.
/// Throws Error(kShapeMismatch).
double linearError(const LinearJoinMatrix& target, const LinearJoinMatrix& actual);

/// Reference forest of one chain, maintained under cell edits.
/// Levels count from the referenced end: level 0 is the root table.
class LinearState {
 public:
  static constexpr TupleId kNone = std::numeric_limits<TupleId>::min();

  struct Node {
    TupleId parent = kNone;
    int reach = 0;  // deepest level with a descendant (own level if none)
    std::vector<std::int32_t> childReach;  // children per reach value
    std::vector<TupleId> children;
  };

  LinearState(const DatasetSchema& schema, ReferenceChain chain);

  void build(const Dataset& d);
  void apply(const EditList& edits);

  [[nodiscard]] const ReferenceChain& chain() const { return chain_; }
  [[nodiscard]] std::size_t levels() const { return tables_.size(); }
  [[nodiscard]] TableId tableAt(std::size_t level) const { return tables_[level]; }
  /// Value column of the level's table that references the level above.
  [[nodiscard]] std::size_t fkColumnAt(std::size_t level) const { return fk_[level]; }
  [[nodiscard]] std::int64_t h(std::size_t j, std::size_t i) const;
  [[nodiscard]] LinearJoinMatrix matrix() const;
  [[nodiscard]] const std::unordered_map<TupleId, Node>& nodes(std::size_t level) const { return nodes_[level]; }
  [[nodiscard]] const Node& node(std::size_t level, TupleId id) const { return nodes_[level].at(id); }
  /// Sorted ids of level-`level` nodes.
  [[nodiscard]] std::vector<TupleId> ids(std::size_t level) const;
  /// Descendants of (level, id) at `target_level`, sorted.
  [[nodiscard]] std::vector<TupleId> descendants(std::size_t level, TupleId id, std::size_t target_level) const;
  [[nodiscard]] TupleId ancestor(std::size_t level, TupleId id, std::size_t target_level) const;

 private:
  void applyOne(const CellEdit& e);
  void attach(std::size_t level, TupleId child, TupleId parent);
  void detach(std::size_t level, TupleId child);
  void propagate(std::size_t level, TupleId id, int removed, int added);
  [[nodiscard]] int computeReach(const Node& n, std::size_t level) const;

  ReferenceChain chain_;
  std::vector<TableId> tables_;
  std::vector<std::size_t> fk_;
  std::vector<std::unordered_map<TupleId, Node>> nodes_;
  std::vector<std::vector<std::int64_t>> hist_;  // hist_[level][reach]
};

}  // namespace tweakscale

#endif  // TWEAKSCALE_LINEAR_HPP_
