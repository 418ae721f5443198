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

#ifndef TWEAKSCALE_COAPPEAR_HPP_
#define TWEAKSCALE_COAPPEAR_HPP_

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "tweakscale/dataset.hpp"
#include "tweakscale/modification.hpp"
#include "tweakscale/rand_scaler.hpp"
#include "tweakscale/violation.hpp"

namespace tweakscale {

/// Tables referencing exactly the same set of tables.
struct CoappearGroup {
  std::vector<std::string> referencing;  // sorted
  std::vector<std::string> referenced;   // sorted
  /// fkColumns[i][m]: column of referencing[i] that references referenced[m].
  std::vector<std::vector<std::string>> fkColumns;

  bool operator==(const CoappearGroup&) const = default;
};

using CoappearVector = std::vector<std::int64_t>;
/// Referenced primary keys, one per referenced table.
using Combination = std::vector<std::int64_t>;

struct CombinationHash {
  std::size_t operator()(const std::vector<std::int64_t>& v) const noexcept;
};

/// Sparse distribution over non-zero coappear vectors. The zero-vector mass
/// is either explicit or, when absent, whatever completes the total to N_FK.
struct CoappearDistribution {
  CoappearGroup group;
  std::map<CoappearVector, std::int64_t> counts;
  std::optional<std::int64_t> zeroMass;

  bool operator==(const CoappearDistribution&) const = default;
};

std::vector<CoappearGroup> detectCoappearGroups(const DatasetSchema& schema);

/// N_FK: product of referenced table sizes.
std::int64_t combinationCount(const CoappearGroup& g, const SizeTarget& sizes);
std::int64_t zeroMassOf(const CoappearDistribution& dist, std::int64_t n_fk);

CoappearDistribution computeCoappear(const Dataset& d, const CoappearGroup& g);
std::vector<Violation> checkNecessityC(const CoappearDistribution& target, const SizeTarget& sizes);
/// Throws Error(kInfeasibleRepair) when marginals are positive but N_FK = 0.
CoappearDistribution repairTargetC(const CoappearDistribution& raw, const SizeTarget& sizes);
CoappearDistribution generateTargetC(const CoappearDistribution& orig, const SizeTarget& orig_sizes,
                                     const SizeTarget& new_sizes);
/// (1/N_FK) * sum over all vectors, zero included, of |actual - target|.
/// Throws Error(kGroupMismatch).
double coappearError(const CoappearDistribution& target, const CoappearDistribution& actual);

/// Coappear distribution of one group, maintained under cell edits.
class CoappearState {
 public:
  CoappearState(const DatasetSchema& schema, CoappearGroup group);

  void build(const Dataset& d);
  void apply(const EditList& edits);
  void setTarget(const CoappearDistribution* target);

  [[nodiscard]] const CoappearGroup& group() const { return group_; }
  [[nodiscard]] std::size_t arity() const { return referencing_.size(); }
  [[nodiscard]] TableId referencingTable(std::size_t i) const { return referencing_[i]; }
  [[nodiscard]] const std::vector<std::size_t>& fkColumns(std::size_t i) const { return fk_[i]; }
  [[nodiscard]] TableId referencedTable(std::size_t m) const { return referenced_[m]; }
  [[nodiscard]] std::int64_t nfk() const;
  [[nodiscard]] const std::map<CoappearVector, std::int64_t>& histogram() const { return hist_; }
  [[nodiscard]] const std::unordered_map<Combination, CoappearVector, CombinationHash>& combinations() const {
    return combos_;
  }
  [[nodiscard]] std::int64_t zeroMass() const;
  [[nodiscard]] CoappearDistribution distribution() const;
  /// Error against the target set with setTarget().
  [[nodiscard]] double error() const;

 private:
  void applyOne(const CellEdit& e);
  void addOccurrence(std::size_t i, const Combination& c, int delta);
  void bump(const CoappearVector& v, std::int64_t delta);
  void recomputeAbs();

  CoappearGroup group_;
  std::vector<TableId> referencing_;
  std::vector<TableId> referenced_;
  std::vector<std::vector<std::size_t>> fk_;
  std::vector<std::int64_t> referenced_sizes_;
  // FK values per referencing tuple; kMissing marks Empty.
  std::vector<std::unordered_map<TupleId, Combination>> tuples_;
  std::unordered_map<Combination, CoappearVector, CombinationHash> combos_;
  std::map<CoappearVector, std::int64_t> hist_;
  std::int64_t nonzero_total_ = 0;
  const CoappearDistribution* target_ = nullptr;
  std::int64_t abs_ = 0;  // sum over non-zero vectors of |hist - target|
};

}  // namespace tweakscale

#endif  // TWEAKSCALE_COAPPEAR_HPP_
