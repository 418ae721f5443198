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

#ifndef TWEAKSCALE_PAIRWISE_HPP_
#define TWEAKSCALE_PAIRWISE_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <unordered_map>
#include <utility>
#include <vector>

#include "tweakscale/dataset.hpp"
#include "tweakscale/modification.hpp"
#include "tweakscale/rand_scaler.hpp"
#include "tweakscale/violation.hpp"

namespace tweakscale {

using CountPair = std::pair<std::int64_t, std::int64_t>;

/// Distribution of ordered user pairs (u, w), u != w, by the response counts
/// (c(u,w), c(w,u)), where c(u,w) counts responses by u on posts owned by w.
/// rhoS counts users by the number of responses to their own posts. Zero
/// classes are excluded from the maps; when the explicit mass is absent it is
/// whatever completes |U|(|U|-1) (resp. |U|).
struct PairwiseDistribution {
  PairwiseBinding binding;
  std::map<CountPair, std::int64_t> rhoN;
  std::optional<std::int64_t> rhoN00;
  std::map<std::int64_t, std::int64_t> rhoS;
  std::optional<std::int64_t> rhoS0;

  bool operator==(const PairwiseDistribution&) const = default;
};

/// Table sizes the pairwise conditions depend on. `responses` excludes
/// self-responses when those are not modelled.
struct PairwiseTotals {
  std::int64_t users = 0;
  std::int64_t responses = 0;
};

PairwiseTotals pairwiseTotals(const PairwiseBinding& b, const SizeTarget& sizes);
/// Responses whose author owns the post.
std::int64_t countSelfResponses(const Dataset& d, const PairwiseBinding& b);

std::int64_t zeroPairMass(const PairwiseDistribution& dist, std::int64_t users);
std::int64_t zeroSelfMass(const PairwiseDistribution& dist, std::int64_t users);

/// With `self_responses` off, responses to one's own post are ignored and
/// rhoS stays empty.
PairwiseDistribution computePairwise(const Dataset& d, const PairwiseBinding& b, bool self_responses = true);

std::vector<Violation> checkNecessityP(const PairwiseDistribution& target, const PairwiseTotals& totals,
                                       bool self_responses = true);
/// Throws Error(kInfeasibleRepair) when responses cannot be placed.
PairwiseDistribution repairTargetP(const PairwiseDistribution& raw, const PairwiseTotals& totals,
                                   bool self_responses = true);
/// Rescales pair classes by the ratio of user pairs and self classes by the
/// ratio of users, then repairs against `new_totals`.
PairwiseDistribution generateTargetP(const PairwiseDistribution& orig, std::int64_t orig_users,
                                     const PairwiseTotals& new_totals, bool self_responses = true);

/// max(sum_N |d| / (|U|(|U|-1)), sum_S |d| / |U|), zero classes included;
/// |U| is taken from `actual`. Throws Error(kBindingMismatch).
double pairwiseError(const PairwiseDistribution& target, const PairwiseDistribution& actual, std::int64_t users);

/// Pairwise distribution of one binding, maintained under cell edits,
/// including post ownership changes and appended posts.
class PairwiseState {
 public:
  PairwiseState(const DatasetSchema& schema, PairwiseBinding binding, bool self_responses = true);

  void build(const Dataset& d);
  void apply(const EditList& edits);
  void setTarget(const PairwiseDistribution* target);

  [[nodiscard]] const PairwiseBinding& binding() const { return binding_; }
  [[nodiscard]] bool selfResponses() const { return self_; }
  [[nodiscard]] TableId userTable() const { return user_table_; }
  [[nodiscard]] TableId postTable() const { return post_table_; }
  [[nodiscard]] TableId responseTable() const { return response_table_; }
  [[nodiscard]] std::size_t ownerColumn() const { return owner_col_; }
  [[nodiscard]] std::size_t postColumn() const { return post_col_; }
  [[nodiscard]] std::size_t userColumn() const { return user_col_; }

  [[nodiscard]] std::int64_t users() const { return static_cast<std::int64_t>(users_.size()); }
  /// c(u, w); u == w gives the self count.
  [[nodiscard]] std::int64_t count(TupleId u, TupleId w) const;
  [[nodiscard]] const std::map<std::pair<TupleId, TupleId>, std::int64_t>& counts() const { return c_; }
  /// True if some response in the bound table points at `post`.
  [[nodiscard]] bool responded(TupleId post) const { return post_resp_.contains(post); }
  [[nodiscard]] const std::map<CountPair, std::int64_t>& histN() const { return hist_n_; }
  [[nodiscard]] const std::map<std::int64_t, std::int64_t>& histS() const { return hist_s_; }
  [[nodiscard]] std::int64_t zeroPairs() const;
  [[nodiscard]] std::int64_t zeroSelf() const;
  [[nodiscard]] PairwiseDistribution distribution() const;
  [[nodiscard]] double error() const;

 private:
  static constexpr TupleId kNone = INT64_MIN;
  struct Response {
    TupleId user = kNone;
    TupleId post = kNone;
  };

  void applyOne(const CellEdit& e);
  void contribute(TupleId u, TupleId post, std::int64_t delta);
  void moveCount(TupleId u, TupleId w, std::int64_t delta);
  void bumpN(const CountPair& k, std::int64_t delta);
  void bumpS(std::int64_t x, std::int64_t delta);
  void recomputeAbs();

  PairwiseBinding binding_;
  bool self_;
  TableId user_table_;
  TableId post_table_;
  TableId response_table_;
  std::size_t owner_col_;
  std::size_t post_col_;
  std::size_t user_col_;

  std::unordered_map<TupleId, int> users_;  // value unused
  std::unordered_map<TupleId, TupleId> owner_;
  std::unordered_map<TupleId, Response> responses_;
  // post -> responder -> responses
  std::unordered_map<TupleId, std::unordered_map<TupleId, std::int64_t>> post_resp_;
  std::map<std::pair<TupleId, TupleId>, std::int64_t> c_;
  std::map<CountPair, std::int64_t> hist_n_;
  std::map<std::int64_t, std::int64_t> hist_s_;
  std::int64_t sum_n_ = 0;
  std::int64_t sum_s_ = 0;
  const PairwiseDistribution* target_ = nullptr;
  std::int64_t abs_n_ = 0;
  std::int64_t abs_s_ = 0;
};

}  // namespace tweakscale

#endif  // TWEAKSCALE_PAIRWISE_HPP_
