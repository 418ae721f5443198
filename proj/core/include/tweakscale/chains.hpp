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

#ifndef TWEAKSCALE_CHAINS_HPP_
#define TWEAKSCALE_CHAINS_HPP_

#include <string>
#include <vector>

#include "tweakscale/schema.hpp"

namespace tweakscale {

/// A reference chain T_k -> ... -> T_1, stored referencing end first.
/// fkColumns[i] is the column of tables[i] that references tables[i + 1].
struct ReferenceChain {
  std::vector<std::string> tables;
  std::vector<std::string> fkColumns;

  [[nodiscard]] std::size_t length() const { return tables.size(); }
  bool operator==(const ReferenceChain&) const = default;
  auto operator<=>(const ReferenceChain&) const = default;
};

/// Every maximal chain of length >= 2, sorted lexicographically by table
/// names. Throws Error(kCyclicSchema) if the reference graph has a cycle.
std::vector<ReferenceChain> enumerateMaximalChains(const DatasetSchema& schema);

/// Checks that consecutive tables are joined by the named foreign keys.
/// Throws Error(kSpecMismatch) otherwise.
void checkChain(const DatasetSchema& schema, const ReferenceChain& chain);

/// Fills fkColumns from the schema when the chain only names tables.
ReferenceChain resolveChain(const DatasetSchema& schema, std::vector<std::string> tables);

}  // namespace tweakscale

#endif  // TWEAKSCALE_CHAINS_HPP_
