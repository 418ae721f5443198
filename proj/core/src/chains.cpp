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

#include "tweakscale/chains.hpp"

#include <algorithm>
#include <functional>

#include "tweakscale/error.hpp"

namespace tweakscale {

std::vector<ReferenceChain> enumerateMaximalChains(const DatasetSchema& schema) {
  const std::size_t n = schema.tables.size();
  std::vector<bool> referenced(n, false);
  for (const auto& t : schema.tables) {
    for (const auto& fk : t.foreignKeys) referenced[schema.id(fk.references)] = true;
  }

  // 0 = unvisited, 1 = on stack, 2 = done
  std::vector<int> state(n, 0);
  std::function<void(TableId)> visit = [&](TableId v) {
    state[v] = 1;
    for (const auto& fk : schema.tables[v].foreignKeys) {
      const TableId w = schema.id(fk.references);
      if (state[w] == 1) {
        throw Error(ErrorCode::kCyclicSchema,
                    "foreign key " + schema.tables[v].name + "." + fk.column + " closes a reference cycle");
      }
      if (state[w] == 0) visit(w);
    }
    state[v] = 2;
  };
  for (TableId v = 0; v < n; ++v) {
    if (state[v] == 0) visit(v);
  }

  std::vector<ReferenceChain> chains;
  ReferenceChain path;
  std::function<void(TableId)> extend = [&](TableId v) {
    const TableSchema& t = schema.tables[v];
    path.tables.push_back(t.name);
    if (t.foreignKeys.empty()) {
      if (path.tables.size() >= 2) chains.push_back(path);
    } else {
      for (const auto& fk : t.foreignKeys) {
        path.fkColumns.push_back(fk.column);
        extend(schema.id(fk.references));
        path.fkColumns.pop_back();
      }
    }
    path.tables.pop_back();
  };
  for (TableId v = 0; v < n; ++v) {
    if (!referenced[v]) extend(v);
  }
  std::sort(chains.begin(), chains.end());
  return chains;
}

void checkChain(const DatasetSchema& schema, const ReferenceChain& chain) {
  if (chain.tables.empty() || chain.fkColumns.size() + 1 != chain.tables.size()) {
    throw Error(ErrorCode::kSpecMismatch, "chain needs one foreign key column per link");
  }
  for (std::size_t i = 0; i + 1 < chain.tables.size(); ++i) {
    if (!schema.find(chain.tables[i]) || !schema.find(chain.tables[i + 1])) {
      throw Error(ErrorCode::kSpecMismatch, "chain names an unknown table");
    }
    bool ok = false;
    for (const auto& fk : schema.table(chain.tables[i]).foreignKeys) {
      ok |= fk.column == chain.fkColumns[i] && fk.references == chain.tables[i + 1];
    }
    if (!ok) {
      throw Error(ErrorCode::kSpecMismatch,
                  chain.tables[i] + "." + chain.fkColumns[i] + " does not reference " + chain.tables[i + 1]);
    }
  }
}

ReferenceChain resolveChain(const DatasetSchema& schema, std::vector<std::string> tables) {
  ReferenceChain chain;
  for (std::size_t i = 0; i + 1 < tables.size(); ++i) {
    if (!schema.find(tables[i])) throw Error(ErrorCode::kSpecMismatch, "unknown table " + tables[i]);
    std::string column;
    for (const auto& fk : schema.table(tables[i]).foreignKeys) {
      if (fk.references == tables[i + 1]) {
        column = fk.column;
        break;
      }
    }
    if (column.empty()) {
      throw Error(ErrorCode::kSpecMismatch, tables[i] + " does not reference " + tables[i + 1]);
    }
    chain.fkColumns.push_back(column);
  }
  chain.tables = std::move(tables);
  checkChain(schema, chain);
  return chain;
}

}  // namespace tweakscale
