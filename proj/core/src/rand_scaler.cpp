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

#include "tweakscale/rand_scaler.hpp"

#include "tweakscale/error.hpp"
#include "tweakscale/rng.hpp"

namespace tweakscale {

SizeTarget currentSizes(const Dataset& d) {
  SizeTarget out;
  for (TableId i = 0; i < d.tableCount(); ++i) out[d.schema().tables[i].name] = d.table(i).size();
  return out;
}

Dataset randScale(const Dataset& d, const SizeTarget& target, std::uint64_t seed) {
  const DatasetSchema& schema = d.schema();
  for (const auto& [name, count] : target) {
    if (!schema.find(name)) throw Error(ErrorCode::kConfigError, "size target names unknown table " + name);
  }
  auto sizeOf = [&](const std::string& name) {
    auto it = target.find(name);
    if (it == target.end()) throw Error(ErrorCode::kConfigError, "no size target for table " + name);
    return it->second;
  };
  for (const auto& ts : schema.tables) {
    if (sizeOf(ts.name) == 0) continue;
    for (const auto& fk : ts.foreignKeys) {
      if (sizeOf(fk.references) == 0) {
        throw Error(ErrorCode::kInfeasibleTarget,
                    "table " + ts.name + " needs tuples but references empty table " + fk.references);
      }
    }
  }

  Dataset out(schema);
  for (TableId t = 0; t < schema.tables.size(); ++t) {
    const TableSchema& ts = schema.tables[t];
    const std::size_t n = sizeOf(ts.name);
    const std::size_t ncols = ts.valueColumnCount();
    std::vector<std::size_t> fk_range(ncols, 0);  // 0 = not a foreign key
    for (const auto& fk : ts.foreignKeys) fk_range[*ts.valueColumnIndex(fk.column)] = sizeOf(fk.references);

    const Table& source = d.table(t);
    Rng rng(deriveSeed(seed, ts.name));
    Table& table = out.mutableTable(t);
    table.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      Tuple tuple{static_cast<TupleId>(i + 1), std::vector<Cell>(ncols)};
      for (std::size_t c = 0; c < ncols; ++c) {
        if (fk_range[c] > 0) {
          tuple.cells[c] = static_cast<std::int64_t>(uniformBelow(rng, fk_range[c]) + 1);
        } else if (!source.empty()) {
          tuple.cells[c] = source.rows()[uniformBelow(rng, source.size())].cells[c];
        } else if (ts.valueColumn(c).kind == ColumnKind::kInteger) {
          tuple.cells[c] = std::int64_t{0};
        } else {
          tuple.cells[c] = std::string();
        }
      }
      table.insert(std::move(tuple));
    }
  }
  return out;
}

}  // namespace tweakscale
