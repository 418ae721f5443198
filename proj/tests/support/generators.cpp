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

#include "generators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "builders.hpp"

namespace tweakscale::testing {

double unit(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::size_t logUniform(Rng& rng, std::size_t lo, std::size_t hi) {
  const double a = std::log(static_cast<double>(lo));
  const double b = std::log(static_cast<double>(hi) + 1.0);
  const auto v = static_cast<std::size_t>(std::exp(a + (b - a) * unit(rng)));
  return std::clamp(v, lo, hi);
}

Dataset randomDataset(const DatasetSchema& schema, const SizeTarget& sizes, std::uint64_t seed, double skew) {
  Rng rng(seed);
  Dataset d(schema);
  for (TableId t = 0; t < schema.tables.size(); ++t) {
    const TableSchema& ts = schema.tables[t];
    const std::size_t n = sizes.at(ts.name);
    const std::size_t ncols = ts.valueColumnCount();
    // Per foreign key column: the pool of keys it may use, hot keys first.
    std::vector<std::vector<std::int64_t>> pools(ncols);
    for (const auto& fk : ts.foreignKeys) {
      const std::size_t refs = sizes.at(fk.references);
      std::vector<std::int64_t> all(refs);
      std::iota(all.begin(), all.end(), 1);
      const double coverage = 0.15 + 0.85 * unit(rng);
      const auto keep = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(coverage * static_cast<double>(refs))));
      pools[*ts.valueColumnIndex(fk.column)] = sample(rng, all, std::min(keep, refs));
    }
    Table& table = d.mutableTable(t);
    table.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      Tuple tuple{static_cast<TupleId>(i + 1), std::vector<Cell>(ncols)};
      for (std::size_t c = 0; c < ncols; ++c) {
        const auto& pool = pools[c];
        if (!pool.empty()) {
          const std::size_t hot = std::max<std::size_t>(1, pool.size() / 20);
          const bool pick_hot = unit(rng) < skew;
          tuple.cells[c] = pool[uniformBelow(rng, pick_hot ? hot : pool.size())];
        } else if (ts.valueColumn(c).kind == ColumnKind::kInteger) {
          tuple.cells[c] = static_cast<std::int64_t>(uniformBelow(rng, 100));
        } else {
          tuple.cells[c] = "s" + std::to_string(uniformBelow(rng, 50));
        }
      }
      table.insert(std::move(tuple));
    }
  }
  return d;
}

namespace {

TupleId randomTuple(const Table& t, Rng& rng) { return t.rows()[uniformBelow(rng, t.size())].id; }

Cell randomValue(const Dataset& d, const TableSchema& ts, std::size_t column, Rng& rng) {
  const std::string& name = ts.valueColumn(column).name;
  for (const auto& fk : ts.foreignKeys) {
    if (fk.column == name) return randomTuple(d.table(fk.references), rng);
  }
  if (ts.valueColumn(column).kind == ColumnKind::kInteger) return static_cast<std::int64_t>(uniformBelow(rng, 100));
  return "e" + std::to_string(uniformBelow(rng, 50));
}

bool referencedNonEmpty(const Dataset& d, const TableSchema& ts) {
  return std::all_of(ts.foreignKeys.begin(), ts.foreignKeys.end(),
                     [&](const ForeignKey& fk) { return !d.table(fk.references).empty(); });
}

}  // namespace

Batch randomBatch(const Dataset& d, Rng& rng) {
  const DatasetSchema& s = d.schema();
  std::vector<TableId> editable;
  std::vector<TableId> appendable;
  for (TableId t = 0; t < s.tables.size(); ++t) {
    if (!d.table(t).empty() && s.tables[t].valueColumnCount() > 0) editable.push_back(t);
    if (referencedNonEmpty(d, s.tables[t])) appendable.push_back(t);
  }
  const std::uint64_t kind = uniformBelow(rng, 10);
  if ((kind == 0 || editable.empty()) && !appendable.empty()) {
    const TableId t = appendable[uniformBelow(rng, appendable.size())];
    AppendTuple a{t, {}, 0};
    for (std::size_t c = 0; c < s.tables[t].valueColumnCount(); ++c) a.values.push_back(randomValue(d, s.tables[t], c, rng));
    return {a};
  }
  if (editable.empty()) return {};
  const TableId t = editable[uniformBelow(rng, editable.size())];
  const TableSchema& ts = s.tables[t];
  const Table& table = d.table(t);
  std::vector<std::size_t> fk_cols;
  for (const auto& fk : ts.foreignKeys) fk_cols.push_back(*ts.valueColumnIndex(fk.column));
  const std::size_t ncols = ts.valueColumnCount();

  std::vector<TupleId> tuples{randomTuple(table, rng)};
  if (table.size() > 1 && uniformBelow(rng, 3) == 0) {
    const TupleId other = randomTuple(table, rng);
    if (other != tuples[0]) tuples.push_back(other);
  }
  if (kind <= 4) {
    // replaceValues on one column (a foreign key when there is one).
    const std::size_t col = !fk_cols.empty() && uniformBelow(rng, 4) != 0 ? fk_cols[uniformBelow(rng, fk_cols.size())]
                                                                          : uniformBelow(rng, ncols);
    return {ReplaceValues{t, tuples, {col}, {randomValue(d, ts, col, rng)}}};
  }
  // deleteValues + insertValues over a random non-empty column subset.
  std::vector<std::size_t> cols;
  for (std::size_t c = 0; c < ncols; ++c) {
    if (uniformBelow(rng, 2) == 0) cols.push_back(c);
  }
  if (cols.empty()) cols.push_back(fk_cols.empty() ? 0 : fk_cols[uniformBelow(rng, fk_cols.size())]);
  InsertValues ins{t, tuples, cols, {}};
  for (std::size_t r = 0; r < tuples.size(); ++r) {
    for (std::size_t c : cols) ins.values.push_back(randomValue(d, ts, c, rng));
  }
  return {DeleteValues{t, tuples, cols}, ins};
}

DatasetSchema randomSchema(Rng& rng) {
  switch (uniformBelow(rng, 4)) {
    case 0: return chainSchema(3 + uniformBelow(rng, 3));
    case 1: return coappearSchema(1 + uniformBelow(rng, 3), 1 + uniformBelow(rng, 2));
    case 2: return socialSchema();
    default: return overlapSchema();
  }
}

SizeTarget randomSizes(const DatasetSchema& schema, Rng& rng, std::size_t lo, std::size_t hi) {
  SizeTarget out;
  for (const auto& t : schema.tables) out[t.name] = lo + uniformBelow(rng, hi - lo + 1);
  return out;
}

}  // namespace tweakscale::testing
