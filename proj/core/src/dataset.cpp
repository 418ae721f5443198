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

#include "tweakscale/dataset.hpp"

#include <algorithm>
#include <utility>

#include "tweakscale/error.hpp"

namespace tweakscale {

std::string cellToString(const Cell& c) {
  if (const auto* v = std::get_if<std::int64_t>(&c)) return std::to_string(*v);
  if (const auto* s = std::get_if<std::string>(&c)) return *s;
  return "<empty>";
}

const Tuple* Table::find(TupleId id) const {
  auto it = index_.find(id);
  return it == index_.end() ? nullptr : &rows_[it->second];
}

const Cell& Table::cell(TupleId id, std::size_t column) const {
  const Tuple* t = find(id);
  if (t == nullptr || column >= value_columns_) {
    throw Error(ErrorCode::kMalformedModification,
                "no cell (" + std::to_string(id) + ", " + std::to_string(column) + ")");
  }
  return t->cells[column];
}

bool Table::insert(Tuple tuple) {
  if (index_.contains(tuple.id)) return false;
  insertUnchecked(std::move(tuple));
  return true;
}

void Table::insertUnchecked(Tuple tuple) {
  tuple.cells.resize(value_columns_);
  empty_cells_ += static_cast<std::size_t>(std::count_if(
      tuple.cells.begin(), tuple.cells.end(), [](const Cell& c) { return isEmpty(c); }));
  if (rows_.empty() || rows_.back().id < tuple.id) {
    index_.emplace(tuple.id, rows_.size());
    rows_.push_back(std::move(tuple));
    return;
  }
  auto pos = std::upper_bound(rows_.begin(), rows_.end(), tuple.id,
                              [](TupleId id, const Tuple& t) { return id < t.id; });
  rows_.insert(pos, std::move(tuple));
  reindex();
}

void Table::setCell(TupleId id, std::size_t column, Cell value) {
  auto it = index_.find(id);
  if (it == index_.end() || column >= value_columns_) {
    throw Error(ErrorCode::kMalformedModification,
                "no cell (" + std::to_string(id) + ", " + std::to_string(column) + ")");
  }
  Cell& slot = rows_[it->second].cells[column];
  if (isEmpty(slot)) --empty_cells_;
  if (isEmpty(value)) ++empty_cells_;
  slot = std::move(value);
}

void Table::reindex() {
  index_.clear();
  for (std::size_t i = 0; i < rows_.size(); ++i) index_.emplace(rows_[i].id, i);
}

Dataset::Dataset(DatasetSchema schema) : schema_(std::move(schema)) {
  tables_.reserve(schema_.tables.size());
  for (const auto& t : schema_.tables) tables_.emplace_back(t.valueColumnCount());
}

std::size_t Dataset::emptyCells() const {
  std::size_t total = 0;
  for (const auto& t : tables_) total += t.emptyCells();
  return total;
}

std::unordered_map<std::string, std::size_t> Dataset::sizes() const {
  std::unordered_map<std::string, std::size_t> out;
  for (TableId i = 0; i < tables_.size(); ++i) out[schema_.tables[i].name] = tables_[i].size();
  return out;
}

}  // namespace tweakscale
