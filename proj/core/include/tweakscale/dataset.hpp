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

#ifndef TWEAKSCALE_DATASET_HPP_
#define TWEAKSCALE_DATASET_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "tweakscale/schema.hpp"

namespace tweakscale {

using TupleId = std::int64_t;

/// Marker for a cell erased by deleteValues and not yet refilled.
struct Empty {
  bool operator==(const Empty&) const = default;
};

using Cell = std::variant<Empty, std::int64_t, std::string>;

inline bool isEmpty(const Cell& c) { return std::holds_alternative<Empty>(c); }
/// Integer payload of a cell, or nullopt for Empty/text.
inline std::optional<std::int64_t> asInt(const Cell& c) {
  if (const auto* v = std::get_if<std::int64_t>(&c)) return *v;
  return std::nullopt;
}
std::string cellToString(const Cell& c);

struct Tuple {
  TupleId id = 0;
  std::vector<Cell> cells;  // value columns, primary key excluded

  bool operator==(const Tuple&) const = default;
};

/// Tuple store for one table. Rows are kept sorted by primary key; duplicate
/// keys can only enter through insertUnchecked and are reported by
/// validateIntegrity.
class Table {
 public:
  Table() = default;
  explicit Table(std::size_t value_columns) : value_columns_(value_columns) {}

  [[nodiscard]] std::size_t size() const { return rows_.size(); }
  [[nodiscard]] bool empty() const { return rows_.empty(); }
  [[nodiscard]] std::size_t valueColumns() const { return value_columns_; }
  [[nodiscard]] std::span<const Tuple> rows() const { return rows_; }
  [[nodiscard]] const Tuple* find(TupleId id) const;
  [[nodiscard]] bool contains(TupleId id) const { return find(id) != nullptr; }
  [[nodiscard]] TupleId maxId() const { return rows_.empty() ? 0 : rows_.back().id; }
  [[nodiscard]] std::size_t emptyCells() const { return empty_cells_; }
  [[nodiscard]] const Cell& cell(TupleId id, std::size_t column) const;

  /// Returns false if the key already exists.
  bool insert(Tuple tuple);
  void insertUnchecked(Tuple tuple);
  void setCell(TupleId id, std::size_t column, Cell value);
  void reserve(std::size_t n) { rows_.reserve(n); }

  bool operator==(const Table& other) const {
    return value_columns_ == other.value_columns_ && rows_ == other.rows_;
  }

 private:
  void reindex();

  std::size_t value_columns_ = 0;
  std::vector<Tuple> rows_;
  std::unordered_map<TupleId, std::size_t> index_;
  std::size_t empty_cells_ = 0;
};

/// Schema-typed relational dataset. Owned by exactly one pipeline run.
class Dataset {
 public:
  Dataset() = default;
  explicit Dataset(DatasetSchema schema);

  [[nodiscard]] const DatasetSchema& schema() const { return schema_; }
  [[nodiscard]] std::size_t tableCount() const { return tables_.size(); }
  [[nodiscard]] const Table& table(TableId id) const { return tables_.at(id); }
  [[nodiscard]] const Table& table(std::string_view name) const { return tables_.at(schema_.id(name)); }
  Table& mutableTable(TableId id) { return tables_.at(id); }
  [[nodiscard]] std::size_t emptyCells() const;
  [[nodiscard]] std::unordered_map<std::string, std::size_t> sizes() const;

  bool operator==(const Dataset&) const = default;

 private:
  DatasetSchema schema_;
  std::vector<Table> tables_;
};

}  // namespace tweakscale

#endif  // TWEAKSCALE_DATASET_HPP_
