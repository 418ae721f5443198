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

#ifndef TWEAKSCALE_SCHEMA_HPP_
#define TWEAKSCALE_SCHEMA_HPP_

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tweakscale {

using TableId = std::size_t;

enum class ColumnKind { kInteger, kText };

struct ColumnSchema {
  std::string name;
  ColumnKind kind = ColumnKind::kInteger;

  bool operator==(const ColumnSchema&) const = default;
};

struct ForeignKey {
  std::string column;
  std::string references;

  bool operator==(const ForeignKey&) const = default;
};

// Cells of a tuple are addressed by "value column" index: the position of a
// column among the declared columns with the primary key removed.
struct TableSchema {
  std::string name;
  std::vector<ColumnSchema> columns;
  std::string primaryKey;
  std::vector<ForeignKey> foreignKeys;

  bool operator==(const TableSchema&) const = default;

  [[nodiscard]] std::size_t valueColumnCount() const { return columns.size() - 1; }
  [[nodiscard]] const ColumnSchema& valueColumn(std::size_t index) const;
  [[nodiscard]] std::optional<std::size_t> valueColumnIndex(std::string_view column) const;
  [[nodiscard]] std::size_t pkPosition() const;
  /// Value-column index of the foreign key that references `table`, if any.
  [[nodiscard]] std::optional<std::size_t> fkTo(std::string_view table) const;
};

/// User/post/response roles for the pairwise feature. Declared, never inferred.
struct PairwiseBinding {
  std::string userTable;
  std::string postTable;
  std::string responseTable;
  std::string postOwnerColumn;
  std::string responsePostColumn;
  std::string responseUserColumn;

  bool operator==(const PairwiseBinding&) const = default;
};

struct DatasetSchema {
  std::vector<TableSchema> tables;
  std::vector<PairwiseBinding> pairwiseBindings;
  bool allowMultipleForeignKeys = false;

  bool operator==(const DatasetSchema&) const = default;

  [[nodiscard]] std::optional<TableId> find(std::string_view name) const;
  [[nodiscard]] TableId id(std::string_view name) const;  // throws SchemaParseError
  [[nodiscard]] const TableSchema& table(std::string_view name) const { return tables[id(name)]; }

  /// Checks every structural invariant; throws Error(kSchemaParseError).
  void validate() const;
};

DatasetSchema parseSchema(std::string_view json_text);
DatasetSchema loadSchema(const std::filesystem::path& path);
std::string schemaToJson(const DatasetSchema& schema);

}  // namespace tweakscale

#endif  // TWEAKSCALE_SCHEMA_HPP_
