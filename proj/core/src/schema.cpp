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

#include "tweakscale/schema.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <utility>

#include "json.hpp"
#include "tweakscale/error.hpp"

namespace tweakscale {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& message) {
  throw Error(ErrorCode::kSchemaParseError, message);
}

std::string requireString(const json& node, const char* key, const std::string& where) {
  if (!node.is_object() || !node.contains(key) || !node.at(key).is_string()) {
    fail(where + ": missing string field '" + key + "'");
  }
  return node.at(key).get<std::string>();
}

}  // namespace

const ColumnSchema& TableSchema::valueColumn(std::size_t index) const {
  const std::size_t pk = pkPosition();
  return columns[index < pk ? index : index + 1];
}

std::size_t TableSchema::pkPosition() const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i].name == primaryKey) return i;
  }
  fail("table " + name + ": primary key '" + primaryKey + "' is not a declared column");
}

std::optional<std::size_t> TableSchema::valueColumnIndex(std::string_view column) const {
  const std::size_t pk = pkPosition();
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (i == pk) continue;
    if (columns[i].name == column) return i < pk ? i : i - 1;
  }
  return std::nullopt;
}

std::optional<std::size_t> TableSchema::fkTo(std::string_view table) const {
  for (const auto& fk : foreignKeys) {
    if (fk.references == table) return valueColumnIndex(fk.column);
  }
  return std::nullopt;
}

std::optional<TableId> DatasetSchema::find(std::string_view name) const {
  for (TableId i = 0; i < tables.size(); ++i) {
    if (tables[i].name == name) return i;
  }
  return std::nullopt;
}

TableId DatasetSchema::id(std::string_view name) const {
  if (auto found = find(name)) return *found;
  fail("unknown table '" + std::string(name) + "'");
}

void DatasetSchema::validate() const {
  std::set<std::string> names;
  for (const auto& t : tables) {
    if (t.name.empty()) fail("table with empty name");
    if (!names.insert(t.name).second) fail("duplicate table name '" + t.name + "'");
  }
  for (const auto& t : tables) {
    std::set<std::string> columns;
    for (const auto& c : t.columns) {
      if (!columns.insert(c.name).second) {
        fail("table " + t.name + ": duplicate column '" + c.name + "'");
      }
    }
    const std::size_t pk = t.pkPosition();
    if (t.columns[pk].kind != ColumnKind::kInteger) {
      fail("table " + t.name + ": primary key must be an integer column");
    }
    std::set<std::string> referenced;
    std::set<std::string> fk_columns;
    for (const auto& fk : t.foreignKeys) {
      if (!columns.contains(fk.column)) {
        fail("table " + t.name + ": foreign key column '" + fk.column + "' is not declared");
      }
      if (fk.column == t.primaryKey) {
        fail("table " + t.name + ": foreign key column '" + fk.column + "' is the primary key");
      }
      if (!fk_columns.insert(fk.column).second) {
        fail("table " + t.name + ": column '" + fk.column + "' used by two foreign keys");
      }
      if (!names.contains(fk.references)) {
        fail("table " + t.name + ": foreign key references unknown table '" + fk.references + "'");
      }
      if (t.valueColumn(*t.valueColumnIndex(fk.column)).kind != ColumnKind::kInteger) {
        fail("table " + t.name + ": foreign key column '" + fk.column + "' must be integer");
      }
      if (!referenced.insert(fk.references).second && !allowMultipleForeignKeys) {
        fail("table " + t.name + ": more than one foreign key to table '" + fk.references + "'");
      }
    }
  }
  for (const auto& b : pairwiseBindings) {
    const std::string where = "pairwise binding " + b.responseTable;
    for (const auto* n : {&b.userTable, &b.postTable, &b.responseTable}) {
      if (!names.contains(*n)) fail(where + ": unknown table '" + *n + "'");
    }
    auto references = [&](const std::string& table, const std::string& column,
                          const std::string& target) {
      for (const auto& fk : this->table(table).foreignKeys) {
        if (fk.column == column && fk.references == target) return true;
      }
      return false;
    };
    if (!references(b.postTable, b.postOwnerColumn, b.userTable)) {
      fail(where + ": post owner column must reference the user table");
    }
    if (!references(b.responseTable, b.responsePostColumn, b.postTable)) {
      fail(where + ": response post column must reference the post table");
    }
    if (!references(b.responseTable, b.responseUserColumn, b.userTable)) {
      fail(where + ": response user column must reference the user table");
    }
  }
}

DatasetSchema parseSchema(std::string_view json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    fail(std::string("schema is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) fail("schema root must be an object");

  DatasetSchema schema;
  if (root.contains("allowMultipleForeignKeys")) {
    schema.allowMultipleForeignKeys = root.at("allowMultipleForeignKeys").get<bool>();
  }
  if (root.contains("tables")) {
    if (!root.at("tables").is_array()) fail("'tables' must be an array");
    for (const auto& t : root.at("tables")) {
      TableSchema table;
      table.name = requireString(t, "name", "table");
      const std::string where = "table " + table.name;
      if (!t.contains("columns") || !t.at("columns").is_array()) {
        fail(where + ": missing 'columns' array");
      }
      for (const auto& c : t.at("columns")) {
        ColumnSchema column;
        column.name = requireString(c, "name", where + " column");
        const std::string kind = requireString(c, "kind", where + " column " + column.name);
        if (kind == "integer") {
          column.kind = ColumnKind::kInteger;
        } else if (kind == "text") {
          column.kind = ColumnKind::kText;
        } else {
          fail(where + ": column " + column.name + " has unknown kind '" + kind + "'");
        }
        table.columns.push_back(std::move(column));
      }
      table.primaryKey = requireString(t, "primaryKey", where);
      if (t.contains("foreignKeys")) {
        for (const auto& fk : t.at("foreignKeys")) {
          table.foreignKeys.push_back(
              {requireString(fk, "column", where + " foreign key"),
               requireString(fk, "references", where + " foreign key")});
        }
      }
      schema.tables.push_back(std::move(table));
    }
  }
  if (root.contains("pairwiseBindings")) {
    for (const auto& b : root.at("pairwiseBindings")) {
      PairwiseBinding binding;
      binding.userTable = requireString(b, "userTable", "pairwise binding");
      binding.postTable = requireString(b, "postTable", "pairwise binding");
      binding.responseTable = requireString(b, "responseTable", "pairwise binding");
      binding.postOwnerColumn = requireString(b, "postOwnerColumn", "pairwise binding");
      binding.responsePostColumn = requireString(b, "responsePostColumn", "pairwise binding");
      binding.responseUserColumn = requireString(b, "responseUserColumn", "pairwise binding");
      schema.pairwiseBindings.push_back(std::move(binding));
    }
  }
  schema.validate();
  return schema;
}

DatasetSchema loadSchema(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open schema file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parseSchema(buffer.str());
}

std::string schemaToJson(const DatasetSchema& schema) {
  json root = json::object();
  json tables = json::array();
  for (const auto& t : schema.tables) {
    json columns = json::array();
    for (const auto& c : t.columns) {
      columns.push_back({{"name", c.name},
                         {"kind", c.kind == ColumnKind::kInteger ? "integer" : "text"}});
    }
    json fks = json::array();
    for (const auto& fk : t.foreignKeys) {
      fks.push_back({{"column", fk.column}, {"references", fk.references}});
    }
    tables.push_back({{"name", t.name},
                      {"columns", columns},
                      {"primaryKey", t.primaryKey},
                      {"foreignKeys", fks}});
  }
  json bindings = json::array();
  for (const auto& b : schema.pairwiseBindings) {
    bindings.push_back({{"userTable", b.userTable},
                        {"postTable", b.postTable},
                        {"responseTable", b.responseTable},
                        {"postOwnerColumn", b.postOwnerColumn},
                        {"responsePostColumn", b.responsePostColumn},
                        {"responseUserColumn", b.responseUserColumn}});
  }
  root["tables"] = tables;
  root["pairwiseBindings"] = bindings;
  if (schema.allowMultipleForeignKeys) root["allowMultipleForeignKeys"] = true;
  return root.dump(2);
}

}  // namespace tweakscale
