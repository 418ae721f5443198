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

#include "builders.hpp"

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "tweakscale/dataset_io.hpp"

namespace tweakscale::testing {

TableSchema makeTable(const std::string& name, std::vector<std::pair<std::string, std::string>> fks,
                      std::vector<std::pair<std::string, ColumnKind>> payload) {
  TableSchema t;
  t.name = name;
  t.primaryKey = "id";
  t.columns.push_back({"id", ColumnKind::kInteger});
  for (const auto& [col, ref] : fks) {
    t.columns.push_back({col, ColumnKind::kInteger});
    t.foreignKeys.push_back({col, ref});
  }
  for (const auto& [col, kind] : payload) t.columns.push_back({col, kind});
  return t;
}

DatasetSchema chainSchema(std::size_t n) {
  DatasetSchema s;
  for (std::size_t i = 0; i < n; ++i) {
    const std::string name = "T" + std::to_string(i);
    if (i == 0) {
      s.tables.push_back(makeTable(name, {}, {{"w", ColumnKind::kInteger}}));
    } else {
      s.tables.push_back(makeTable(name, {{"ref", "T" + std::to_string(i - 1)}}, {{"w", ColumnKind::kInteger}}));
    }
  }
  s.validate();
  return s;
}

DatasetSchema coappearSchema(std::size_t k, std::size_t m) {
  DatasetSchema s;
  for (std::size_t j = 0; j < m; ++j) s.tables.push_back(makeTable("K" + std::to_string(j), {}));
  for (std::size_t i = 0; i < k; ++i) {
    std::vector<std::pair<std::string, std::string>> fks;
    for (std::size_t j = 0; j < m; ++j) fks.emplace_back("k" + std::to_string(j), "K" + std::to_string(j));
    s.tables.push_back(makeTable("A" + std::to_string(i), fks, {{"note", ColumnKind::kText}}));
  }
  s.validate();
  return s;
}

DatasetSchema socialSchema() {
  DatasetSchema s;
  s.tables.push_back(makeTable("users", {}, {{"name", ColumnKind::kText}}));
  s.tables.push_back(makeTable("posts", {{"owner", "users"}}, {{"title", ColumnKind::kText}}));
  s.tables.push_back(makeTable("responses", {{"post", "posts"}, {"user", "users"}}));
  s.pairwiseBindings.push_back({"users", "posts", "responses", "owner", "post", "user"});
  s.validate();
  return s;
}

DatasetSchema overlapSchema() {
  DatasetSchema s;
  s.tables.push_back(makeTable("U", {}, {{"name", ColumnKind::kText}}));
  s.tables.push_back(makeTable("P", {{"owner", "U"}}));
  s.tables.push_back(makeTable("R", {{"post", "P"}, {"user", "U"}}));
  s.tables.push_back(makeTable("L", {{"post", "P"}, {"user", "U"}}));
  s.tables.push_back(makeTable("S", {{"post", "P"}, {"user", "U"}}));
  s.tables.push_back(makeTable("F", {{"user", "U"}}));
  s.pairwiseBindings.push_back({"U", "P", "R", "owner", "post", "user"});
  s.validate();
  return s;
}

void addRow(Dataset& d, const std::string& table, std::initializer_list<Cell> declared) {
  const TableSchema& ts = d.schema().table(table);
  const std::size_t pk = ts.pkPosition();
  Tuple t;
  std::size_t pos = 0;
  for (const Cell& c : declared) {
    if (pos++ == pk) {
      t.id = std::get<std::int64_t>(c);
    } else {
      t.cells.push_back(c);
    }
  }
  d.mutableTable(d.schema().id(table)).insert(std::move(t));
}

std::string renderCsv(const Dataset& d) {
  static std::mt19937_64 salt(std::random_device{}());
  const auto dir = std::filesystem::temp_directory_path() / ("tweakscale-render-" + std::to_string(salt()));
  writeDataset(d, dir);
  std::string out;
  for (const auto& t : d.schema().tables) {
    std::ifstream in(dir / (t.name + ".csv"), std::ios::binary);
    std::stringstream buffer;
    buffer << in.rdbuf();
    out += "== " + t.name + "\n" + buffer.str();
  }
  std::filesystem::remove_all(dir);
  return out;
}

}  // namespace tweakscale::testing
