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

#include "tweakscale/dataset_io.hpp"

#include <charconv>
#include <fstream>
#include <unordered_map>
#include <unordered_set>

#include "tweakscale/csv.hpp"

namespace tweakscale {
namespace {

std::optional<std::int64_t> parseInt(const std::string& s) {
  std::int64_t v = 0;
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end || s.empty()) return std::nullopt;
  return v;
}

std::string rowRef(const std::string& table, std::size_t line) {
  return table + ".csv line " + std::to_string(line);
}

Table readTable(const TableSchema& ts, const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error(ErrorCode::kMissingTableFile, "missing data file for table " + ts.name + ": " + file.string());
  std::vector<csv::Record> records = csv::read(in);
  if (records.empty()) throw Error(ErrorCode::kSchemaParseError, ts.name + ".csv has no header row");

  // Map header positions onto declared column positions.
  const csv::Record& header = records.front();
  if (header.size() != ts.columns.size()) {
    throw Error(ErrorCode::kSchemaParseError, ts.name + ".csv header does not match the declared columns");
  }
  std::vector<std::size_t> source(ts.columns.size());
  for (std::size_t c = 0; c < ts.columns.size(); ++c) {
    bool found = false;
    for (std::size_t h = 0; h < header.size(); ++h) {
      if (header[h] == ts.columns[c].name) {
        source[c] = h;
        found = true;
      }
    }
    if (!found) {
      throw Error(ErrorCode::kSchemaParseError, ts.name + ".csv lacks column '" + ts.columns[c].name + "'");
    }
  }

  const std::size_t pk = ts.pkPosition();
  Table table(ts.valueColumnCount());
  table.reserve(records.size() - 1);
  for (std::size_t r = 1; r < records.size(); ++r) {
    const csv::Record& rec = records[r];
    if (rec.size() == 1 && rec[0].empty()) continue;  // blank line
    if (rec.size() != header.size()) {
      throw Error(ErrorCode::kSchemaParseError, rowRef(ts.name, r + 1) + ": wrong field count");
    }
    Tuple t;
    t.cells.reserve(ts.valueColumnCount());
    for (std::size_t c = 0; c < ts.columns.size(); ++c) {
      const std::string& raw = rec[source[c]];
      Cell cell;
      if (ts.columns[c].kind == ColumnKind::kInteger) {
        auto v = parseInt(raw);
        if (!v) {
          throw Error(ErrorCode::kSchemaParseError,
                      rowRef(ts.name, r + 1) + ": column " + ts.columns[c].name + " is not an integer");
        }
        cell = *v;
      } else {
        cell = raw;
      }
      if (c == pk) {
        t.id = std::get<std::int64_t>(cell);
      } else {
        t.cells.push_back(std::move(cell));
      }
    }
    const TupleId id = t.id;
    if (!table.insert(std::move(t))) {
      throw Error(ErrorCode::kDuplicatePrimaryKey,
                  rowRef(ts.name, r + 1) + ": duplicate primary key " + std::to_string(id));
    }
  }
  return table;
}

}  // namespace

Dataset loadDataset(const DatasetSchema& schema, const std::filesystem::path& data_dir) {
  schema.validate();
  Dataset d(schema);
  for (TableId i = 0; i < schema.tables.size(); ++i) {
    const TableSchema& ts = schema.tables[i];
    d.mutableTable(i) = readTable(ts, data_dir / (ts.name + ".csv"));
  }
  IntegrityReport report = validateIntegrity(d);
  if (!report.ok()) {
    const IntegrityViolation& v = report.violations.front();
    throw Error(v.code, "table " + v.table + " tuple " + std::to_string(v.tuple) + ": " + v.detail);
  }
  return d;
}

Dataset loadDataset(const std::filesystem::path& schema_path, const std::filesystem::path& data_dir) {
  return loadDataset(loadSchema(schema_path), data_dir);
}

void writeDataset(const Dataset& d, const std::filesystem::path& dir) {
  if (d.emptyCells() != 0) {
    throw Error(ErrorCode::kPendingEmptyCells,
                "dataset has " + std::to_string(d.emptyCells()) + " empty cells awaiting insertValues");
  }
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIoFailure, "cannot create " + dir.string() + ": " + ec.message());

  const DatasetSchema& schema = d.schema();
  for (TableId i = 0; i < schema.tables.size(); ++i) {
    const TableSchema& ts = schema.tables[i];
    const std::filesystem::path file = dir / (ts.name + ".csv");
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIoFailure, "cannot write " + file.string());

    csv::Record header;
    for (const auto& c : ts.columns) header.push_back(c.name);
    csv::writeRecord(out, header);

    const std::size_t pk = ts.pkPosition();
    csv::Record rec(ts.columns.size());
    for (const Tuple& t : d.table(i).rows()) {
      for (std::size_t c = 0, v = 0; c < ts.columns.size(); ++c) {
        rec[c] = c == pk ? std::to_string(t.id) : cellToString(t.cells[v++]);
      }
      csv::writeRecord(out, rec);
    }
    if (!out) throw Error(ErrorCode::kIoFailure, "write failed for " + file.string());
  }
}

IntegrityReport validateIntegrity(const Dataset& d) {
  IntegrityReport report;
  const DatasetSchema& schema = d.schema();
  for (TableId i = 0; i < schema.tables.size(); ++i) {
    const TableSchema& ts = schema.tables[i];
    const Table& table = d.table(i);

    std::unordered_map<TupleId, std::size_t> seen;
    for (const Tuple& t : table.rows()) {
      if (++seen[t.id] == 2) {
        report.violations.push_back({ErrorCode::kDuplicatePrimaryKey, ts.name, t.id,
                                     "primary key " + std::to_string(t.id) + " appears more than once"});
      }
    }

    for (const ForeignKey& fk : ts.foreignKeys) {
      const std::size_t col = *ts.valueColumnIndex(fk.column);
      const Table& referenced = d.table(fk.references);
      for (const Tuple& t : table.rows()) {
        auto v = asInt(t.cells[col]);
        if (v && !referenced.contains(*v)) {
          report.violations.push_back({ErrorCode::kDanglingForeignKey, ts.name, t.id,
                                       fk.column + "=" + std::to_string(*v) + " has no match in " +
                                           fk.references});
        }
      }
    }
  }
  return report;
}

}  // namespace tweakscale
