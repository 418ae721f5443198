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

#include "tweakscale/modification.hpp"

#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include "json.hpp"
#include "tweakscale/error.hpp"

namespace tweakscale {
namespace {

using nlohmann::json;

[[noreturn]] void malformed(const std::string& message) {
  throw Error(ErrorCode::kMalformedModification, message);
}

// Current view of the dataset with a batch's earlier edits layered on top.
class Overlay {
 public:
  explicit Overlay(const Dataset& d) : d_(d) {}

  [[nodiscard]] bool exists(TableId t, TupleId id) const {
    return d_.table(t).contains(id) || appended_.contains({t, id});
  }

  [[nodiscard]] const Cell& get(TableId t, TupleId id, std::size_t col) const {
    if (auto it = cells_.find({t, id, col}); it != cells_.end()) return it->second;
    if (auto it = appended_.find({t, id}); it != appended_.end()) return it->second[col];
    return d_.table(t).cell(id, col);
  }

  void set(TableId t, TupleId id, std::size_t col, Cell v) { cells_[{t, id, col}] = std::move(v); }

  TupleId append(TableId t, std::vector<Cell> cells) {
    TupleId next = d_.table(t).maxId() + 1;
    if (auto it = next_.find(t); it != next_.end()) next = it->second;
    next_[t] = next + 1;
    appended_.emplace(std::make_pair(t, next), std::move(cells));
    return next;
  }

 private:
  const Dataset& d_;
  std::map<std::tuple<TableId, TupleId, std::size_t>, Cell> cells_;
  std::map<std::pair<TableId, TupleId>, std::vector<Cell>> appended_;
  std::map<TableId, TupleId> next_;
};

std::optional<TableId> fkTarget(const DatasetSchema& schema, TableId t, std::size_t col) {
  const TableSchema& ts = schema.tables[t];
  for (const auto& fk : ts.foreignKeys) {
    if (*ts.valueColumnIndex(fk.column) == col) return schema.id(fk.references);
  }
  return std::nullopt;
}

void checkValue(const Overlay& view, const DatasetSchema& schema, TableId t, std::size_t col,
                const Cell& v) {
  const ColumnSchema& cs = schema.tables[t].valueColumn(col);
  if (isEmpty(v)) malformed("cannot write Empty into " + schema.tables[t].name + "." + cs.name);
  const bool is_int = std::holds_alternative<std::int64_t>(v);
  if (is_int != (cs.kind == ColumnKind::kInteger)) {
    malformed("value kind does not match column " + schema.tables[t].name + "." + cs.name);
  }
  if (auto ref = fkTarget(schema, t, col)) {
    if (!view.exists(*ref, std::get<std::int64_t>(v))) {
      malformed(schema.tables[t].name + "." + cs.name + "=" + cellToString(v) + " references no tuple in " +
                schema.tables[*ref].name);
    }
  }
}

void checkTarget(const Dataset& d, const Overlay& view, TableId t, const std::vector<TupleId>& tuples,
                 const std::vector<std::size_t>& columns) {
  if (t >= d.tableCount()) malformed("table index out of range");
  if (tuples.empty() || columns.empty()) malformed("modification must name tuples and columns");
  if (std::set<TupleId>(tuples.begin(), tuples.end()).size() != tuples.size()) malformed("repeated tuple id");
  if (std::set<std::size_t>(columns.begin(), columns.end()).size() != columns.size()) {
    malformed("repeated column index");
  }
  for (std::size_t c : columns) {
    if (c >= d.table(t).valueColumns()) malformed("column index " + std::to_string(c) + " out of range");
  }
  for (TupleId id : tuples) {
    if (!view.exists(t, id)) {
      malformed("no tuple " + std::to_string(id) + " in " + d.schema().tables[t].name);
    }
  }
}

json cellJson(const Cell& c) {
  if (const auto* v = std::get_if<std::int64_t>(&c)) return *v;
  if (const auto* s = std::get_if<std::string>(&c)) return *s;
  return nullptr;
}

Cell jsonCell(const json& j) {
  if (j.is_number_integer()) return j.get<std::int64_t>();
  if (j.is_string()) return j.get<std::string>();
  if (j.is_null()) return Empty{};
  malformed("journal value must be an integer, a string or null");
}

}  // namespace

EditList resolve(const Dataset& d, Batch& batch) {
  const DatasetSchema& schema = d.schema();
  Overlay view(d);
  EditList edits;
  for (Modification& m : batch) {
    if (auto* del = std::get_if<DeleteValues>(&m)) {
      checkTarget(d, view, del->table, del->tuples, del->columns);
      for (TupleId id : del->tuples) {
        for (std::size_t c : del->columns) {
          const Cell& before = view.get(del->table, id, c);
          if (isEmpty(before)) malformed("deleteValues on an already empty cell");
          edits.push_back({CellEdit::Kind::kSet, del->table, id, c, before, Empty{}, {}});
          view.set(del->table, id, c, Empty{});
        }
      }
    } else if (auto* ins = std::get_if<InsertValues>(&m)) {
      checkTarget(d, view, ins->table, ins->tuples, ins->columns);
      const std::size_t nc = ins->columns.size();
      const bool shared = ins->values.size() == nc;
      if (!shared && ins->values.size() != nc * ins->tuples.size()) {
        malformed("insertValues needs one value per column or per cell");
      }
      for (std::size_t r = 0; r < ins->tuples.size(); ++r) {
        for (std::size_t k = 0; k < nc; ++k) {
          const TupleId id = ins->tuples[r];
          const std::size_t c = ins->columns[k];
          const Cell& v = ins->values[shared ? k : r * nc + k];
          if (!isEmpty(view.get(ins->table, id, c))) malformed("insertValues targets a non-empty cell");
          checkValue(view, schema, ins->table, c, v);
          edits.push_back({CellEdit::Kind::kSet, ins->table, id, c, Empty{}, v, {}});
          view.set(ins->table, id, c, v);
        }
      }
    } else if (auto* rep = std::get_if<ReplaceValues>(&m)) {
      checkTarget(d, view, rep->table, rep->tuples, rep->columns);
      if (rep->values.size() != rep->columns.size()) malformed("replaceValues needs one value per column");
      for (TupleId id : rep->tuples) {
        for (std::size_t k = 0; k < rep->columns.size(); ++k) {
          const std::size_t c = rep->columns[k];
          const Cell& before = view.get(rep->table, id, c);
          if (isEmpty(before)) malformed("replaceValues targets an empty cell");
          checkValue(view, schema, rep->table, c, rep->values[k]);
          edits.push_back({CellEdit::Kind::kSet, rep->table, id, c, before, rep->values[k], {}});
          view.set(rep->table, id, c, rep->values[k]);
        }
      }
    } else {
      auto& app = std::get<AppendTuple>(m);
      if (app.table >= d.tableCount()) malformed("table index out of range");
      if (app.values.size() != d.table(app.table).valueColumns()) {
        malformed("appendTuple needs a value for every non-key column");
      }
      for (std::size_t c = 0; c < app.values.size(); ++c) checkValue(view, schema, app.table, c, app.values[c]);
      app.assigned = view.append(app.table, app.values);
      CellEdit e;
      e.kind = CellEdit::Kind::kAppend;
      e.table = app.table;
      e.tuple = app.assigned;
      e.cells = app.values;
      edits.push_back(std::move(e));
    }
  }
  return edits;
}

void applyEdits(Dataset& d, const EditList& edits) {
  for (const CellEdit& e : edits) {
    switch (e.kind) {
      case CellEdit::Kind::kSet:
        d.mutableTable(e.table).setCell(e.tuple, e.column, e.after);
        break;
      case CellEdit::Kind::kAppend:
        if (!d.mutableTable(e.table).insert(Tuple{e.tuple, e.cells})) {
          malformed("appended primary key already exists");
        }
        break;
      case CellEdit::Kind::kRemove:
        malformed("tuple removal is not a dataset operation");
    }
  }
}

EditList invert(const EditList& edits) {
  EditList out;
  out.reserve(edits.size());
  for (auto it = edits.rbegin(); it != edits.rend(); ++it) {
    CellEdit e = *it;
    switch (e.kind) {
      case CellEdit::Kind::kSet:
        std::swap(e.before, e.after);
        break;
      case CellEdit::Kind::kAppend:
        e.kind = CellEdit::Kind::kRemove;
        break;
      case CellEdit::Kind::kRemove:
        e.kind = CellEdit::Kind::kAppend;
        break;
    }
    out.push_back(std::move(e));
  }
  return out;
}

CellCounts countCells(const Batch& batch) {
  CellCounts counts;
  for (const Modification& m : batch) {
    if (const auto* del = std::get_if<DeleteValues>(&m)) {
      counts.deleted += del->tuples.size() * del->columns.size();
    } else if (const auto* ins = std::get_if<InsertValues>(&m)) {
      counts.inserted += ins->tuples.size() * ins->columns.size();
    } else if (std::holds_alternative<AppendTuple>(m)) {
      ++counts.appended;
    }
  }
  return counts;
}

std::string_view opName(const Modification& m) {
  static constexpr std::string_view kNames[] = {"deleteValues", "insertValues", "replaceValues", "appendTuple"};
  return kNames[m.index()];
}

TableId tableOf(const Modification& m) {
  return std::visit([](const auto& v) { return v.table; }, m);
}

std::string journalLine(const DatasetSchema& schema, const JournalRecord& record) {
  json j;
  j["op"] = opName(record.mod);
  j["tableID"] = schema.tables.at(tableOf(record.mod)).name;
  json tuples = json::array();
  json columns = json::array();
  json values = json::array();
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, AppendTuple>) {
          tuples.push_back(m.assigned);
          for (std::size_t c = 0; c < m.values.size(); ++c) columns.push_back(c);
        } else {
          for (TupleId id : m.tuples) tuples.push_back(id);
          for (std::size_t c : m.columns) columns.push_back(c);
        }
        if constexpr (!std::is_same_v<T, DeleteValues>) {
          for (const Cell& v : m.values) values.push_back(cellJson(v));
        }
      },
      record.mod);
  j["tupleIDs"] = std::move(tuples);
  j["colIndexes"] = std::move(columns);
  j["values"] = std::move(values);
  j["toolName"] = record.tool;
  j["step"] = record.step;
  return j.dump();
}

JournalRecord parseJournalLine(const DatasetSchema& schema, std::string_view line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::exception& e) {
    malformed(std::string("journal line is not valid JSON: ") + e.what());
  }
  JournalRecord rec;
  try {
    const auto table_name = j.at("tableID").get<std::string>();
    auto table = schema.find(table_name);
    if (!table) malformed("journal names unknown table " + table_name);
    const auto op = j.at("op").get<std::string>();
    const auto tuples = j.at("tupleIDs").get<std::vector<TupleId>>();
    const auto columns = j.at("colIndexes").get<std::vector<std::size_t>>();
    std::vector<Cell> values;
    for (const auto& v : j.at("values")) values.push_back(jsonCell(v));
    if (op == "deleteValues") {
      rec.mod = DeleteValues{*table, tuples, columns};
    } else if (op == "insertValues") {
      rec.mod = InsertValues{*table, tuples, columns, values};
    } else if (op == "replaceValues") {
      rec.mod = ReplaceValues{*table, tuples, columns, values};
    } else if (op == "appendTuple") {
      if (tuples.size() != 1) malformed("appendTuple record needs exactly one tuple id");
      rec.mod = AppendTuple{*table, values, tuples.front()};
    } else {
      malformed("unknown journal op " + op);
    }
    rec.tool = j.at("toolName").get<std::string>();
    rec.step = j.at("step").get<std::size_t>();
  } catch (const json::exception& e) {
    malformed(std::string("journal record is incomplete: ") + e.what());
  }
  return rec;
}

Dataset replayJournal(Dataset initial, const std::vector<JournalRecord>& journal) {
  for (const JournalRecord& rec : journal) {
    Batch batch{rec.mod};
    const TupleId expected = std::holds_alternative<AppendTuple>(rec.mod) ? std::get<AppendTuple>(rec.mod).assigned : 0;
    EditList edits = resolve(initial, batch);
    if (expected != 0 && std::get<AppendTuple>(batch.front()).assigned != expected) {
      malformed("replayed appendTuple received a different primary key");
    }
    applyEdits(initial, edits);
  }
  return initial;
}

Dataset replayJournal(Dataset initial, std::istream& journal) {
  std::vector<JournalRecord> records;
  std::string line;
  while (std::getline(journal, line)) {
    if (!line.empty()) records.push_back(parseJournalLine(initial.schema(), line));
  }
  return replayJournal(std::move(initial), records);
}

}  // namespace tweakscale
