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

#ifndef TWEAKSCALE_MODIFICATION_HPP_
#define TWEAKSCALE_MODIFICATION_HPP_

#include <cstddef>
#include <istream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "tweakscale/dataset.hpp"

namespace tweakscale {

/// Erases the given value columns of every listed tuple.
struct DeleteValues {
  TableId table = 0;
  std::vector<TupleId> tuples;
  std::vector<std::size_t> columns;
};

/// Fills Empty cells. `values` holds either one value per column, shared by
/// all tuples, or one per (tuple, column) pair in row-major order.
struct InsertValues {
  TableId table = 0;
  std::vector<TupleId> tuples;
  std::vector<std::size_t> columns;
  std::vector<Cell> values;
};

/// Overwrites non-Empty cells; every listed tuple receives `values`.
struct ReplaceValues {
  TableId table = 0;
  std::vector<TupleId> tuples;
  std::vector<std::size_t> columns;
  std::vector<Cell> values;
};

/// Adds a tuple with the next free primary key. `values` covers every value
/// column. `assigned` is filled in when the modification is resolved.
struct AppendTuple {
  TableId table = 0;
  std::vector<Cell> values;
  TupleId assigned = 0;
};

using Modification = std::variant<DeleteValues, InsertValues, ReplaceValues, AppendTuple>;
using Batch = std::vector<Modification>;

/// Cell-level effect of a modification. kRemove only appears in inverses.
struct CellEdit {
  enum class Kind { kSet, kAppend, kRemove };
  Kind kind = Kind::kSet;
  TableId table = 0;
  TupleId tuple = 0;
  std::size_t column = 0;
  Cell before;
  Cell after;
  std::vector<Cell> cells;  // full value cells for kAppend / kRemove
};
using EditList = std::vector<CellEdit>;

/// Checks `batch` against `d` and expands it into cell edits, applying the
/// batch's own earlier edits as an overlay. Fills AppendTuple::assigned.
/// Throws Error(kMalformedModification).
EditList resolve(const Dataset& d, Batch& batch);

/// Mutates `d`. kRemove is rejected.
void applyEdits(Dataset& d, const EditList& edits);

/// Edits that undo `edits` when applied after them.
EditList invert(const EditList& edits);

struct CellCounts {
  std::size_t deleted = 0;
  std::size_t inserted = 0;
  std::size_t appended = 0;
};
CellCounts countCells(const Batch& batch);

std::string_view opName(const Modification& m);
TableId tableOf(const Modification& m);

struct JournalRecord {
  Modification mod;
  std::string tool;
  std::size_t step = 0;
};

/// One line of newline-delimited JSON, without the trailing newline.
std::string journalLine(const DatasetSchema& schema, const JournalRecord& record);
JournalRecord parseJournalLine(const DatasetSchema& schema, std::string_view line);

/// Re-applies journal records to `initial`; returns the resulting dataset.
Dataset replayJournal(Dataset initial, std::istream& journal);
Dataset replayJournal(Dataset initial, const std::vector<JournalRecord>& journal);

}  // namespace tweakscale

#endif  // TWEAKSCALE_MODIFICATION_HPP_
