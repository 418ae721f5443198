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

#include <gtest/gtest.h>

#include <algorithm>
#include <sstream>

#include "builders.hpp"
#include "fixtures.hpp"
#include "generators.hpp"
#include "test_util.hpp"
#include "tweakscale/chains.hpp"
#include "tweakscale/csv.hpp"
#include "tweakscale/dataset_io.hpp"
#include "tweakscale/error.hpp"

namespace tweakscale::testing {
namespace {

TEST(LoadDataset, EmptySchemaAndDirectoryGiveEmptyDataset) {
  TempDir dir;
  writeText(dir.path() / "schema.json", R"({"tables":[]})");
  const Dataset d = loadDataset(dir.path() / "schema.json", dir.path());
  EXPECT_EQ(d.tableCount(), 0U);
}

TEST(LoadDataset, LinearSampleKeepsDirectReferences) {
  TempDir dir;
  const Dataset fig = linearSample();
  writeText(dir.path() / "schema.json", schemaToJson(fig.schema()));
  writeDataset(fig, dir.path());
  const Dataset d = loadDataset(dir.path() / "schema.json", dir.path());
  const Table& b = d.table("TB");
  std::vector<TupleId> referencing_a2;
  for (const Tuple& t : b.rows()) {
    if (std::get<std::int64_t>(t.cells[0]) == 2) referencing_a2.push_back(t.id);
  }
  EXPECT_EQ(referencing_a2, (std::vector<TupleId>{2, 3}));
}

TEST(LoadDataset, RandomThreeTableRoundTrip) {
  Rng rng(7);
  const DatasetSchema s = chainSchema(3);
  const Dataset d = randomDataset(s, randomSizes(s, rng, 20, 60), 11);
  TempDir dir;
  writeDataset(d, dir.path());
  EXPECT_EQ(loadDataset(s, dir.path()), d);
}

TEST(LoadDataset, TextFieldsWithDelimitersRoundTrip) {
  Dataset d(socialSchema());
  addRow(d, "users", {std::int64_t{1}, std::string("comma, \"quote\"\nnewline")});
  addRow(d, "users", {std::int64_t{2}, std::string("")});
  TempDir dir;
  writeDataset(d, dir.path());
  EXPECT_EQ(loadDataset(d.schema(), dir.path()), d);
}

TEST(LoadDataset, ReportsMissingFile) {
  TempDir dir;
  EXPECT_EQ(codeOf([&] { (void)loadDataset(chainSchema(2), dir.path()); }), ErrorCode::kMissingTableFile);
}

TEST(LoadDataset, ReportsDuplicateKey) {
  TempDir dir;
  writeText(dir.path() / "T0.csv", "id,w\n1,5\n1,6\n");
  writeText(dir.path() / "T1.csv", "id,ref,w\n");
  EXPECT_EQ(codeOf([&] { (void)loadDataset(chainSchema(2), dir.path()); }), ErrorCode::kDuplicatePrimaryKey);
}

TEST(LoadDataset, ReportsDanglingKey) {
  TempDir dir;
  writeText(dir.path() / "T0.csv", "id,w\n1,5\n");
  writeText(dir.path() / "T1.csv", "id,ref,w\n1,2,0\n");
  EXPECT_EQ(codeOf([&] { (void)loadDataset(chainSchema(2), dir.path()); }), ErrorCode::kDanglingForeignKey);
}

TEST(LoadDataset, ReportsMalformedSchema) {
  TempDir dir;
  writeText(dir.path() / "schema.json", R"({"tables":[{"name":"A","columns":[{"name":"id","kind":"float"}],"primaryKey":"id"}]})");
  EXPECT_EQ(codeOf([&] { (void)loadDataset(dir.path() / "schema.json", dir.path()); }),
            ErrorCode::kSchemaParseError);
  EXPECT_EQ(codeOf([] { (void)parseSchema("{not json"); }), ErrorCode::kSchemaParseError);
}

TEST(Schema, RejectsSecondForeignKeyToSameTableUnlessAllowed) {
  DatasetSchema s;
  s.tables.push_back(makeTable("A", {}));
  s.tables.push_back(makeTable("B", {{"x", "A"}, {"y", "A"}}));
  EXPECT_EQ(codeOf([&] { s.validate(); }), ErrorCode::kSchemaParseError);
  s.allowMultipleForeignKeys = true;
  EXPECT_NO_THROW(s.validate());
}

TEST(Schema, JsonRoundTrip) {
  const DatasetSchema s = overlapSchema();
  EXPECT_EQ(parseSchema(schemaToJson(s)), s);
}

TEST(ValidateIntegrity, FreshDatasetIsClean) { EXPECT_TRUE(validateIntegrity(linearSample()).ok()); }

TEST(ValidateIntegrity, FlagsDanglingReference) {
  Dataset d = linearSample();
  d.mutableTable(d.schema().id("TB")).setCell(1, 0, std::int64_t{99});
  const IntegrityReport r = validateIntegrity(d);
  ASSERT_EQ(r.violations.size(), 1U);
  EXPECT_EQ(r.violations[0].code, ErrorCode::kDanglingForeignKey);
  EXPECT_EQ(r.violations[0].table, "TB");
  EXPECT_EQ(r.violations[0].tuple, 1);
}

TEST(ValidateIntegrity, FlagsDuplicateKey) {
  Dataset d = linearSample();
  d.mutableTable(d.schema().id("TA")).insertUnchecked(Tuple{2, {}});
  const IntegrityReport r = validateIntegrity(d);
  ASSERT_EQ(r.violations.size(), 1U);
  EXPECT_EQ(r.violations[0].code, ErrorCode::kDuplicatePrimaryKey);
}

TEST(MaximalChains, SingleTableHasNone) { EXPECT_TRUE(enumerateMaximalChains(chainSchema(1)).empty()); }

TEST(MaximalChains, FourTableChainIsOneChain) {
  const auto chains = enumerateMaximalChains(linearSample().schema());
  ASSERT_EQ(chains.size(), 1U);
  EXPECT_EQ(chains[0].tables, (std::vector<std::string>{"TD", "TC", "TB", "TA"}));
  EXPECT_EQ(chains[0].fkColumns, (std::vector<std::string>{"c", "b", "a"}));
}

DatasetSchema diamond(bool reversed) {
  DatasetSchema s;
  s.tables = {makeTable("A", {}), makeTable("B", {{"a", "A"}}), makeTable("C", {{"a", "A"}}),
              makeTable("D", {{"b", "B"}, {"c", "C"}})};
  if (reversed) std::reverse(s.tables.begin(), s.tables.end());
  s.validate();
  return s;
}

TEST(MaximalChains, DiamondMatchesPathEnumeration) {
  const auto chains = enumerateMaximalChains(diamond(false));
  ASSERT_EQ(chains.size(), 2U);
  EXPECT_EQ(chains[0].tables, (std::vector<std::string>{"D", "B", "A"}));
  EXPECT_EQ(chains[1].tables, (std::vector<std::string>{"D", "C", "A"}));
}

TEST(MaximalChains, InvariantUnderDeclarationOrder) {
  EXPECT_EQ(enumerateMaximalChains(diamond(false)), enumerateMaximalChains(diamond(true)));
}

TEST(MaximalChains, EveryForeignKeyIsCovered) {
  const DatasetSchema s = overlapSchema();
  const auto chains = enumerateMaximalChains(s);
  for (const auto& t : s.tables) {
    for (const auto& fk : t.foreignKeys) {
      bool found = false;
      for (const auto& c : chains) {
        for (std::size_t i = 0; i + 1 < c.tables.size(); ++i) {
          found |= c.tables[i] == t.name && c.tables[i + 1] == fk.references && c.fkColumns[i] == fk.column;
        }
      }
      EXPECT_TRUE(found) << t.name << "." << fk.column;
    }
  }
}

TEST(MaximalChains, CycleIsRejected) {
  DatasetSchema s;
  s.tables = {makeTable("A", {{"b", "B"}}), makeTable("B", {{"a", "A"}})};
  s.validate();
  EXPECT_EQ(codeOf([&] { (void)enumerateMaximalChains(s); }), ErrorCode::kCyclicSchema);
}

TEST(WriteDataset, EmptyDatasetWritesHeadersOnly) {
  TempDir dir;
  writeDataset(Dataset(chainSchema(2)), dir.path());
  EXPECT_EQ(readText(dir.path() / "T0.csv"), "id,w\n");
  EXPECT_EQ(readText(dir.path() / "T1.csv"), "id,ref,w\n");
}

TEST(WriteDataset, OutputIsByteStable) {
  Rng rng(3);
  const DatasetSchema s = socialSchema();
  const Dataset d = randomDataset(s, randomSizes(s, rng, 10, 40), 5);
  EXPECT_EQ(renderCsv(d), renderCsv(d));
  TempDir dir;
  writeDataset(d, dir.path());
  EXPECT_EQ(renderCsv(loadDataset(s, dir.path())), renderCsv(d));
}

TEST(WriteDataset, RejectsPendingEmptyCells) {
  Dataset d = linearSample();
  d.mutableTable(d.schema().id("TB")).setCell(1, 0, Empty{});
  TempDir dir;
  EXPECT_EQ(codeOf([&] { writeDataset(d, dir.path()); }), ErrorCode::kPendingEmptyCells);
}

TEST(Csv, UnterminatedQuoteFails) {
  std::istringstream in("a,\"b\n");
  EXPECT_EQ(codeOf([&] { (void)csv::read(in); }), ErrorCode::kIoFailure);
}

TEST(Csv, AcceptsCrlf) {
  std::istringstream in("a,b\r\n1,\"x\r\ny\"\r\n");
  const auto records = csv::read(in);
  ASSERT_EQ(records.size(), 2U);
  EXPECT_EQ(records[1][1], "x\r\ny");
}

}  // namespace
}  // namespace tweakscale::testing
