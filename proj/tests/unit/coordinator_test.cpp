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

#include <memory>

#include "builders.hpp"
#include "generators.hpp"
#include "oracles.hpp"
#include "test_util.hpp"
#include "tweakscale/coordinator.hpp"
#include "tweakscale/linear_tool.hpp"
#include "tweakscale/overlap.hpp"

namespace tweakscale::testing {
namespace {

// Feature: "more than half of the rows of table 0 hold `value` in column 0".
// Error is the missing fraction of rows.
class MajorityTool : public Tool {
 public:
  MajorityTool(std::string name, std::int64_t value) : name_(std::move(name)), value_(value) {}

  [[nodiscard]] std::string name() const override { return name_; }
  [[nodiscard]] FeatureKind kind() const override { return FeatureKind::kOther; }
  void generateTarget(const Dataset&, const Dataset&) override {}
  void prepareTarget(const Dataset&, bool) override {}
  [[nodiscard]] bool hasTarget() const override { return true; }
  void calculate(const Dataset& d) override {
    cells_.clear();
    for (const Tuple& t : d.table(0).rows()) cells_[t.id] = t.cells[0];
    calculated_ = true;
  }
  [[nodiscard]] bool calculated() const override { return calculated_; }
  [[nodiscard]] double error() const override { return errorOf(cells_); }
  [[nodiscard]] std::vector<double> itemErrors() const override { return {error()}; }
  double simulate(const EditList& edits) override {
    auto copy = cells_;
    applyTo(copy, edits);
    return errorOf(copy);
  }
  void update(const EditList& edits) override { applyTo(cells_, edits); }
  [[nodiscard]] double recomputeError(const Dataset& d) const override {
    std::map<TupleId, Cell> cells;
    for (const Tuple& t : d.table(0).rows()) cells[t.id] = t.cells[0];
    return errorOf(cells);
  }
  void tweak(Coordinator& coord, ToolHandle self) override {
    while (error() > 0) {
      std::vector<Batch> candidates;
      for (const auto& [id, v] : cells_) {
        if (v != Cell{value_}) candidates.push_back({ReplaceValues{0, {id}, {0}, {value_}}});
      }
      coord.submit(self, candidates);
    }
  }

 private:
  [[nodiscard]] double errorOf(const std::map<TupleId, Cell>& cells) const {
    if (cells.empty()) return 0.0;
    std::int64_t hits = 0;
    for (const auto& [id, v] : cells) hits += v == Cell{value_} ? 1 : 0;
    const auto n = static_cast<std::int64_t>(cells.size());
    const std::int64_t need = n / 2 + 1;
    return hits >= need ? 0.0 : static_cast<double>(need - hits) / static_cast<double>(n);
  }
  static void applyTo(std::map<TupleId, Cell>& cells, const EditList& edits) {
    for (const CellEdit& e : edits) {
      if (e.table != 0) continue;
      if (e.kind == CellEdit::Kind::kAppend) {
        cells[e.tuple] = e.cells[0];
      } else if (e.column == 0) {
        cells[e.tuple] = e.after;
      }
    }
  }

  std::string name_;
  std::int64_t value_;
  std::map<TupleId, Cell> cells_;
  bool calculated_ = false;
};

// Customers with (sex, city); sex 1 = men, 0 = women.
Dataset customers(std::initializer_list<std::int64_t> sexes) {
  DatasetSchema s;
  s.tables.push_back(makeTable("customers", {}, {{"sex", ColumnKind::kInteger}, {"city", ColumnKind::kInteger}}));
  s.validate();
  Dataset d(s);
  std::int64_t id = 1;
  for (std::int64_t sex : sexes) {
    addRow(d, "customers", {id, sex, std::int64_t{0}});
    ++id;
  }
  return d;
}

TEST(Coordinator, RegistersToolsInOrder) {
  Dataset d = customers({1, 0});
  Coordinator c(d);
  EXPECT_EQ(c.registerTool(std::make_unique<LinearTool>(d.schema())), 0U);
  EXPECT_EQ(c.registerTool(std::make_unique<MajorityTool>("men", 1)), 1U);
  EXPECT_EQ(codeOf([&] { c.registerTool(std::make_unique<MajorityTool>("men", 0)); }),
            ErrorCode::kDuplicateToolName);
  EXPECT_EQ(c.findTool("men"), 1U);
}

TEST(Coordinator, RejectsBadThreshold) {
  Dataset d = customers({1});
  EXPECT_EQ(codeOf([&] { Coordinator c(d, {.eThreshold = 1.0}); }), ErrorCode::kConfigError);
}

TEST(Coordinator, FirstToolIsAlwaysAccepted) {
  Dataset d = customers({1, 0, 0});
  Coordinator c(d);
  const ToolHandle h = c.registerTool(std::make_unique<MajorityTool>("men", 1));
  c.beginRun(h);
  Batch b{ReplaceValues{0, {2, 3}, {0, 1}, {std::int64_t{0}, std::int64_t{9}}}};
  const Verdict v = c.propose(h, b);
  EXPECT_TRUE(v.accepted);
  EXPECT_TRUE(v.perFeatureError.empty());
  c.apply(h, b, v);
  const ToolRunSummary s = c.endRun();
  EXPECT_EQ(s.accepted, 1U);
  EXPECT_EQ(asInt(d.table(0).cell(3, 1)), 9);
}

TEST(Coordinator, OnlyTheRunningToolMayPropose) {
  Dataset d = customers({1, 0});
  Coordinator c(d);
  const ToolHandle a = c.registerTool(std::make_unique<MajorityTool>("a", 1));
  const ToolHandle b = c.registerTool(std::make_unique<MajorityTool>("b", 0));
  Batch batch{ReplaceValues{0, {1}, {1}, {std::int64_t{2}}}};
  EXPECT_EQ(codeOf([&] { (void)c.propose(a, batch); }), ErrorCode::kNotCurrentTool);
  c.beginRun(a);
  EXPECT_EQ(codeOf([&] { (void)c.propose(b, batch); }), ErrorCode::kNotCurrentTool);
  Batch bad{ReplaceValues{0, {7}, {1}, {std::int64_t{2}}}};
  EXPECT_EQ(codeOf([&] { (void)c.propose(a, bad); }), ErrorCode::kMalformedModification);
}

TEST(Coordinator, ValidatorPrefersHarmlessCandidate) {
  Dataset d = customers({1, 1, 1, 0, 0});
  Coordinator c(d);
  const ToolHandle men = c.registerTool(std::make_unique<MajorityTool>("men", 1));
  const ToolHandle other = c.registerTool(std::make_unique<MajorityTool>("other", 5));
  c.runTool(men);
  c.beginRun(other);
  // Changing t1 breaks the prior feature; changing t4 does not.
  std::vector<Batch> candidates{{ReplaceValues{0, {1}, {0}, {std::int64_t{5}}}},
                                {ReplaceValues{0, {4}, {0}, {std::int64_t{5}}}}};
  const Verdict v1 = c.propose(other, candidates[0]);
  EXPECT_FALSE(v1.accepted);
  EXPECT_DOUBLE_EQ(v1.perFeatureError.at("men"), 0.2);
  EXPECT_EQ(c.submit(other, candidates), 1U);
  EXPECT_EQ(asInt(d.table(0).cell(1, 0)), 1);
  EXPECT_EQ(asInt(d.table(0).cell(4, 0)), 5);
  const ToolRunSummary s = c.endRun();
  EXPECT_TRUE(s.relaxed.empty());
}

TEST(Coordinator, ContradictoryFeaturesRelaxEarliestFirst) {
  Dataset d = customers({1, 0, 0, 1, 0});
  Coordinator c(d);
  const ToolHandle men = c.registerTool(std::make_unique<MajorityTool>("men", 1));
  const ToolHandle women = c.registerTool(std::make_unique<MajorityTool>("women", 0));
  const ToolHandle third = c.registerTool(std::make_unique<MajorityTool>("third", 0));
  c.runTool(men);
  EXPECT_EQ(c.tool(men).error(), 0.0);
  const ToolRunSummary s = c.runTool(women);
  EXPECT_EQ(s.relaxed, (std::vector<std::string>{"men"}));
  EXPECT_EQ(c.tool(women).error(), 0.0);
  EXPECT_GT(c.tool(men).error(), 0.0);
  EXPECT_EQ(c.appliedOrder(), (std::vector<ToolHandle>{men, women}));
  // Relaxation lasts one run only: "third" is validated against both again.
  c.beginRun(third);
  Batch b{ReplaceValues{0, {2}, {0}, {std::int64_t{1}}}};
  const Verdict v = c.propose(third, b);
  EXPECT_EQ(v.perFeatureError.count("men"), 1U);
  c.endRun();
}

TEST(Coordinator, ExhaustsWhenNothingCanBeRelaxed) {
  Dataset d = customers({1, 0});
  Coordinator c(d, {.maxRelaxationRounds = 0});
  const ToolHandle men = c.registerTool(std::make_unique<MajorityTool>("men", 1));
  const ToolHandle women = c.registerTool(std::make_unique<MajorityTool>("women", 0));
  c.runTool(men);
  EXPECT_EQ(codeOf([&] { c.runTool(women); }), ErrorCode::kCoordinatorExhausted);
  c.beginRun(women);
  std::vector<Batch> none;
  EXPECT_EQ(codeOf([&] { c.submit(women, none); }), ErrorCode::kCoordinatorExhausted);
}

TEST(Coordinator, StaleVerdictIsRefused) {
  Dataset d = customers({1, 0, 0});
  Coordinator c(d);
  const ToolHandle h = c.registerTool(std::make_unique<MajorityTool>("men", 1));
  c.beginRun(h);
  Batch a{ReplaceValues{0, {2}, {1}, {std::int64_t{3}}}};
  Batch b{ReplaceValues{0, {3}, {1}, {std::int64_t{4}}}};
  const Verdict va = c.propose(h, a);
  const Verdict vb = c.propose(h, b);
  c.apply(h, a, va);
  EXPECT_EQ(codeOf([&] { c.apply(h, b, vb); }), ErrorCode::kStaleVerdict);
  Verdict rejected = c.propose(h, b);
  rejected.accepted = false;
  EXPECT_EQ(codeOf([&] { c.apply(h, b, rejected); }), ErrorCode::kMalformedModification);
}

TEST(Coordinator, LogsAccessAndJournal) {
  Dataset d = customers({0, 0, 0});
  Coordinator c(d);
  const ToolHandle h = c.registerTool(std::make_unique<MajorityTool>("men", 1));
  const ToolRunSummary s = c.runTool(h);
  EXPECT_EQ(s.accepted, 2U);
  EXPECT_EQ(c.journal().size(), 2U);
  EXPECT_EQ(c.accessLog().at("men").size(), 2U);
  EXPECT_EQ(c.version(), 2U);
  EXPECT_EQ(s.deletedCells, s.insertedCells);
}

TEST(Coordinator, TargetEqualToCurrentNeedsNoEdits) {
  Rng rng(1);
  const DatasetSchema s = chainSchema(4);
  Dataset d = randomDataset(s, randomSizes(s, rng, 30, 60), 2);
  Coordinator c(d);
  const ToolHandle h = c.registerTool(std::make_unique<LinearTool>(s));
  c.tool(h).generateTarget(d, d);
  const ToolRunSummary summary = c.runTool(h);
  EXPECT_EQ(summary.proposed, 0U);
  EXPECT_EQ(summary.finalError, 0.0);
}

TEST(Coordinator, CrossCheckAgreesWithRecomputation) {
  Dataset d = customers({0, 1, 0, 0, 1, 0, 0});
  Coordinator c(d, {.crossCheck = true});
  const ToolHandle women = c.registerTool(std::make_unique<MajorityTool>("women", 0));
  const ToolHandle men = c.registerTool(std::make_unique<MajorityTool>("men", 1));
  c.runTool(women);
  EXPECT_NO_THROW(c.runTool(men));
}

TEST(Coordinator, RunSeedsDifferPerRun) {
  Dataset d = customers({0});
  Coordinator c(d, {.seed = 9});
  const ToolHandle h = c.registerTool(std::make_unique<MajorityTool>("men", 1));
  c.beginRun(h);
  const auto first = c.runSeed(h);
  c.endRun();
  c.beginRun(h);
  EXPECT_NE(c.runSeed(h), first);
  c.endRun();
}

AccessLog logOf(std::initializer_list<std::pair<std::string, std::vector<std::pair<TableId, TupleId>>>> items) {
  AccessLog log;
  for (const auto& [tool, cells] : items) log[tool].insert(cells.begin(), cells.end());
  return log;
}

TEST(Overlap, DisjointToolsAreIndependent) {
  const OverlapGraph g = overlapGraph(logOf({{"a", {{0, 1}}}, {"b", {{1, 1}}}, {"c", {{2, 1}}}}));
  EXPECT_TRUE(g.edges.empty());
  EXPECT_EQ(maximumIndependentSet(g), (std::vector<std::string>{"a", "b", "c"}));
}

TEST(Overlap, TriangleKeepsLeastName) {
  const OverlapGraph g = overlapGraph(logOf({{"c", {{0, 1}, {0, 2}}}, {"b", {{0, 2}, {0, 3}}}, {"a", {{0, 1}, {0, 3}}}}));
  EXPECT_EQ(g.nodes, (std::vector<std::string>{"a", "b", "c"}));
  EXPECT_EQ(g.edges.size(), 3U);
  EXPECT_EQ(maximumIndependentSet(g), (std::vector<std::string>{"a"}));
}

TEST(Overlap, IdleToolsStillGetNodes) {
  const OverlapGraph g = overlapGraph(logOf({{"a", {{0, 1}}}}), {"z"});
  EXPECT_EQ(g.nodes, (std::vector<std::string>{"a", "z"}));
}

TEST(Overlap, RandomGraphsMatchExhaustiveSearch) {
  Rng rng(33);
  for (int trial = 0; trial < 50; ++trial) {
    OverlapGraph g;
    for (char ch = 'a'; ch < 'a' + 10; ++ch) g.nodes.emplace_back(1, ch);
    for (std::size_t i = 0; i < 10; ++i) {
      for (std::size_t j = i + 1; j < 10; ++j) {
        if (uniformBelow(rng, 100) < 30) g.edges.emplace_back(i, j);
      }
    }
    EXPECT_EQ(maximumIndependentSet(g), bruteMaximumIndependentSet(g.nodes, g.edges));
  }
}

TEST(Overlap, RefusesLargeGraphs) {
  OverlapGraph g;
  for (int i = 0; i < 31; ++i) g.nodes.push_back("t" + std::to_string(100 + i));
  EXPECT_EQ(codeOf([&] { (void)maximumIndependentSet(g); }), ErrorCode::kGraphTooLarge);
}

}  // namespace
}  // namespace tweakscale::testing
