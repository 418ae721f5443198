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

#include "builders.hpp"
#include "generators.hpp"
#include "json.hpp"
#include "test_util.hpp"
#include "tweakscale/dataset_io.hpp"
#include "tweakscale/linear_tool.hpp"
#include "tweakscale/overlap.hpp"
#include "tweakscale/pipeline.hpp"
#include "tweakscale/rand_scaler.hpp"
#include "tweakscale/target_io.hpp"

namespace tweakscale::testing {
namespace {

double meanOr0(const std::vector<double>& v) { return ErrorReport::mean(v).value_or(0.0); }

TEST(ParseOrder, AcceptsSeparatorsAndCase) {
  EXPECT_EQ(parseOrder("C-L-P"), (std::vector<char>{'C', 'L', 'P'}));
  EXPECT_EQ(parseOrder("lcp"), (std::vector<char>{'L', 'C', 'P'}));
  EXPECT_EQ(parseOrder("P"), (std::vector<char>{'P'}));
}

TEST(ParseOrder, RejectsBadOrders) {
  EXPECT_EQ(codeOf([] { parseOrder("L-X"); }), ErrorCode::kConfigError);
  EXPECT_EQ(codeOf([] { parseOrder("LL"); }), ErrorCode::kConfigError);
  EXPECT_EQ(codeOf([] { parseOrder("--"); }), ErrorCode::kConfigError);
}

TEST(MakeTool, NamesMatchLetters) {
  const DatasetSchema s = overlapSchema();
  EXPECT_EQ(makeTool('L', s)->name(), "linear");
  EXPECT_EQ(makeTool('C', s)->name(), "coappear");
  EXPECT_EQ(makeTool('P', s)->name(), "pairwise");
  EXPECT_EQ(codeOf([&] { makeTool('Q', s); }), ErrorCode::kConfigError);
}

TEST(RunTools, RunsToolsInTheGivenOrder) {
  const DatasetSchema s = overlapSchema();
  Rng rng(5);
  const Dataset reference = randomDataset(s, randomSizes(s, rng, 20, 60), 1);
  Dataset data = randScale(reference, currentSizes(reference), 2);
  RunOptions o;
  o.order = "P-L-C";
  const RunOutcome out = runTools(data, reference, o);
  ASSERT_EQ(out.iterations.size(), 1u);
  const auto& runs = out.iterations[0].errors.runs;
  ASSERT_EQ(runs.size(), 3u);
  EXPECT_EQ(runs[0].tool, "pairwise");
  EXPECT_EQ(runs[1].tool, "linear");
  EXPECT_EQ(runs[2].tool, "coappear");
  EXPECT_TRUE(validateIntegrity(data).ok());
}

TEST(RunTools, SingleLinearToolReachesZero) {
  const DatasetSchema s = chainSchema(4);
  Rng rng(9);
  const Dataset reference = randomDataset(s, randomSizes(s, rng, 30, 120), 3, 0.8);
  Dataset data = randScale(reference, randomSizes(s, rng, 30, 120), 4);
  RunOptions o;
  o.order = "L";
  const RunOutcome out = runTools(data, reference, o);
  ASSERT_FALSE(out.final.linear.empty());
  EXPECT_EQ(meanOr0(out.final.linear), 0.0);
  EXPECT_TRUE(out.final.coappear.empty());
}

TEST(RunTools, CallbackSeesEveryIteration) {
  const DatasetSchema s = overlapSchema();
  Rng rng(11);
  const Dataset reference = randomDataset(s, randomSizes(s, rng, 20, 50), 7);
  Dataset data = randScale(reference, randomSizes(s, rng, 20, 50), 8);
  RunOptions o;
  o.iterations = 3;
  std::vector<std::size_t> seen;
  const RunOutcome out = runTools(data, reference, o, [&](std::size_t it, const Dataset&) { seen.push_back(it); });
  EXPECT_EQ(seen, (std::vector<std::size_t>{1, 2, 3}));
  EXPECT_EQ(out.final.runs.size(), 9u);
  o.iterations = 0;
  EXPECT_EQ(codeOf([&] { runTools(data, reference, o); }), ErrorCode::kConfigError);
}

TEST(RunTools, ExplicitTargetReplacesGenerated) {
  const DatasetSchema s = chainSchema(2);
  Rng rng(2);
  const Dataset reference = randomDataset(s, {{"T0", 10}, {"T1", 30}}, 1);
  Dataset data = reference;
  RunOptions o;
  o.order = "L";
  LinearJoinMatrix t = emptyMatrix(resolveChain(s, {"T1", "T0"}));
  t.h[1][0] = 4;
  o.explicitTargets.linear.push_back(t);
  const RunOutcome out = runTools(data, reference, o);
  ASSERT_EQ(out.targets.linear.size(), 1u);
  EXPECT_EQ(out.targets.linear[0].h[1][0], 4);
  EXPECT_EQ(computeLinearMatrix(data, t.chain).h[1][0], 4);

  o.explicitTargets.linear[0] = emptyMatrix(resolveChain(chainSchema(3), {"T2", "T1"}));
  Dataset again = reference;
  EXPECT_EQ(codeOf([&] { runTools(again, reference, o); }), ErrorCode::kSpecMismatch);
}

class PipelineFiles : public ::testing::Test {
 protected:
  void SetUp() override {
    const DatasetSchema s = overlapSchema();
    Rng rng(21);
    writeFile(dir_.path() / "schema.json", schemaToJson(s));
    writeDataset(randomDataset(s, randomSizes(s, rng, 15, 40), 5), dir_.path() / "in");
    SizeTarget sizes = randomSizes(s, rng, 30, 80);
    writeFile(dir_.path() / "sizes.json", sizeTargetToJson(sizes));
  }

  PipelineConfig config(const std::string& out) const {
    PipelineConfig c;
    c.schemaPath = dir_.path() / "schema.json";
    c.dataDir = dir_.path() / "in";
    c.sizeTargetPath = dir_.path() / "sizes.json";
    c.iterations = 2;
    c.seed = 17;
    c.outputDir = dir_.path() / out;
    return c;
  }

  TempDir dir_;
};

TEST_F(PipelineFiles, WritesOutputsDeterministically) {
  const PipelineResult a = runPipeline(config("a"));
  const PipelineResult b = runPipeline(config("b"));
  const auto root = dir_.path();
  EXPECT_EQ(readText(root / "a" / "report.json"), readText(root / "b" / "report.json"));
  EXPECT_EQ(readText(root / "a" / "journal.ndjson"), readText(root / "b" / "journal.ndjson"));
  EXPECT_EQ(a.final, b.final);
  EXPECT_EQ(loadDataset(a.final.schema(), root / "a" / "data"), a.final);

  const auto report = nlohmann::json::parse(a.reportJson);
  for (const char* key : {"sizes", "iterations", "final", "queries", "journal"}) {
    EXPECT_TRUE(report.contains(key)) << key;
  }
  EXPECT_EQ(report["iterations"].size(), 2u);
  EXPECT_EQ(report["journal"]["records"].get<std::size_t>(), a.outcome.journal.size());
  EXPECT_EQ(report["sizes"]["U"].get<std::size_t>(), a.final.table("U").size());
}

TEST_F(PipelineFiles, SnapshotsAndQueries) {
  PipelineConfig c = config("s");
  c.snapshots = true;
  c.groundTruthDir = dir_.path() / "in";
  writeFile(dir_.path() / "q.json", R"([{"name": "pairs", "kind": "interactingUserPairs"},
      {"name": "avg", "kind": "averageReferencers", "referencing": "R", "referenced": "P"}])");
  c.queriesPath = dir_.path() / "q.json";
  const PipelineResult r = runPipeline(c);
  EXPECT_TRUE(std::filesystem::exists(dir_.path() / "s" / "iteration-1" / "U.csv"));
  EXPECT_TRUE(std::filesystem::exists(dir_.path() / "s" / "iteration-2" / "U.csv"));
  ASSERT_EQ(r.outcome.final.queries.size(), 2u);
  EXPECT_EQ(r.outcome.final.queries[1].name, "avg");
}

TEST_F(PipelineFiles, ConfigErrors) {
  PipelineConfig c = config("e");
  c.order = "L-Z";
  EXPECT_EQ(codeOf([&] { runPipeline(c); }), ErrorCode::kConfigError);
  c = config("e");
  c.schemaPath = dir_.path() / "nope.json";
  EXPECT_EQ(codeOf([&] { runPipeline(c); }), ErrorCode::kSchemaParseError);
}

TEST(Overlap, PipelineAccessLogFeedsOverlapGraph) {
  const DatasetSchema s = overlapSchema();
  Rng rng(3);
  const Dataset reference = randomDataset(s, randomSizes(s, rng, 20, 50), 9);
  Dataset data = randScale(reference, randomSizes(s, rng, 40, 90), 10);
  const RunOutcome out = runTools(data, reference, RunOptions{});
  const OverlapGraph g = overlapGraph(out.access, {"coappear", "linear", "pairwise"});
  EXPECT_EQ(g.nodes, (std::vector<std::string>{"coappear", "linear", "pairwise"}));
  const auto mis = maximumIndependentSet(g);
  EXPECT_FALSE(mis.empty());
  for (std::size_t i = 0; i < mis.size(); ++i) {
    for (std::size_t j = i + 1; j < mis.size(); ++j) {
      const auto a = std::find(g.nodes.begin(), g.nodes.end(), mis[i]) - g.nodes.begin();
      const auto b = std::find(g.nodes.begin(), g.nodes.end(), mis[j]) - g.nodes.begin();
      EXPECT_FALSE(g.adjacent(static_cast<std::size_t>(a), static_cast<std::size_t>(b)));
    }
  }
}

}  // namespace
}  // namespace tweakscale::testing
