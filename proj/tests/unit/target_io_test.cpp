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

#include "builders.hpp"
#include "fixtures.hpp"
#include "test_util.hpp"
#include "tweakscale/coappear.hpp"
#include "tweakscale/linear.hpp"
#include "tweakscale/pairwise.hpp"
#include "tweakscale/target_io.hpp"

namespace tweakscale::testing {
namespace {

TEST(SizeTargetIo, ParsesAndRoundTrips) {
  const SizeTarget s = parseSizeTarget(R"({"users": 10, "posts": 0})");
  EXPECT_EQ(s.at("users"), 10u);
  EXPECT_EQ(s.at("posts"), 0u);
  EXPECT_EQ(parseSizeTarget(sizeTargetToJson(s)), s);
}

TEST(SizeTargetIo, RejectsBadInput) {
  EXPECT_EQ(codeOf([] { parseSizeTarget("[1, 2]"); }), ErrorCode::kConfigError);
  EXPECT_EQ(codeOf([] { parseSizeTarget(R"({"a": -1})"); }), ErrorCode::kConfigError);
  EXPECT_EQ(codeOf([] { parseSizeTarget(R"({"a": 1.5})"); }), ErrorCode::kConfigError);
  EXPECT_EQ(codeOf([] { parseSizeTarget("{"); }), ErrorCode::kConfigError);
}

TEST(TargetsIo, LinearRowsWithAndWithoutDiagonal) {
  const Dataset d = linearSample();
  const auto t1 = parseTargets(d.schema(), R"({"chain": ["TD","TC","TB","TA"],
      "h": [[], [4], [3, 2], [1, 1, 2]]})");
  const auto t2 = parseTargets(d.schema(), R"({"chain": ["TD","TC","TB","TA"],
      "h": [[3], [4, 5], [3, 2, 5], [1, 1, 2, 5]]})");
  ASSERT_EQ(t1.linear.size(), 1u);
  EXPECT_EQ(t1.linear, t2.linear);
  EXPECT_EQ(t1.linear[0].h[3][1], 1);
  EXPECT_EQ(t1.linear[0].h[2][2], 0);
}

TEST(TargetsIo, LinearShapeErrors) {
  const DatasetSchema s = linearSample().schema();
  EXPECT_EQ(codeOf([&] { parseTargets(s, R"({"chain": ["TD","TC","TB","TA"], "h": [[]]})"); }),
            ErrorCode::kShapeMismatch);
  EXPECT_EQ(codeOf([&] {
              parseTargets(s, R"({"chain": ["TD","TC","TB","TA"], "h": [[], [1], [1], [1, 1, 1]]})");
            }),
            ErrorCode::kShapeMismatch);
  EXPECT_EQ(codeOf([&] { parseTargets(s, R"({"chain": ["TD","TX"], "h": [[], [1]]})"); }),
            ErrorCode::kSpecMismatch);
}

TEST(TargetsIo, ComputedTargetsRoundTrip) {
  const Dataset lin = linearSample();
  FeatureTargets t;
  t.linear.push_back(computeLinearMatrix(lin, linearSampleChain()));
  EXPECT_EQ(parseTargets(lin.schema(), targetsToJson(t)).linear, t.linear);
  EXPECT_EQ(parseTargets(lin.schema(), linearTargetToJson(t.linear[0])).linear, t.linear);

  const Dataset co = coappearSample();
  const auto dist = computeCoappear(co, detectCoappearGroups(co.schema()).at(0));
  ASSERT_TRUE(dist.zeroMass.has_value());
  const auto back = parseTargets(co.schema(), coappearTargetToJson(dist));
  ASSERT_EQ(back.coappear.size(), 1u);
  EXPECT_EQ(back.coappear[0], dist);

  const Dataset so = pairwiseSample();
  const auto pw = computePairwise(so, so.schema().pairwiseBindings[0], true);
  ASSERT_TRUE(pw.rhoN00.has_value());
  ASSERT_TRUE(pw.rhoS0.has_value());
  const auto pback = parseTargets(so.schema(), pairwiseTargetToJson(pw));
  ASSERT_EQ(pback.pairwise.size(), 1u);
  EXPECT_EQ(pback.pairwise[0], pw);
}

TEST(TargetsIo, ZeroEntriesSetExplicitMasses) {
  const Dataset co = coappearSample();
  const auto c = parseTargets(co.schema(), R"({"group": {"referencing": ["TC","TA","TB"], "referenced": ["TK","TH"]},
      "entries": [{"v": [0,0,0], "count": 5}, {"v": [1,1,1], "count": 4}]})");
  ASSERT_EQ(c.coappear.size(), 1u);
  EXPECT_EQ(c.coappear[0].zeroMass, 5);
  EXPECT_EQ(c.coappear[0].counts.at({1, 1, 1}), 4);

  const DatasetSchema s = socialSchema();
  const auto p = parseTargets(s, R"({"binding": {"userTable": "users", "postTable": "posts",
      "responseTable": "responses", "postOwnerColumn": "owner", "responsePostColumn": "post",
      "responseUserColumn": "user"},
      "rhoN": [{"x": 0, "y": 0, "count": 3}, {"x": 1, "y": 2, "count": 1}],
      "rhoS": [{"x": 0, "count": 2}]})");
  ASSERT_EQ(p.pairwise.size(), 1u);
  EXPECT_EQ(p.pairwise[0].rhoN00, 3);
  EXPECT_EQ(p.pairwise[0].rhoN.at({1, 2}), 1);
  EXPECT_EQ(p.pairwise[0].rhoS0, 2);
  EXPECT_TRUE(p.pairwise[0].rhoS.empty());
}

TEST(TargetsIo, ArrayAndKeyedForms) {
  const Dataset lin = linearSample();
  const std::string one = R"({"chain": ["TC","TB"], "h": [[], [1]]})";
  const auto arr = parseTargets(lin.schema(), "[" + one + "," + one + "]");
  EXPECT_EQ(arr.linear.size(), 2u);
  const auto keyed = parseTargets(lin.schema(), R"({"linear": [)" + one + R"(], "coappear": []})");
  EXPECT_EQ(keyed.linear.size(), 1u);
  EXPECT_EQ(codeOf([&] { parseTargets(lin.schema(), R"({"other": []})"); }), ErrorCode::kConfigError);
  EXPECT_EQ(codeOf([&] { parseTargets(lin.schema(), R"([{"h": []}])"); }), ErrorCode::kConfigError);
  EXPECT_EQ(codeOf([&] { parseTargets(lin.schema(), "7"); }), ErrorCode::kConfigError);
}

TEST(TargetsIo, UnknownGroupOrBindingIsSpecMismatch) {
  const Dataset co = coappearSample();
  EXPECT_EQ(codeOf([&] {
              parseTargets(co.schema(), R"({"group": {"referencing": ["TA"], "referenced": ["TK"]}, "entries": []})");
            }),
            ErrorCode::kSpecMismatch);
  const DatasetSchema s = socialSchema();
  EXPECT_EQ(codeOf([&] {
              parseTargets(s, R"({"binding": {"userTable": "users", "postTable": "posts",
                  "responseTable": "responses", "postOwnerColumn": "owner", "responsePostColumn": "post",
                  "responseUserColumn": "post"}})");
            }),
            ErrorCode::kSpecMismatch);
}

TEST(QueriesIo, ParsesEveryKind) {
  const DatasetSchema s = socialSchema();
  const auto q = parseQueries(s, R"([
      {"name": "a", "kind": "chainRootCount", "chain": ["responses", "posts", "users"]},
      {"name": "b", "kind": "referencerThresholdCount", "referencing": "posts", "referenced": "users", "threshold": 2},
      {"name": "c", "kind": "averageReferencers", "referencing": "responses", "referenced": "posts"},
      {"name": "d", "kind": "interactingUserPairs"}])");
  ASSERT_EQ(q.size(), 4u);
  EXPECT_EQ(q[0].kind, QueryKind::kChainRootCount);
  EXPECT_EQ(q[1].threshold, 2);
  EXPECT_EQ(q[2].referenced, "posts");
  EXPECT_EQ(q[3].kind, QueryKind::kInteractingUserPairs);
}

TEST(QueriesIo, RejectsBadQueries) {
  const DatasetSchema s = socialSchema();
  EXPECT_EQ(codeOf([&] { parseQueries(s, R"({"name": "a"})"); }), ErrorCode::kConfigError);
  EXPECT_EQ(codeOf([&] { parseQueries(s, R"([{"name": "a", "kind": "median"}])"); }), ErrorCode::kConfigError);
  EXPECT_EQ(codeOf([&] {
              parseQueries(s, R"([{"name": "a", "kind": "averageReferencers", "referencing": "users",
                  "referenced": "posts"}])");
            }),
            ErrorCode::kSpecMismatch);
}

TEST(FileIo, ReadWriteAndFailures) {
  TempDir dir;
  const auto p = dir.path() / "nested" / "x.txt";
  writeFile(p, "abc\n");
  EXPECT_EQ(readFile(p), "abc\n");
  EXPECT_EQ(codeOf([&] { readFile(dir.path() / "missing.txt"); }), ErrorCode::kIoFailure);
  EXPECT_EQ(codeOf([&] { writeFile(dir.path(), "x"); }), ErrorCode::kIoFailure);
}

}  // namespace
}  // namespace tweakscale::testing
