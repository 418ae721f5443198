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

#include "fixtures.hpp"

#include "builders.hpp"

namespace tweakscale::testing {

Dataset linearSample() {
  DatasetSchema s;
  s.tables.push_back(makeTable("TA", {}));
  s.tables.push_back(makeTable("TB", {{"a", "TA"}}));
  s.tables.push_back(makeTable("TC", {{"b", "TB"}}));
  s.tables.push_back(makeTable("TD", {{"c", "TC"}}));
  s.validate();
  Dataset d(s);
  for (std::int64_t a = 1; a <= 3; ++a) addRow(d, "TA", {a});
  const std::int64_t b_parent[] = {1, 2, 2, 3, 3};
  for (std::int64_t b = 1; b <= 5; ++b) addRow(d, "TB", {b, b_parent[b - 1]});
  const std::int64_t c_parent[] = {2, 2, 3, 4, 5};
  for (std::int64_t c = 1; c <= 5; ++c) addRow(d, "TC", {c, c_parent[c - 1]});
  const std::int64_t d_parent[] = {4, 4, 4, 5, 5};
  for (std::int64_t x = 1; x <= 5; ++x) addRow(d, "TD", {x, d_parent[x - 1]});
  return d;
}

ReferenceChain linearSampleChain() { return {{"TD", "TC", "TB", "TA"}, {"c", "b", "a"}}; }

Dataset coappearSample() {
  DatasetSchema s;
  s.tables.push_back(makeTable("TK", {}));
  s.tables.push_back(makeTable("TH", {}));
  for (const char* t : {"TA", "TB", "TC"}) s.tables.push_back(makeTable(t, {{"k", "TK"}, {"h", "TH"}}));
  s.validate();
  Dataset d(s);
  for (std::int64_t i = 1; i <= 3; ++i) {
    addRow(d, "TK", {i});
    addRow(d, "TH", {i});
  }
  // (k, h, times in TA, TB, TC)
  struct Combo {
    std::int64_t k, h, a, b, c;
  };
  const Combo combos[] = {{1, 2, 3, 3, 1}, {2, 3, 1, 1, 2}, {3, 1, 1, 1, 2}};
  std::int64_t next[3] = {1, 1, 1};
  const char* tables[3] = {"TA", "TB", "TC"};
  for (const Combo& c : combos) {
    const std::int64_t times[3] = {c.a, c.b, c.c};
    for (int t = 0; t < 3; ++t) {
      for (std::int64_t n = 0; n < times[t]; ++n) addRow(d, tables[t], {next[t]++, c.k, c.h});
    }
  }
  return d;
}

Dataset pairwiseSample() {
  Dataset d(socialSchema());
  addRow(d, "users", {std::int64_t{1}, std::string("u1")});
  addRow(d, "users", {std::int64_t{2}, std::string("u2")});
  addRow(d, "posts", {std::int64_t{1}, std::int64_t{1}, std::string("p1")});
  addRow(d, "posts", {std::int64_t{2}, std::int64_t{1}, std::string("p2")});
  addRow(d, "posts", {std::int64_t{3}, std::int64_t{2}, std::string("p3")});
  // (response, post, user)
  const std::int64_t rows[][3] = {{1, 3, 1}, {2, 3, 1}, {3, 1, 2}, {4, 1, 2}, {5, 2, 2}, {6, 2, 2}};
  for (const auto& r : rows) addRow(d, "responses", {r[0], r[1], r[2]});
  return d;
}

LinearJoinMatrix errorExampleActual() {
  LinearJoinMatrix m;
  m.chain = {{"T3", "T2", "T1"}, {"x", "x"}};
  m.h = {{0}, {5, 0}, {2, 3, 0}};
  return m;
}

LinearJoinMatrix errorExampleTruth() {
  LinearJoinMatrix m = errorExampleActual();
  m.h = {{0}, {4, 0}, {3, 4, 0}};
  return m;
}

}  // namespace tweakscale::testing
