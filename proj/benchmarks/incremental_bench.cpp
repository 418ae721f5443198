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

// Incremental feature maintenance against full recomputation, on the
// six-table schema where all three feature kinds share referencing tables.

#include <benchmark/benchmark.h>

#include "builders.hpp"
#include "generators.hpp"
#include "tweakscale/chains.hpp"
#include "tweakscale/coappear.hpp"
#include "tweakscale/linear.hpp"
#include "tweakscale/modification.hpp"
#include "tweakscale/pairwise.hpp"

namespace {

using namespace tweakscale;

Dataset makeData(std::size_t n) {
  const DatasetSchema s = testing::overlapSchema();
  SizeTarget sizes;
  for (const auto& t : s.tables) sizes[t.name] = t.name == "U" ? n / 4 : n;
  return testing::randomDataset(s, sizes, 7);
}

// Applies one random batch per iteration and hands its edits to `update`.
template <typename Update>
void editLoop(benchmark::State& state, Dataset& d, Update update) {
  Rng rng(11);
  for (auto _ : state) {
    Batch batch = testing::randomBatch(d, rng);
    const EditList edits = resolve(d, batch);
    applyEdits(d, edits);
    update(edits);
  }
  state.SetItemsProcessed(state.iterations());
}

void BM_LinearIncremental(benchmark::State& state) {
  Dataset d = makeData(static_cast<std::size_t>(state.range(0)));
  std::vector<LinearState> states;
  for (const auto& c : enumerateMaximalChains(d.schema())) {
    states.emplace_back(d.schema(), c);
    states.back().build(d);
  }
  editLoop(state, d, [&](const EditList& e) {
    for (auto& s : states) s.apply(e);
  });
}

void BM_LinearRecompute(benchmark::State& state) {
  Dataset d = makeData(static_cast<std::size_t>(state.range(0)));
  const auto chains = enumerateMaximalChains(d.schema());
  editLoop(state, d, [&](const EditList&) {
    for (const auto& c : chains) benchmark::DoNotOptimize(computeLinearMatrix(d, c));
  });
}

void BM_CoappearIncremental(benchmark::State& state) {
  Dataset d = makeData(static_cast<std::size_t>(state.range(0)));
  std::vector<CoappearState> states;
  for (const auto& g : detectCoappearGroups(d.schema())) {
    states.emplace_back(d.schema(), g);
    states.back().build(d);
  }
  editLoop(state, d, [&](const EditList& e) {
    for (auto& s : states) s.apply(e);
  });
}

void BM_CoappearRecompute(benchmark::State& state) {
  Dataset d = makeData(static_cast<std::size_t>(state.range(0)));
  const auto groups = detectCoappearGroups(d.schema());
  editLoop(state, d, [&](const EditList&) {
    for (const auto& g : groups) benchmark::DoNotOptimize(computeCoappear(d, g));
  });
}

void BM_PairwiseIncremental(benchmark::State& state) {
  Dataset d = makeData(static_cast<std::size_t>(state.range(0)));
  PairwiseState ps(d.schema(), d.schema().pairwiseBindings.at(0));
  ps.build(d);
  editLoop(state, d, [&](const EditList& e) { ps.apply(e); });
}

void BM_PairwiseRecompute(benchmark::State& state) {
  Dataset d = makeData(static_cast<std::size_t>(state.range(0)));
  const PairwiseBinding b = d.schema().pairwiseBindings.at(0);
  editLoop(state, d, [&](const EditList&) { benchmark::DoNotOptimize(computePairwise(d, b)); });
}

BENCHMARK(BM_LinearIncremental)->RangeMultiplier(10)->Range(1000, 100000);
BENCHMARK(BM_LinearRecompute)->RangeMultiplier(10)->Range(1000, 100000);
BENCHMARK(BM_CoappearIncremental)->RangeMultiplier(10)->Range(1000, 100000);
BENCHMARK(BM_CoappearRecompute)->RangeMultiplier(10)->Range(1000, 100000);
BENCHMARK(BM_PairwiseIncremental)->RangeMultiplier(10)->Range(1000, 100000);
BENCHMARK(BM_PairwiseRecompute)->RangeMultiplier(10)->Range(1000, 100000);

}  // namespace
