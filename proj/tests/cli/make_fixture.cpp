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

// Writes a small social-network dataset for the CLI smoke test:
// <dir>/schema.json, <dir>/data/, <dir>/sizes.json and <dir>/queries.json.

#include <filesystem>
#include <iostream>

#include "builders.hpp"
#include "generators.hpp"
#include "tweakscale/dataset_io.hpp"
#include "tweakscale/rand_scaler.hpp"
#include "tweakscale/target_io.hpp"

int main(int argc, char** argv) {
  using namespace tweakscale;
  if (argc != 2) {
    std::cerr << "usage: make_fixture <dir>\n";
    return 2;
  }
  const std::filesystem::path dir = argv[1];
  const DatasetSchema schema = testing::overlapSchema();
  Rng rng(41);
  writeFile(dir / "schema.json", schemaToJson(schema));
  writeDataset(testing::randomDataset(schema, testing::randomSizes(schema, rng, 20, 50), 3), dir / "data");
  writeFile(dir / "sizes.json", sizeTargetToJson(testing::randomSizes(schema, rng, 40, 90)));
  writeFile(dir / "queries.json", R"([
  {"name": "pairs", "kind": "interactingUserPairs"},
  {"name": "replies per post", "kind": "averageReferencers", "referencing": "R", "referenced": "P"}
])");
  return 0;
}
