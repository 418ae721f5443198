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

#ifndef TWEAKSCALE_DATASET_IO_HPP_
#define TWEAKSCALE_DATASET_IO_HPP_

#include <filesystem>
#include <string>
#include <vector>

#include "tweakscale/dataset.hpp"
#include "tweakscale/error.hpp"
#include "tweakscale/schema.hpp"

namespace tweakscale {

/// Reads <table>.csv for every table in `schema` from `data_dir`.
Dataset loadDataset(const DatasetSchema& schema, const std::filesystem::path& data_dir);
Dataset loadDataset(const std::filesystem::path& schema_path,
                    const std::filesystem::path& data_dir);

/// Writes one CSV per table, rows sorted by primary key, header first.
void writeDataset(const Dataset& d, const std::filesystem::path& dir);

struct IntegrityViolation {
  ErrorCode code;  // kDuplicatePrimaryKey or kDanglingForeignKey
  std::string table;
  TupleId tuple = 0;
  std::string detail;
};

struct IntegrityReport {
  std::vector<IntegrityViolation> violations;

  [[nodiscard]] bool ok() const { return violations.empty(); }
};

IntegrityReport validateIntegrity(const Dataset& d);

}  // namespace tweakscale

#endif  // TWEAKSCALE_DATASET_IO_HPP_
