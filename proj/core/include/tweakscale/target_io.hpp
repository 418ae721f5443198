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

#ifndef TWEAKSCALE_TARGET_IO_HPP_
#define TWEAKSCALE_TARGET_IO_HPP_

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "tweakscale/metrics.hpp"
#include "tweakscale/rand_scaler.hpp"

namespace tweakscale {

/// {"table": count, ...}. Throws Error(kConfigError).
SizeTarget parseSizeTarget(std::string_view json_text);
SizeTarget loadSizeTarget(const std::filesystem::path& path);
std::string sizeTargetToJson(const SizeTarget& sizes);

/// A targets document is either one target object or
/// {"linear":[...],"coappear":[...],"pairwise":[...]}. Linear targets are
/// {"chain":[tables, referencing end first],"h":[[...],...]} where row j
/// lists h(j,0..j-1) and may carry the diagonal as a trailing entry.
/// Coappear targets are {"group":{"referencing","referenced"},"entries":[{"v","count"}]}.
/// Pairwise targets are {"binding":{...},"rhoN":[{"x","y","count"}],"rhoS":[{"x","count"}]};
/// the (0,0) and x = 0 entries set the explicit zero masses.
/// Throws Error(kConfigError) on malformed input and Error(kSpecMismatch)
/// when a target names something the schema lacks.
FeatureTargets parseTargets(const DatasetSchema& schema, std::string_view json_text);
FeatureTargets loadTargets(const DatasetSchema& schema, const std::filesystem::path& path);
std::string targetsToJson(const FeatureTargets& targets);

std::string linearTargetToJson(const LinearJoinMatrix& m);
std::string coappearTargetToJson(const CoappearDistribution& c);
std::string pairwiseTargetToJson(const PairwiseDistribution& p);

/// JSON array of {"name","kind",...kind parameters}.
std::vector<QuerySpec> parseQueries(const DatasetSchema& schema, std::string_view json_text);
std::vector<QuerySpec> loadQueries(const DatasetSchema& schema, const std::filesystem::path& path);

/// Reads a whole file; throws Error(kIoFailure).
std::string readFile(const std::filesystem::path& path);
/// Writes a whole file, creating parent directories; throws Error(kIoFailure).
void writeFile(const std::filesystem::path& path, std::string_view text);

}  // namespace tweakscale

#endif  // TWEAKSCALE_TARGET_IO_HPP_
