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

#ifndef TWEAKSCALE_RAND_SCALER_HPP_
#define TWEAKSCALE_RAND_SCALER_HPP_

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>

#include "tweakscale/dataset.hpp"

namespace tweakscale {

/// Target tuple count per table name.
using SizeTarget = std::map<std::string, std::size_t>;

SizeTarget currentSizes(const Dataset& d);

/// Random size scaling. Output keys are dense 1..n, foreign keys uniform over
/// the referenced keys, other columns resampled from `d`'s column values.
/// Throws Error(kInfeasibleTarget) when a non-empty table would reference an
/// empty one and Error(kConfigError) when a table has no target.
Dataset randScale(const Dataset& d, const SizeTarget& target, std::uint64_t seed);

}  // namespace tweakscale

#endif  // TWEAKSCALE_RAND_SCALER_HPP_
