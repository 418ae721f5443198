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

#ifndef TWEAKSCALE_VIOLATION_HPP_
#define TWEAKSCALE_VIOLATION_HPP_

#include <string>

namespace tweakscale {

/// One failed necessity condition, e.g. {"L2", "h(4,1) > h(3,1)"}.
struct Violation {
  std::string condition;
  std::string detail;
};

}  // namespace tweakscale

#endif  // TWEAKSCALE_VIOLATION_HPP_
