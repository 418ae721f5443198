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

#ifndef TWEAKSCALE_ERROR_HPP_
#define TWEAKSCALE_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace tweakscale {

enum class ErrorCode {
  kSchemaParseError,
  kMissingTableFile,
  kDuplicatePrimaryKey,
  kDanglingForeignKey,
  kCyclicSchema,
  kPendingEmptyCells,
  kIoFailure,
  kDuplicateToolName,
  kMalformedModification,
  kNotCurrentTool,
  kStaleVerdict,
  kTargetInfeasible,
  kCoordinatorExhausted,
  kGraphTooLarge,
  kInfeasibleTarget,
  kInfeasibleRepair,
  kShapeMismatch,
  kGroupMismatch,
  kBindingMismatch,
  kSpecMismatch,
  kZeroTruth,
  kConfigError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above so the
/// CLI can map it onto an exit status and a machine-readable record.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace tweakscale

#endif  // TWEAKSCALE_ERROR_HPP_
