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

#include "tweakscale/error.hpp"

namespace tweakscale {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kSchemaParseError: return "SchemaParseError";
    case ErrorCode::kMissingTableFile: return "MissingTableFile";
    case ErrorCode::kDuplicatePrimaryKey: return "DuplicatePrimaryKey";
    case ErrorCode::kDanglingForeignKey: return "DanglingForeignKey";
    case ErrorCode::kCyclicSchema: return "CyclicSchema";
    case ErrorCode::kPendingEmptyCells: return "PendingEmptyCells";
    case ErrorCode::kIoFailure: return "IoFailure";
    case ErrorCode::kDuplicateToolName: return "DuplicateToolName";
    case ErrorCode::kMalformedModification: return "MalformedModification";
    case ErrorCode::kNotCurrentTool: return "NotCurrentTool";
    case ErrorCode::kStaleVerdict: return "StaleVerdict";
    case ErrorCode::kTargetInfeasible: return "TargetInfeasible";
    case ErrorCode::kCoordinatorExhausted: return "CoordinatorExhausted";
    case ErrorCode::kGraphTooLarge: return "GraphTooLarge";
    case ErrorCode::kInfeasibleTarget: return "InfeasibleTarget";
    case ErrorCode::kInfeasibleRepair: return "InfeasibleRepair";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kGroupMismatch: return "GroupMismatch";
    case ErrorCode::kBindingMismatch: return "BindingMismatch";
    case ErrorCode::kSpecMismatch: return "SpecMismatch";
    case ErrorCode::kZeroTruth: return "ZeroTruth";
    case ErrorCode::kConfigError: return "ConfigError";
  }
  return "Unknown";
}

}  // namespace tweakscale
