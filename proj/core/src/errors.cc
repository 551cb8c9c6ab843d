// Copyright 2026 The Tyler-FW Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "tyler/errors.h"

namespace tyler {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kPositiveDefinitenessLost:
      return "PositiveDefinitenessLost";
    case ErrorCode::kNumericalBreakdown:
      return "NumericalBreakdown";
    case ErrorCode::kDenominatorNonPositive:
      return "DenominatorNonPositive";
    case ErrorCode::kZeroVectorInput:
      return "ZeroVectorInput";
    case ErrorCode::kMalformedHeader:
      return "MalformedHeader";
    case ErrorCode::kDimensionMismatch:
      return "DimensionMismatch";
    case ErrorCode::kNonFiniteEntry:
      return "NonFiniteEntry";
    case ErrorCode::kAssumptionCheckFailed:
      return "AssumptionCheckFailed";
    case ErrorCode::kInvalidArgument:
      return "InvalidArgument";
    case ErrorCode::kIo:
      return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message, long row, long col)
    : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
      code_(code),
      row_(row),
      col_(col) {}

}  // namespace tyler
