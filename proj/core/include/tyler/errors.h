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

#ifndef TYLER_ERRORS_H_
#define TYLER_ERRORS_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace tyler {

enum class ErrorCode {
  kPositiveDefinitenessLost,
  kNumericalBreakdown,
  kDenominatorNonPositive,
  kZeroVectorInput,
  kMalformedHeader,
  kDimensionMismatch,
  kNonFiniteEntry,
  kAssumptionCheckFailed,
  kInvalidArgument,
  kIo,
};

std::string_view ErrorCodeName(ErrorCode code);

// Every failure raised by the library. `row()` / `col()` locate the offending
// entry for data errors and are -1 otherwise.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, long row = -1,
        long col = -1);

  ErrorCode code() const { return code_; }
  long row() const { return row_; }
  long col() const { return col_; }

 private:
  ErrorCode code_;
  long row_;
  long col_;
};

}  // namespace tyler

#endif  // TYLER_ERRORS_H_
