/*
 * Copyright 2026 The Revise Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef REVISE_ERROR_H_
#define REVISE_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace revise {

// Domain error kinds. The names are part of the wire format: the service
// reports them verbatim in the `code` field of error documents.
enum class ErrorCode {
  kIoError,
  kMissingIdColumn,
  kNonNumericCell,
  kConstantColumn,
  kDuplicateId,
  kMalformedRow,
  kInvalidLabel,
  kOutOfRange,
  kSchemaMismatch,
  kNoLabels,
  kSingleClassData,
  kMalformedModel,
  kTooManyFeatures,
  kEmptyBackground,
  kUnknownFeature,
  kUngroupedVector,
  kSameSubject,
  kNotACandidate,
  kEmptyPath,
  kUnknownSubject,
  kEfficiencyViolation,
  kInvalidArgument,
};

std::string_view ErrorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace revise

#endif  // REVISE_ERROR_H_
