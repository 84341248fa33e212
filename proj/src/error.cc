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

#include "revise/error.h"

namespace revise {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kIoError:
      return "IoError";
    case ErrorCode::kMissingIdColumn:
      return "MissingIdColumn";
    case ErrorCode::kNonNumericCell:
      return "NonNumericCell";
    case ErrorCode::kConstantColumn:
      return "ConstantColumn";
    case ErrorCode::kDuplicateId:
      return "DuplicateId";
    case ErrorCode::kMalformedRow:
      return "MalformedRow";
    case ErrorCode::kInvalidLabel:
      return "InvalidLabel";
    case ErrorCode::kOutOfRange:
      return "OutOfRange";
    case ErrorCode::kSchemaMismatch:
      return "SchemaMismatch";
    case ErrorCode::kNoLabels:
      return "NoLabels";
    case ErrorCode::kSingleClassData:
      return "SingleClassData";
    case ErrorCode::kMalformedModel:
      return "MalformedModel";
    case ErrorCode::kTooManyFeatures:
      return "TooManyFeatures";
    case ErrorCode::kEmptyBackground:
      return "EmptyBackground";
    case ErrorCode::kUnknownFeature:
      return "UnknownFeature";
    case ErrorCode::kUngroupedVector:
      return "UngroupedVector";
    case ErrorCode::kSameSubject:
      return "SameSubject";
    case ErrorCode::kNotACandidate:
      return "NotACandidate";
    case ErrorCode::kEmptyPath:
      return "EmptyPath";
    case ErrorCode::kUnknownSubject:
      return "UnknownSubject";
    case ErrorCode::kEfficiencyViolation:
      return "EfficiencyViolation";
    case ErrorCode::kInvalidArgument:
      return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace revise
