// Copyright 2026 The Sentinel Authors
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

#include "sentinel/error.hpp"

namespace sentinel {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kUnreadableFile: return "UnreadableFile";
    case ErrorCode::kUnsupportedFormat: return "UnsupportedFormat";
    case ErrorCode::kZeroDimension: return "ZeroDimension";
    case ErrorCode::kEmptyManifest: return "EmptyManifest";
    case ErrorCode::kInvalidRange: return "InvalidRange";
    case ErrorCode::kManifestInvalid: return "ManifestInvalid";
    case ErrorCode::kMalformedBackendOutput: return "MalformedBackendOutput";
    case ErrorCode::kBackendUnavailable: return "BackendUnavailable";
    case ErrorCode::kInferenceTimeout: return "InferenceTimeout";
    case ErrorCode::kNoGroundTruth: return "NoGroundTruth";
    case ErrorCode::kEmptyCurve: return "EmptyCurve";
    case ErrorCode::kMissingResults: return "MissingResults";
    case ErrorCode::kAuthFailure: return "AuthFailure";
    case ErrorCode::kRateLimited: return "RateLimited";
    case ErrorCode::kProviderError: return "ProviderError";
    case ErrorCode::kTimeout: return "Timeout";
    case ErrorCode::kEmptyResponse: return "EmptyResponse";
    case ErrorCode::kUnparseableScore: return "UnparseableScore";
    case ErrorCode::kOutOfRangeScore: return "OutOfRangeScore";
    case ErrorCode::kEmptyScoreSet: return "EmptyScoreSet";
    case ErrorCode::kMismatchedItemSets: return "MismatchedItemSets";
    case ErrorCode::kDuplicateId: return "DuplicateId";
    case ErrorCode::kForeignKeyViolation: return "ForeignKeyViolation";
    case ErrorCode::kNotFound: return "NotFound";
    case ErrorCode::kTooFewPoints: return "TooFewPoints";
    case ErrorCode::kNonMonotonicTime: return "NonMonotonicTime";
    case ErrorCode::kStorageCorrupt: return "StorageCorrupt";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kUnsupported: return "Unsupported";
    case ErrorCode::kPayloadTooLarge: return "PayloadTooLarge";
    case ErrorCode::kQueueFull: return "QueueFull";
    case ErrorCode::kNotReady: return "NotReady";
    case ErrorCode::kUnauthorized: return "Unauthorized";
  }
  return "Unknown";
}

}  // namespace sentinel
