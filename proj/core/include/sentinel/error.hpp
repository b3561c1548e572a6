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

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace sentinel {

enum class ErrorCode {
  kInvalidArgument,
  // imagery
  kUnreadableFile,
  kUnsupportedFormat,
  kZeroDimension,
  kEmptyManifest,
  kInvalidRange,
  kManifestInvalid,
  // detection
  kMalformedBackendOutput,
  kBackendUnavailable,
  kInferenceTimeout,
  // metrics
  kNoGroundTruth,
  kEmptyCurve,
  kMissingResults,
  // risk
  kAuthFailure,
  kRateLimited,
  kProviderError,
  kTimeout,
  kEmptyResponse,
  // judge
  kUnparseableScore,
  kOutOfRangeScore,
  kEmptyScoreSet,
  kMismatchedItemSets,
  // store
  kDuplicateId,
  kForeignKeyViolation,
  kNotFound,
  kTooFewPoints,
  kNonMonotonicTime,
  kStorageCorrupt,
  kIoError,
  kUnsupported,
  // service
  kPayloadTooLarge,
  kQueueFull,
  kNotReady,
  kUnauthorized,
};

std::string_view ErrorCodeName(ErrorCode code);

// Single exception type for the library; callers branch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message,
        std::vector<std::string> details = {})
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
        code_(code),
        details_(std::move(details)) {}

  ErrorCode code() const noexcept { return code_; }
  // Extra structured context, e.g. the image ids missing from an evaluation.
  const std::vector<std::string>& details() const noexcept { return details_; }

 private:
  ErrorCode code_;
  std::vector<std::string> details_;
};

}  // namespace sentinel
