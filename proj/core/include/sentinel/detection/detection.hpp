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

#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "sentinel/detection/geometry.hpp"
#include "sentinel/labels.hpp"

namespace sentinel::detection {

struct Detection {
  BoundingBox bbox;
  ClassLabel class_label = ClassLabel::kWildfire;
  double confidence = 0;

  friend bool operator==(const Detection&, const Detection&) = default;
};

struct CoverageMetrics {
  double wildfire_pct = 0;
  double smoke_pct = 0;

  double of(ClassLabel label) const {
    return label == ClassLabel::kWildfire ? wildfire_pct : smoke_pct;
  }
  friend bool operator==(const CoverageMetrics&, const CoverageMetrics&) = default;
};

// Percentages are kept at full precision; format to two decimals for display.
std::string FormatPercent(double pct);

struct DetectionResult {
  std::string image_id;
  std::string model_id;
  int image_width = 0;
  int image_height = 0;
  std::vector<Detection> detections;
  double inference_ms = 0;
  CoverageMetrics coverage;

  friend bool operator==(const DetectionResult&, const DetectionResult&) = default;
};

// A backend prediction before thresholding, in input_size coordinates.
struct RawDetection {
  BoundingBox bbox;
  ClassLabel class_label = ClassLabel::kWildfire;
  double confidence = 0;
};

struct BackendOutput {
  std::string model_id;
  std::vector<RawDetection> detections;
};

struct DetectorConfig;

// Drops detections with confidence < threshold, rescales from the input frame
// to the original image frame and clips to its bounds. Boxes that collapse
// after clipping are discarded. Throws kMalformedBackendOutput.
std::vector<Detection> DecodeAndFilter(const std::vector<RawDetection>& raw,
                                       const DetectorConfig& cfg, int image_width,
                                       int image_height);

// Descending confidence; ties by ascending x_min, then y_min.
bool ConfidenceOrder(const Detection& a, const Detection& b);

// Class-wise greedy suppression: a detection is discarded when IoU >= threshold
// against an already kept detection of the same class. Output sorted by
// ConfidenceOrder.
std::vector<Detection> Nms(std::vector<Detection> detections, double iou_threshold);

// Per-class union area as a percentage of the image. Throws kZeroDimension.
CoverageMetrics ComputeCoverage(const std::vector<Detection>& detections,
                                int image_width, int image_height);

// Parses the wire schema {"model_id", "detections":[{"box","class","confidence"}]}.
// Throws kMalformedBackendOutput.
BackendOutput ParseBackendOutput(const nlohmann::json& j);
std::vector<RawDetection> ParseRawDetections(const nlohmann::json& list);
nlohmann::json RawDetectionsToJson(const std::vector<RawDetection>& raw);

void to_json(nlohmann::json& j, const Detection& d);
void from_json(const nlohmann::json& j, Detection& d);
void to_json(nlohmann::json& j, const CoverageMetrics& c);
void from_json(const nlohmann::json& j, CoverageMetrics& c);
void to_json(nlohmann::json& j, const DetectionResult& r);
void from_json(const nlohmann::json& j, DetectionResult& r);

// Results file: {"results": [DetectionResult, ...]}.
std::vector<DetectionResult> LoadResults(const std::string& path);
void SaveResults(const std::vector<DetectionResult>& results, const std::string& path);

}  // namespace sentinel::detection
