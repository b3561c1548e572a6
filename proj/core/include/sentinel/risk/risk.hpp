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

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "sentinel/detection/detection.hpp"
#include "sentinel/imagery/image.hpp"
#include "sentinel/risk/client.hpp"

namespace sentinel::risk {

struct DetectionSummary {
  int image_width = 0;
  int image_height = 0;
  double smoke_coverage_pct = 0;
  double wildfire_coverage_pct = 0;
  std::vector<detection::Detection> boxes;

  static DetectionSummary From(const detection::DetectionResult& result);
  friend bool operator==(const DetectionSummary&, const DetectionSummary&) = default;
};

enum class Severity { kLow, kModerate, kHigh, kExtreme };

std::string_view SeverityName(Severity s);
std::optional<Severity> SeverityFromName(std::string_view name);

// Coverage cut points (total = wildfire + smoke, capped at 100):
// < low_below -> low, < moderate_below -> moderate, < high_below -> high,
// otherwise extreme.
struct SeverityThresholds {
  double low_below = 1.0;
  double moderate_below = 5.0;
  double high_below = 15.0;
};

Severity ClassifySeverityFallback(const detection::CoverageMetrics& coverage,
                                  const SeverityThresholds& thresholds = {});

enum class SeveritySource { kParsed, kCoverageFallback };

struct RiskReport {
  std::string image_id;
  std::string general_observations;
  std::string fire_behavior;
  std::string spread_potential;
  Severity severity = Severity::kLow;
  SeveritySource severity_source = SeveritySource::kParsed;
  std::vector<std::string> critical_risks;
  std::vector<std::string> recommendations;
  std::string raw_response;
  std::string source_model;
  DetectionSummary summary;
  // Set when any field had to be filled from coverage instead of the reply.
  bool degraded = false;

  friend bool operator==(const RiskReport&, const RiskReport&) = default;
};

// The analyst prompt. Only the "Input Parameters" line depends on `summary`;
// boxes reach the model through the attached overlay image.
std::string BuildPrompt(const DetectionSummary& summary);

// Fixed lines of the prompt, exposed for completeness checks.
extern const std::string_view kRoleLine;
extern const std::vector<std::string_view> kAnalysisRequirements;
extern const std::string_view kKeyConsiderations;

// Tolerant section parser; never fails on non-empty input.
// Throws kEmptyResponse for blank text.
RiskReport ParseReport(std::string_view raw, const DetectionSummary& summary,
                       std::string_view model,
                       const SeverityThresholds& thresholds = {});

// Boxes drawn in class colors (wildfire red, smoke gray), 2 px outline.
Image RenderOverlay(const Image& image, const std::vector<detection::Detection>& detections);

// BuildPrompt -> client.Complete (overlay image attached) -> ParseReport.
// Client errors propagate unchanged.
RiskReport AssessRisk(const Image& image, const detection::DetectionResult& result,
                      ChatClient& client, const GenerationParams& params,
                      const SeverityThresholds& thresholds = {});

void to_json(nlohmann::json& j, const DetectionSummary& s);
void from_json(const nlohmann::json& j, DetectionSummary& s);
void to_json(nlohmann::json& j, const RiskReport& r);
void from_json(const nlohmann::json& j, RiskReport& r);

RiskReport LoadReport(const std::string& path);
void SaveReport(const RiskReport& report, const std::string& path);

}  // namespace sentinel::risk
