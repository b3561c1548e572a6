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

#include <filesystem>
#include <optional>
#include <vector>

#include "sentinel/detection/backend.hpp"
#include "sentinel/imagery/dataset.hpp"
#include "sentinel/metrics/metrics.hpp"

namespace sentinel::service {

// Relative pixel_ref values resolve against `base_dir`.
Image LoadPixels(const imagery::ImageRecord& image, const std::filesystem::path& base_dir);

// Runs the detector over every manifest image (or one split), in manifest
// order.
std::vector<detection::DetectionResult> DetectManifest(
    const imagery::DatasetManifest& manifest, const std::filesystem::path& base_dir,
    detection::DetectorBackend& backend, const detection::DetectorConfig& cfg,
    std::optional<imagery::Split> split = std::nullopt, const Clock& clock = DefaultClock());

// DetectManifest over the evaluation split followed by EvaluateModel.
metrics::MetricsReport EvaluateDetector(const imagery::DatasetManifest& manifest,
                                        const std::filesystem::path& base_dir,
                                        detection::DetectorBackend& backend,
                                        const detection::DetectorConfig& cfg,
                                        const metrics::EvaluationOptions& options = {},
                                        const Clock& clock = DefaultClock());

}  // namespace sentinel::service
