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

#include "sentinel/service/pipeline.hpp"

#include "sentinel/imagery/raster.hpp"

namespace sentinel::service {

Image LoadPixels(const imagery::ImageRecord& image, const std::filesystem::path& base_dir) {
  std::filesystem::path ref(image.pixel_ref);
  if (ref.is_relative()) ref = base_dir / ref;
  return imagery::DecodeImage(imagery::ReadFileBytes(ref));
}

std::vector<detection::DetectionResult> DetectManifest(
    const imagery::DatasetManifest& manifest, const std::filesystem::path& base_dir,
    detection::DetectorBackend& backend, const detection::DetectorConfig& cfg,
    std::optional<imagery::Split> split, const Clock& clock) {
  cfg.Validate();
  std::vector<detection::DetectionResult> out;
  for (const auto& entry : manifest.entries) {
    if (split) {
      auto it = manifest.split_of.find(entry.image.id);
      if (it == manifest.split_of.end() || it->second != *split) continue;
    }
    const Image pixels = LoadPixels(entry.image, base_dir);
    out.push_back(detection::Detect(entry.image, pixels, backend, cfg, clock));
  }
  return out;
}

metrics::MetricsReport EvaluateDetector(const imagery::DatasetManifest& manifest,
                                        const std::filesystem::path& base_dir,
                                        detection::DetectorBackend& backend,
                                        const detection::DetectorConfig& cfg,
                                        const metrics::EvaluationOptions& options,
                                        const Clock& clock) {
  const auto results = DetectManifest(manifest, base_dir, backend, cfg, options.split, clock);
  return metrics::EvaluateModel(manifest, results, options);
}

}  // namespace sentinel::service
