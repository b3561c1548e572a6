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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "sentinel/imagery/dataset.hpp"

namespace sentinel::imagery {

struct IngestOptions {
  ImageSource default_source = ImageSource::kOther;
  std::uint64_t split_seed = 0;
  // When set, each image is resized to 416x416 and written here as PNG; the
  // manifest then points at the standardized copies.
  std::optional<std::filesystem::path> standardized_dir;
};

struct SkippedFile {
  std::filesystem::path path;
  std::string reason;
};

struct IngestOutcome {
  DatasetManifest manifest;
  std::vector<SkippedFile> skipped;
};

// Scans `dir` (non-recursive) for PNG/JPEG/TIFF rasters. Labels are read from
// "<stem>.txt" next to the image or in a sibling "labels/" directory. An
// optional "<stem>.meta.json" sidecar may carry source, acquired_at and
// region_tag. Undecodable files are skipped, not fatal.
IngestOutcome IngestDirectory(const std::filesystem::path& dir,
                              const IngestOptions& options = {});

}  // namespace sentinel::imagery
