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
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "sentinel/labels.hpp"
#include "sentinel/time.hpp"

namespace sentinel::imagery {

enum class ImageSource { kLandsat8, kGoes16, kOther };

std::string_view SourceName(ImageSource source);
std::optional<ImageSource> SourceFromName(std::string_view name);

struct ImageRecord {
  std::string id;
  ImageSource source = ImageSource::kOther;
  Timestamp acquired_at{};
  int width_px = 0;
  int height_px = 0;
  std::string pixel_ref;
  std::optional<std::string> region_tag;

  friend bool operator==(const ImageRecord&, const ImageRecord&) = default;
};

// Center-format box in fractions of the image dimensions.
struct NormalizedBox {
  double cx = 0, cy = 0, w = 0, h = 0;
  friend bool operator==(const NormalizedBox&, const NormalizedBox&) = default;
};

struct Annotation {
  ClassLabel class_label = ClassLabel::kWildfire;
  NormalizedBox bbox;

  // Validates 0<=cx,cy<=1 and 0<w,h<=1, then clips the extents into [0,1]^2.
  // Throws Error(kInvalidArgument) when the box cannot be made valid.
  static Annotation Make(ClassLabel label, NormalizedBox box);

  friend bool operator==(const Annotation&, const Annotation&) = default;
};

struct ManifestEntry {
  ImageRecord image;
  std::vector<Annotation> annotations;
  friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

enum class Split { kTrain, kVal, kTest };

std::string_view SplitName(Split split);
std::optional<Split> SplitFromName(std::string_view name);

struct SplitRatios {
  double train = 0.70;
  double val = 0.15;
  double test = 0.15;
  friend bool operator==(const SplitRatios&, const SplitRatios&) = default;
};

struct SplitCounts {
  std::size_t train = 0, val = 0, test = 0;
  friend bool operator==(const SplitCounts&, const SplitCounts&) = default;
};

struct DatasetManifest {
  std::vector<ManifestEntry> entries;
  std::map<std::string, Split> split_of;
  std::uint64_t split_seed = 0;
  SplitRatios ratios;

  const ManifestEntry* Find(std::string_view id) const;
  // Entries assigned to `split`, in manifest order.
  std::vector<const ManifestEntry*> InSplit(Split split) const;
  SplitCounts Counts() const;

  friend bool operator==(const DatasetManifest&, const DatasetManifest&) = default;
};

// floor(70% N) train, floor(15% N) val, remainder test. Exact integer math.
SplitCounts ComputeSplitCounts(std::size_t n);

// Seeded Fisher-Yates over the sorted id set, then slices by
// ComputeSplitCounts. Throws kEmptyManifest / kDuplicateId.
DatasetManifest AssignSplits(DatasetManifest manifest, std::uint64_t seed);

// One object per line: "<class_id> <cx> <cy> <w> <h>".
std::vector<Annotation> ParseAnnotations(std::string_view text);
std::string FormatAnnotations(const std::vector<Annotation>& annotations);
std::vector<Annotation> ReadAnnotationFile(const std::filesystem::path& path);
void WriteAnnotationFile(const std::filesystem::path& path,
                         const std::vector<Annotation>& annotations);

void to_json(nlohmann::json& j, const ImageRecord& r);
void from_json(const nlohmann::json& j, ImageRecord& r);
void to_json(nlohmann::json& j, const Annotation& a);
void from_json(const nlohmann::json& j, Annotation& a);
void to_json(nlohmann::json& j, const DatasetManifest& m);
void from_json(const nlohmann::json& j, DatasetManifest& m);

// Throws kManifestInvalid on schema errors, kUnreadableFile on I/O errors.
DatasetManifest LoadManifest(const std::filesystem::path& path);
void SaveManifest(const DatasetManifest& manifest,
                  const std::filesystem::path& path);

}  // namespace sentinel::imagery
