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
#include <optional>
#include <vector>

#include "sentinel/imagery/dataset.hpp"
#include "sentinel/imagery/image.hpp"

namespace sentinel::imagery {

inline constexpr int kStandardSize = 416;

struct Size2 {
  int width = kStandardSize;
  int height = kStandardSize;
};

// Direct (possibly anisotropic) bilinear resize, half-pixel centers, no
// letterboxing. Normalized annotations are unaffected by construction.
Image ResizeBilinear(const Image& image, Size2 target = {});

struct Range {
  double min = 0;
  double max = 0;
};

struct AugmentationSpec {
  Range scale{1, 1};
  Range rotation_deg{0, 0};
  // Additive, in units of the full 8-bit dynamic range.
  Range brightness_delta{0, 0};
  std::uint64_t seed = 0;

  // Throws kInvalidRange.
  void Validate() const;
};

struct AugmentParams {
  double scale = 1;
  double rotation_deg = 0;
  double brightness_delta = 0;
  friend bool operator==(const AugmentParams&, const AugmentParams&) = default;
};

// Deterministic in (spec.seed, sample_index) and independent of the platform's
// <random> distributions.
AugmentParams SampleAugmentation(const AugmentationSpec& spec,
                                 std::uint64_t sample_index);

struct AugmentResult {
  Image image;
  std::vector<Annotation> annotations;
  AugmentParams params;
};

// Boxes whose hull keeps less than this fraction of its area after clipping
// are dropped.
inline constexpr double kMinRetainedAreaFraction = 0.10;

// Scale and rotate (counter-clockwise for positive angles) about the image
// center on a canvas of unchanged size, then shift brightness.
AugmentResult ApplyAugmentation(const Image& image,
                                const std::vector<Annotation>& annotations,
                                const AugmentParams& params);

AugmentResult Augment(const Image& image,
                      const std::vector<Annotation>& annotations,
                      const AugmentationSpec& spec, std::uint64_t sample_index);

// Box transform used by Augment, exposed for testing.
std::optional<Annotation> TransformAnnotation(const Annotation& annotation,
                                              int width, int height,
                                              const AugmentParams& params);

}  // namespace sentinel::imagery
