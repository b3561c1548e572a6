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

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace sentinel {

// 8-bit raster, row-major, channels interleaved (1 = gray, 3 = RGB).
struct Image {
  int width = 0;
  int height = 0;
  int channels = 0;
  std::vector<std::uint8_t> pixels;

  Image() = default;
  Image(int w, int h, int c, std::uint8_t fill = 0)
      : width(w), height(h), channels(c),
        pixels(static_cast<std::size_t>(w) * h * c, fill) {}

  bool empty() const { return width <= 0 || height <= 0 || pixels.empty(); }
  std::size_t stride() const { return static_cast<std::size_t>(width) * channels; }

  std::uint8_t at(int x, int y, int c) const {
    return pixels[static_cast<std::size_t>(y) * stride() +
                  static_cast<std::size_t>(x) * channels + c];
  }
  std::uint8_t& at(int x, int y, int c) {
    return pixels[static_cast<std::size_t>(y) * stride() +
                  static_cast<std::size_t>(x) * channels + c];
  }
  std::span<const std::uint8_t> row(int y) const {
    return {pixels.data() + static_cast<std::size_t>(y) * stride(), stride()};
  }

  friend bool operator==(const Image&, const Image&) = default;
};

}  // namespace sentinel
