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
#include <span>
#include <string_view>
#include <vector>

#include "sentinel/imagery/dataset.hpp"
#include "sentinel/imagery/image.hpp"

namespace sentinel::imagery {

enum class RasterFormat { kPng, kJpeg, kTiff };

std::string_view FormatExtension(RasterFormat format);

// Identifies the container from its magic bytes only; no decoding.
std::optional<RasterFormat> SniffFormat(std::span<const std::uint8_t> bytes);

// Decodes PNG/JPEG/TIFF into an 8-bit gray or RGB buffer. Alpha is dropped
// and 16-bit samples are scaled down.
// Errors: kUnreadableFile (empty), kUnsupportedFormat, kZeroDimension.
Image DecodeImage(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> EncodePng(const Image& image);
std::vector<std::uint8_t> EncodeJpeg(const Image& image, int quality = 95);

struct LoadedImage {
  ImageRecord record;
  Image pixels;
};

// Record id is the file stem, acquired_at the file's modification time.
LoadedImage LoadImage(const std::filesystem::path& path);

std::vector<std::uint8_t> ReadFileBytes(const std::filesystem::path& path);
void WriteFileBytes(const std::filesystem::path& path,
                    std::span<const std::uint8_t> bytes);

}  // namespace sentinel::imagery
