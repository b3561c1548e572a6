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
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "sentinel/imagery/image.hpp"

namespace sentinel::testing {

std::filesystem::path FixturePath(std::string_view relative);
std::string ReadText(const std::filesystem::path& path);
void WriteText(const std::filesystem::path& path, std::string_view text);

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(std::string_view name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

// Deterministic RGB test pattern: gradients plus seeded speckle.
Image SyntheticImage(int width, int height, std::uint64_t seed, int channels = 3);
std::vector<std::uint8_t> SyntheticPng(int width, int height, std::uint64_t seed);

// Uniform integer in [lo, hi].
int UniformInt(std::mt19937_64& rng, int lo, int hi);

// True when SENTINEL_UPDATE_GOLDEN=1; golden comparisons then rewrite files.
bool UpdateGolden();

}  // namespace sentinel::testing
