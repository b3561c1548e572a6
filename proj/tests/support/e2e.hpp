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
#include <string>
#include <utility>
#include <vector>

#include "sentinel/judge/judge.hpp"

namespace sentinel::testing {

struct E2eRun {
  // (file name, content) in a fixed order; compared against golden/ files.
  std::vector<std::pair<std::string, std::string>> outputs;
  judge::ComparisonReport comparison;
};

// Three synthetic images through mock detection, two scripted risk models and
// a scripted judge, with a fixed clock and a single worker.
E2eRun RunDeterministicPipeline(const std::filesystem::path& work_dir);

// Names of outputs that differ from fixtures/e2e/golden. With
// SENTINEL_UPDATE_GOLDEN=1 the golden files are rewritten instead.
std::vector<std::string> GoldenMismatches(const E2eRun& run);

}  // namespace sentinel::testing
