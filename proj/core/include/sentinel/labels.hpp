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

#include <array>
#include <optional>
#include <string_view>

namespace sentinel {

// File-level class ids are fixed: 0 = wildfire, 1 = smoke.
enum class ClassLabel { kWildfire = 0, kSmoke = 1 };

inline constexpr std::array<ClassLabel, 2> kAllClasses = {ClassLabel::kWildfire,
                                                          ClassLabel::kSmoke};

constexpr int ClassId(ClassLabel label) { return static_cast<int>(label); }

std::string_view ClassName(ClassLabel label);
std::optional<ClassLabel> ClassFromName(std::string_view name);
std::optional<ClassLabel> ClassFromId(int id);

}  // namespace sentinel
