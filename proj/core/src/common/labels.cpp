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

#include "sentinel/labels.hpp"

namespace sentinel {

std::string_view ClassName(ClassLabel label) {
  return label == ClassLabel::kWildfire ? "wildfire" : "smoke";
}

std::optional<ClassLabel> ClassFromName(std::string_view name) {
  if (name == "wildfire") return ClassLabel::kWildfire;
  if (name == "smoke") return ClassLabel::kSmoke;
  return std::nullopt;
}

std::optional<ClassLabel> ClassFromId(int id) {
  if (id == 0) return ClassLabel::kWildfire;
  if (id == 1) return ClassLabel::kSmoke;
  return std::nullopt;
}

}  // namespace sentinel
