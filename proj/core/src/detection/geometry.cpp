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

#include "sentinel/detection/geometry.hpp"

#include <algorithm>
#include <utility>
#include <vector>

namespace sentinel::detection {

BoundingBox BoundingBox::Clipped(double w, double h) const {
  return {std::clamp(x_min, 0.0, w), std::clamp(y_min, 0.0, h),
          std::clamp(x_max, 0.0, w), std::clamp(y_max, 0.0, h)};
}

double IntersectionArea(const BoundingBox& a, const BoundingBox& b) {
  const double iw = std::min(a.x_max, b.x_max) - std::max(a.x_min, b.x_min);
  const double ih = std::min(a.y_max, b.y_max) - std::max(a.y_min, b.y_min);
  if (iw <= 0 || ih <= 0) return 0.0;
  return iw * ih;
}

double Iou(const BoundingBox& a, const BoundingBox& b) {
  const double inter = IntersectionArea(a, b);
  if (inter <= 0) return 0.0;
  const double uni = a.area() + b.area() - inter;
  if (uni <= 0) return 0.0;
  return std::min(1.0, inter / uni);
}

double UnionArea(std::span<const BoundingBox> boxes) {
  std::vector<double> xs;
  xs.reserve(boxes.size() * 2);
  for (const auto& b : boxes) {
    if (!b.valid()) continue;
    xs.push_back(b.x_min);
    xs.push_back(b.x_max);
  }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

  double total = 0;
  std::vector<std::pair<double, double>> spans;
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    const double left = xs[i], right = xs[i + 1];
    spans.clear();
    for (const auto& b : boxes) {
      if (b.valid() && b.x_min <= left && b.x_max >= right) {
        spans.emplace_back(b.y_min, b.y_max);
      }
    }
    if (spans.empty()) continue;
    std::sort(spans.begin(), spans.end());
    double covered = 0;
    double lo = spans.front().first, hi = spans.front().second;
    for (const auto& [y0, y1] : spans) {
      if (y0 > hi) {
        covered += hi - lo;
        lo = y0;
        hi = y1;
      } else {
        hi = std::max(hi, y1);
      }
    }
    covered += hi - lo;
    total += covered * (right - left);
  }
  return total;
}

}  // namespace sentinel::detection
