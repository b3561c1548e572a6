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

#include <span>

namespace sentinel::detection {

// Absolute pixel box, origin top-left, half-open extents [min, max).
struct BoundingBox {
  double x_min = 0, y_min = 0, x_max = 0, y_max = 0;

  double width() const { return x_max - x_min; }
  double height() const { return y_max - y_min; }
  double area() const { return width() * height(); }
  bool valid() const { return x_min < x_max && y_min < y_max; }

  // Intersection with [0, w] x [0, h]; may become invalid.
  BoundingBox Clipped(double w, double h) const;

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

double IntersectionArea(const BoundingBox& a, const BoundingBox& b);

// Intersection over union; 0 for disjoint boxes.
double Iou(const BoundingBox& a, const BoundingBox& b);

// Area of the geometric union (overlaps counted once), by a coordinate
// compressed sweep over x with merged y-intervals per slab.
double UnionArea(std::span<const BoundingBox> boxes);

}  // namespace sentinel::detection
