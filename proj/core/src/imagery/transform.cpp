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

#include "sentinel/imagery/transform.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include "sentinel/error.hpp"

namespace sentinel::imagery {

namespace {

std::uint8_t RoundToByte(double v) {
  return static_cast<std::uint8_t>(std::clamp(std::floor(v + 0.5), 0.0, 255.0));
}

struct Rotation {
  double cos = 1;
  double sin = 0;
};

// Exact values at quarter turns so 90/180/270 degree rotations are lossless.
Rotation MakeRotation(double degrees) {
  double r = std::fmod(degrees, 360.0);
  if (r < 0) r += 360.0;
  if (r == 0.0) return {1, 0};
  if (r == 90.0) return {0, 1};
  if (r == 180.0) return {-1, 0};
  if (r == 270.0) return {0, -1};
  const double rad = degrees * std::numbers::pi / 180.0;
  return {std::cos(rad), std::sin(rad)};
}

struct Affine {
  double cx, cy, scale;
  Rotation rot;

  // Counter-clockwise on screen (y grows downward).
  std::array<double, 2> Forward(double x, double y) const {
    const double dx = x - cx, dy = y - cy;
    return {cx + scale * (rot.cos * dx + rot.sin * dy),
            cy + scale * (-rot.sin * dx + rot.cos * dy)};
  }
  std::array<double, 2> Inverse(double x, double y) const {
    const double dx = (x - cx) / scale, dy = (y - cy) / scale;
    return {cx + rot.cos * dx - rot.sin * dy, cy + rot.sin * dx + rot.cos * dy};
  }
};

void CheckRange(const Range& r, const char* name) {
  if (!std::isfinite(r.min) || !std::isfinite(r.max) || r.min > r.max) {
    throw Error(ErrorCode::kInvalidRange, std::string(name) + " range has min > max");
  }
}

double Lerp(double a, double b, double t) { return a + (b - a) * t; }

}  // namespace

Image ResizeBilinear(const Image& image, Size2 target) {
  if (image.empty() || target.width <= 0 || target.height <= 0) {
    throw Error(ErrorCode::kZeroDimension, "resize needs non-empty source and target");
  }
  if (image.width == target.width && image.height == target.height) return image;

  const int c = image.channels;
  Image out(target.width, target.height, c);

  struct Tap {
    int i0, i1;
    double frac;
  };
  auto taps = [](int src, int dst) {
    std::vector<Tap> t(static_cast<std::size_t>(dst));
    const double ratio = static_cast<double>(src) / dst;
    for (int d = 0; d < dst; ++d) {
      double s = (d + 0.5) * ratio - 0.5;
      s = std::clamp(s, 0.0, static_cast<double>(src - 1));
      const int i0 = static_cast<int>(std::floor(s));
      t[static_cast<std::size_t>(d)] = {i0, std::min(i0 + 1, src - 1), s - i0};
    }
    return t;
  };
  const auto xs = taps(image.width, target.width);
  const auto ys = taps(image.height, target.height);

  for (int y = 0; y < target.height; ++y) {
    const Tap& ty = ys[static_cast<std::size_t>(y)];
    for (int x = 0; x < target.width; ++x) {
      const Tap& tx = xs[static_cast<std::size_t>(x)];
      for (int ch = 0; ch < c; ++ch) {
        const double top = Lerp(image.at(tx.i0, ty.i0, ch), image.at(tx.i1, ty.i0, ch), tx.frac);
        const double bottom = Lerp(image.at(tx.i0, ty.i1, ch), image.at(tx.i1, ty.i1, ch), tx.frac);
        out.at(x, y, ch) = RoundToByte(Lerp(top, bottom, ty.frac));
      }
    }
  }
  return out;
}

void AugmentationSpec::Validate() const {
  CheckRange(scale, "scale");
  CheckRange(rotation_deg, "rotation");
  CheckRange(brightness_delta, "brightness");
  if (scale.min <= 0) throw Error(ErrorCode::kInvalidRange, "scale must be positive");
  if (brightness_delta.min < -1 || brightness_delta.max > 1) {
    throw Error(ErrorCode::kInvalidRange, "brightness delta must lie in [-1, 1]");
  }
}

AugmentParams SampleAugmentation(const AugmentationSpec& spec,
                                 std::uint64_t sample_index) {
  spec.Validate();
  std::seed_seq seq{static_cast<std::uint32_t>(spec.seed),
                    static_cast<std::uint32_t>(spec.seed >> 32),
                    static_cast<std::uint32_t>(sample_index),
                    static_cast<std::uint32_t>(sample_index >> 32)};
  std::mt19937_64 rng(seq);
  auto draw = [&rng](const Range& r) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    if (r.min == r.max) return r.min;
    return std::min(r.max, r.min + u * (r.max - r.min));
  };
  AugmentParams p;
  p.scale = draw(spec.scale);
  p.rotation_deg = draw(spec.rotation_deg);
  p.brightness_delta = draw(spec.brightness_delta);
  return p;
}

std::optional<Annotation> TransformAnnotation(const Annotation& annotation,
                                              int width, int height,
                                              const AugmentParams& params) {
  const double W = width, H = height;
  const Affine affine{W / 2, H / 2, params.scale, MakeRotation(params.rotation_deg)};
  const auto& b = annotation.bbox;
  const double x0 = (b.cx - b.w / 2) * W, x1 = (b.cx + b.w / 2) * W;
  const double y0 = (b.cy - b.h / 2) * H, y1 = (b.cy + b.h / 2) * H;

  double hx0 = INFINITY, hy0 = INFINITY, hx1 = -INFINITY, hy1 = -INFINITY;
  for (auto [x, y] : {std::array{x0, y0}, std::array{x1, y0}, std::array{x0, y1},
                      std::array{x1, y1}}) {
    const auto p = affine.Forward(x, y);
    hx0 = std::min(hx0, p[0]);
    hx1 = std::max(hx1, p[0]);
    hy0 = std::min(hy0, p[1]);
    hy1 = std::max(hy1, p[1]);
  }
  const double hull_area = (hx1 - hx0) * (hy1 - hy0);
  const double cx0 = std::clamp(hx0, 0.0, W), cx1 = std::clamp(hx1, 0.0, W);
  const double cy0 = std::clamp(hy0, 0.0, H), cy1 = std::clamp(hy1, 0.0, H);
  const double clipped_area = std::max(0.0, cx1 - cx0) * std::max(0.0, cy1 - cy0);
  if (clipped_area <= 0 || clipped_area < kMinRetainedAreaFraction * hull_area) {
    return std::nullopt;
  }
  NormalizedBox out{(cx0 + cx1) / (2 * W), (cy0 + cy1) / (2 * H),
                    std::min(1.0, (cx1 - cx0) / W), std::min(1.0, (cy1 - cy0) / H)};
  return Annotation::Make(annotation.class_label, out);
}

AugmentResult ApplyAugmentation(const Image& image,
                                const std::vector<Annotation>& annotations,
                                const AugmentParams& params) {
  if (image.empty()) throw Error(ErrorCode::kZeroDimension, "cannot augment an empty image");
  AugmentResult result;
  result.params = params;

  const bool geometric = params.scale != 1.0 || MakeRotation(params.rotation_deg).sin != 0.0 ||
                         MakeRotation(params.rotation_deg).cos != 1.0;
  if (!geometric) {
    result.image = image;
    result.annotations = annotations;
  } else {
    const int W = image.width, H = image.height, C = image.channels;
    const Affine affine{W / 2.0, H / 2.0, params.scale, MakeRotation(params.rotation_deg)};
    result.image = Image(W, H, C);
    auto sample = [&](int x, int y, int ch) -> double {
      if (x < 0 || y < 0 || x >= W || y >= H) return 0.0;
      return image.at(x, y, ch);
    };
    for (int y = 0; y < H; ++y) {
      for (int x = 0; x < W; ++x) {
        const auto src = affine.Inverse(x + 0.5, y + 0.5);
        const double sx = src[0] - 0.5, sy = src[1] - 0.5;
        if (sx <= -1 || sy <= -1 || sx >= W || sy >= H) continue;
        const int ix = static_cast<int>(std::floor(sx));
        const int iy = static_cast<int>(std::floor(sy));
        const double fx = sx - ix, fy = sy - iy;
        for (int ch = 0; ch < C; ++ch) {
          const double top = Lerp(sample(ix, iy, ch), sample(ix + 1, iy, ch), fx);
          const double bottom = Lerp(sample(ix, iy + 1, ch), sample(ix + 1, iy + 1, ch), fx);
          result.image.at(x, y, ch) = RoundToByte(Lerp(top, bottom, fy));
        }
      }
    }
    for (const auto& a : annotations) {
      if (auto t = TransformAnnotation(a, W, H, params)) result.annotations.push_back(*t);
    }
  }

  if (params.brightness_delta != 0.0) {
    const double shift = params.brightness_delta * 255.0;
    for (auto& px : result.image.pixels) px = RoundToByte(px + shift);
  }
  return result;
}

AugmentResult Augment(const Image& image, const std::vector<Annotation>& annotations,
                      const AugmentationSpec& spec, std::uint64_t sample_index) {
  return ApplyAugmentation(image, annotations, SampleAugmentation(spec, sample_index));
}

}  // namespace sentinel::imagery
