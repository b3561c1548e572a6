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

#include "sentinel/detection/detection.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include <nlohmann/json.hpp>

#include "sentinel/detection/backend.hpp"
#include "sentinel/error.hpp"

namespace sentinel::detection {

using nlohmann::json;

std::string FormatPercent(double pct) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", pct);
  return buf;
}

std::vector<Detection> DecodeAndFilter(const std::vector<RawDetection>& raw,
                                       const DetectorConfig& cfg, int image_width,
                                       int image_height) {
  if (image_width <= 0 || image_height <= 0) {
    throw Error(ErrorCode::kZeroDimension, "original image has zero size");
  }
  const double sx = static_cast<double>(image_width) / cfg.input_width;
  const double sy = static_cast<double>(image_height) / cfg.input_height;

  std::vector<Detection> out;
  for (const auto& r : raw) {
    const auto& b = r.bbox;
    if (!std::isfinite(r.confidence) || r.confidence < 0 || r.confidence > 1) {
      throw Error(ErrorCode::kMalformedBackendOutput, "confidence outside [0, 1]");
    }
    if (!std::isfinite(b.x_min) || !std::isfinite(b.y_min) || !std::isfinite(b.x_max) ||
        !std::isfinite(b.y_max) || b.x_min > b.x_max || b.y_min > b.y_max) {
      throw Error(ErrorCode::kMalformedBackendOutput, "box corners are not ordered");
    }
    if (r.confidence < cfg.confidence_threshold) continue;
    BoundingBox scaled{b.x_min * sx, b.y_min * sy, b.x_max * sx, b.y_max * sy};
    scaled = scaled.Clipped(image_width, image_height);
    if (!scaled.valid()) continue;
    out.push_back({scaled, r.class_label, r.confidence});
  }
  return out;
}

bool ConfidenceOrder(const Detection& a, const Detection& b) {
  if (a.confidence != b.confidence) return a.confidence > b.confidence;
  if (a.bbox.x_min != b.bbox.x_min) return a.bbox.x_min < b.bbox.x_min;
  return a.bbox.y_min < b.bbox.y_min;
}

std::vector<Detection> Nms(std::vector<Detection> detections, double iou_threshold) {
  std::stable_sort(detections.begin(), detections.end(), ConfidenceOrder);
  std::vector<Detection> kept;
  kept.reserve(detections.size());
  for (const auto& d : detections) {
    const bool suppressed = std::any_of(kept.begin(), kept.end(), [&](const Detection& k) {
      return k.class_label == d.class_label && Iou(k.bbox, d.bbox) >= iou_threshold;
    });
    if (!suppressed) kept.push_back(d);
  }
  return kept;
}

CoverageMetrics ComputeCoverage(const std::vector<Detection>& detections,
                                int image_width, int image_height) {
  if (image_width <= 0 || image_height <= 0) {
    throw Error(ErrorCode::kZeroDimension, "coverage needs a non-empty image");
  }
  const double image_area = static_cast<double>(image_width) * image_height;
  auto pct = [&](ClassLabel label) {
    std::vector<BoundingBox> boxes;
    for (const auto& d : detections) {
      if (d.class_label == label) boxes.push_back(d.bbox.Clipped(image_width, image_height));
    }
    return std::clamp(100.0 * UnionArea(boxes) / image_area, 0.0, 100.0);
  };
  return {pct(ClassLabel::kWildfire), pct(ClassLabel::kSmoke)};
}

namespace {

[[noreturn]] void Malformed(const std::string& what) {
  throw Error(ErrorCode::kMalformedBackendOutput, what);
}

BoundingBox BoxFromJson(const json& j) {
  if (!j.is_array() || j.size() != 4) Malformed("box must be [x_min, y_min, x_max, y_max]");
  for (const auto& v : j) {
    if (!v.is_number()) Malformed("box coordinates must be numbers");
  }
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
}

ClassLabel ClassFromJson(const json& j) {
  if (j.is_string()) {
    if (auto c = ClassFromName(j.get<std::string>())) return *c;
  } else if (j.is_number_integer()) {
    if (auto c = ClassFromId(j.get<int>())) return *c;
  }
  Malformed("unknown class " + j.dump());
}

}  // namespace

std::vector<RawDetection> ParseRawDetections(const json& list) {
  if (!list.is_array()) Malformed("detections must be an array");
  std::vector<RawDetection> out;
  out.reserve(list.size());
  for (const auto& d : list) {
    if (!d.is_object() || !d.contains("box") || !d.contains("class") ||
        !d.contains("confidence") || !d.at("confidence").is_number()) {
      Malformed("detection needs box, class and confidence");
    }
    out.push_back({BoxFromJson(d.at("box")), ClassFromJson(d.at("class")),
                   d.at("confidence").get<double>()});
  }
  return out;
}

BackendOutput ParseBackendOutput(const json& j) {
  if (!j.is_object() || !j.contains("detections")) Malformed("missing 'detections'");
  BackendOutput out;
  if (auto it = j.find("model_id"); it != j.end() && it->is_string()) {
    out.model_id = it->get<std::string>();
  }
  out.detections = ParseRawDetections(j.at("detections"));
  return out;
}

json RawDetectionsToJson(const std::vector<RawDetection>& raw) {
  json list = json::array();
  for (const auto& r : raw) {
    list.push_back({{"box", {r.bbox.x_min, r.bbox.y_min, r.bbox.x_max, r.bbox.y_max}},
                    {"class", ClassName(r.class_label)},
                    {"confidence", r.confidence}});
  }
  return list;
}

void to_json(json& j, const Detection& d) {
  j = json{{"box", {d.bbox.x_min, d.bbox.y_min, d.bbox.x_max, d.bbox.y_max}},
           {"class", ClassName(d.class_label)},
           {"confidence", d.confidence}};
}

void from_json(const json& j, Detection& d) {
  const auto& b = j.at("box");
  d.bbox = {b.at(0).get<double>(), b.at(1).get<double>(), b.at(2).get<double>(),
            b.at(3).get<double>()};
  auto label = ClassFromName(j.at("class").get<std::string>());
  if (!label) throw Error(ErrorCode::kInvalidArgument, "unknown class in detection");
  d.class_label = *label;
  d.confidence = j.at("confidence").get<double>();
}

void to_json(json& j, const CoverageMetrics& c) {
  j = json{{"wildfire_pct", c.wildfire_pct}, {"smoke_pct", c.smoke_pct}};
}

void from_json(const json& j, CoverageMetrics& c) {
  c.wildfire_pct = j.at("wildfire_pct").get<double>();
  c.smoke_pct = j.at("smoke_pct").get<double>();
}

void to_json(json& j, const DetectionResult& r) {
  j = json{{"image_id", r.image_id},         {"model_id", r.model_id},
           {"image_width", r.image_width},   {"image_height", r.image_height},
           {"inference_ms", r.inference_ms}, {"detections", r.detections},
           {"coverage", r.coverage}};
}

void from_json(const json& j, DetectionResult& r) {
  r.image_id = j.at("image_id").get<std::string>();
  r.model_id = j.value("model_id", std::string());
  r.image_width = j.at("image_width").get<int>();
  r.image_height = j.at("image_height").get<int>();
  r.inference_ms = j.value("inference_ms", 0.0);
  r.detections = j.at("detections").get<std::vector<Detection>>();
  if (auto it = j.find("coverage"); it != j.end()) {
    r.coverage = it->get<CoverageMetrics>();
  } else {
    r.coverage = ComputeCoverage(r.detections, r.image_width, r.image_height);
  }
}

std::vector<DetectionResult> LoadResults(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kUnreadableFile, "cannot open " + path);
  try {
    const json j = json::parse(in);
    if (j.is_array()) return j.get<std::vector<DetectionResult>>();
    if (j.contains("results")) return j.at("results").get<std::vector<DetectionResult>>();
    return {j.get<DetectionResult>()};
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, path + ": " + e.what());
  }
}

void SaveResults(const std::vector<DetectionResult>& results, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path);
  out << json{{"results", results}}.dump(2) << '\n';
}

}  // namespace sentinel::detection
