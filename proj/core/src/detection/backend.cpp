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

#include "sentinel/detection/backend.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "sentinel/error.hpp"
#include "sentinel/imagery/transform.hpp"

namespace sentinel::detection {

using nlohmann::json;

BackendSpec BackendSpec::Parse(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos || colon + 1 == text.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "backend must look like model:<path>, remote:<url> or mock:<path>");
  }
  const auto kind = text.substr(0, colon);
  BackendSpec spec;
  spec.location = std::string(text.substr(colon + 1));
  if (kind == "model") {
    spec.kind = Kind::kModelFile;
  } else if (kind == "remote") {
    spec.kind = Kind::kRemote;
  } else if (kind == "mock") {
    spec.kind = Kind::kMock;
  } else {
    throw Error(ErrorCode::kInvalidArgument, "unknown backend kind '" + std::string(kind) + "'");
  }
  return spec;
}

std::string BackendSpec::ToString() const {
  switch (kind) {
    case Kind::kModelFile: return "model:" + location;
    case Kind::kRemote: return "remote:" + location;
    case Kind::kMock: return "mock:" + location;
  }
  return location;
}

void DetectorConfig::Validate() const {
  auto unit = [](double v) { return v >= 0 && v <= 1; };
  if (!unit(confidence_threshold) || !unit(nms_iou_threshold)) {
    throw Error(ErrorCode::kInvalidArgument, "detector thresholds must lie in [0, 1]");
  }
  if (input_width <= 0 || input_height <= 0) {
    throw Error(ErrorCode::kZeroDimension, "detector input size must be positive");
  }
  if (timeout_ms <= 0) throw Error(ErrorCode::kInvalidArgument, "timeout must be positive");
}

MockBackend::MockBackend(const std::filesystem::path& script) : model_id_("mock") {
  std::ifstream in(script, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::kBackendUnavailable, "cannot open mock script " + script.string());
  }
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kMalformedBackendOutput, script.string() + ": " + e.what());
  }
  const json* images = &j;
  if (j.contains("images") && j.at("images").is_object()) {
    images = &j.at("images");
    model_id_ = j.value("model_id", model_id_);
  }
  if (!images->is_object()) {
    throw Error(ErrorCode::kMalformedBackendOutput, "mock script must map image id to detections");
  }
  for (const auto& [id, dets] : images->items()) script_.emplace(id, ParseRawDetections(dets));
}

MockBackend::MockBackend(std::string model_id,
                         std::unordered_map<std::string, std::vector<RawDetection>> script)
    : model_id_(std::move(model_id)), script_(std::move(script)) {}

BackendOutput MockBackend::Infer(const InferenceInput& input) {
  BackendOutput out;
  out.model_id = model_id_;
  if (auto it = script_.find(std::string(input.image_id)); it != script_.end()) {
    out.detections = it->second;
  }
  return out;
}

std::unique_ptr<DetectorBackend> MakeBackend(const DetectorConfig& cfg) {
  switch (cfg.backend.kind) {
    case BackendSpec::Kind::kMock:
      return std::make_unique<MockBackend>(cfg.backend.location);
    case BackendSpec::Kind::kRemote:
      return std::make_unique<RemoteBackend>(cfg.backend.location, cfg.timeout_ms);
    case BackendSpec::Kind::kModelFile:
      return std::make_unique<ModelFileBackend>(cfg.backend.location, cfg.input_width,
                                                cfg.input_height);
  }
  throw Error(ErrorCode::kBackendUnavailable, "unknown backend");
}

BackendFactory MakeBackendFactory(const DetectorConfig& cfg) {
  return [cfg] { return MakeBackend(cfg); };
}

BackendPool::BackendPool(const BackendFactory& factory, std::size_t size) : size_(size) {
  if (size == 0) throw Error(ErrorCode::kInvalidArgument, "backend pool needs at least one handle");
  idle_.reserve(size);
  for (std::size_t i = 0; i < size; ++i) idle_.push_back(factory());
}

BackendPool::Lease::~Lease() {
  if (backend_) pool_->Release(std::move(backend_));
}

BackendPool::Lease BackendPool::Acquire() {
  std::unique_lock lock(mu_);
  available_.wait(lock, [this] { return !idle_.empty(); });
  auto backend = std::move(idle_.back());
  idle_.pop_back();
  return Lease(this, std::move(backend));
}

void BackendPool::Release(std::unique_ptr<DetectorBackend> backend) {
  {
    std::lock_guard lock(mu_);
    idle_.push_back(std::move(backend));
  }
  available_.notify_one();
}

DetectionResult Detect(const imagery::ImageRecord& record, const Image& pixels,
                       DetectorBackend& backend, const DetectorConfig& cfg,
                       const Clock& clock) {
  cfg.Validate();
  if (pixels.empty()) throw Error(ErrorCode::kZeroDimension, "image '" + record.id + "' is empty");
  const Image input =
      imagery::ResizeBilinear(pixels, {cfg.input_width, cfg.input_height});

  const double start = clock.SteadyMillis();
  BackendOutput raw = backend.Infer({record.id, input});
  const double elapsed = clock.SteadyMillis() - start;

  DetectionResult result;
  result.image_id = record.id;
  result.model_id = raw.model_id;
  result.image_width = pixels.width;
  result.image_height = pixels.height;
  result.inference_ms = std::max(0.0, elapsed);
  result.detections = Nms(DecodeAndFilter(raw.detections, cfg, pixels.width, pixels.height),
                          cfg.nms_iou_threshold);
  result.coverage = ComputeCoverage(result.detections, pixels.width, pixels.height);
  return result;
}

}  // namespace sentinel::detection
