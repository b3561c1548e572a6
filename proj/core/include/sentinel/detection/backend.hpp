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

#include <condition_variable>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "sentinel/detection/detection.hpp"
#include "sentinel/imagery/dataset.hpp"
#include "sentinel/imagery/image.hpp"
#include "sentinel/time.hpp"

namespace sentinel::detection {

struct BackendSpec {
  enum class Kind { kModelFile, kRemote, kMock };
  Kind kind = Kind::kMock;
  std::string location;

  // "model:<path>", "remote:<url>" or "mock:<path>".
  static BackendSpec Parse(std::string_view text);
  std::string ToString() const;
};

struct DetectorConfig {
  BackendSpec backend;
  double confidence_threshold = 0.25;
  double nms_iou_threshold = 0.5;
  int input_width = 416;
  int input_height = 416;
  int timeout_ms = 30000;

  // Throws kInvalidArgument.
  void Validate() const;
};

struct InferenceInput {
  std::string_view image_id;
  // Already resized to the configured input size.
  const Image& pixels;
};

// One handle serves one inference at a time; see BackendPool.
class DetectorBackend {
 public:
  virtual ~DetectorBackend() = default;
  virtual BackendOutput Infer(const InferenceInput& input) = 0;
};

// Scripted detections keyed by image id; ids absent from the script yield no
// detections. Script: {"model_id": str, "images": {id: [det, ...]}} or a bare
// {id: [det, ...]} map.
class MockBackend final : public DetectorBackend {
 public:
  explicit MockBackend(const std::filesystem::path& script);
  MockBackend(std::string model_id,
              std::unordered_map<std::string, std::vector<RawDetection>> script);

  BackendOutput Infer(const InferenceInput& input) override;

 private:
  std::string model_id_;
  std::unordered_map<std::string, std::vector<RawDetection>> script_;
};

// POSTs raw interleaved 8-bit pixels with X-Image-Width/Height/Channels/Id
// headers; expects the wire JSON in input-size coordinates.
class RemoteBackend final : public DetectorBackend {
 public:
  RemoteBackend(std::string url, int timeout_ms);
  ~RemoteBackend() override;

  BackendOutput Infer(const InferenceInput& input) override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Runs an ONNX network taking a (1,3,H,W) RGB tensor scaled to [0,1]. The
// output is decoded as YOLO-style rows (cx, cy, w, h, score_wildfire,
// score_smoke) in either (1,6,N) or (1,N,6) layout.
class ModelFileBackend final : public DetectorBackend {
 public:
  ModelFileBackend(const std::filesystem::path& model_path, int input_width,
                   int input_height);
  ~ModelFileBackend() override;

  BackendOutput Infer(const InferenceInput& input) override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

using BackendFactory = std::function<std::unique_ptr<DetectorBackend>()>;

// The backend for `cfg`. Throws kBackendUnavailable when it cannot be loaded.
std::unique_ptr<DetectorBackend> MakeBackend(const DetectorConfig& cfg);
BackendFactory MakeBackendFactory(const DetectorConfig& cfg);

// Fixed set of handles; Acquire blocks until one is free.
class BackendPool {
 public:
  BackendPool(const BackendFactory& factory, std::size_t size);

  class Lease {
   public:
    Lease(BackendPool* pool, std::unique_ptr<DetectorBackend> backend)
        : pool_(pool), backend_(std::move(backend)) {}
    Lease(Lease&&) noexcept = default;
    Lease& operator=(Lease&&) noexcept = default;
    ~Lease();
    DetectorBackend& operator*() const { return *backend_; }
    DetectorBackend* operator->() const { return backend_.get(); }

   private:
    BackendPool* pool_;
    std::unique_ptr<DetectorBackend> backend_;
  };

  Lease Acquire();
  std::size_t size() const { return size_; }

 private:
  void Release(std::unique_ptr<DetectorBackend> backend);

  std::size_t size_;
  std::mutex mu_;
  std::condition_variable available_;
  std::vector<std::unique_ptr<DetectorBackend>> idle_;
};

// resize -> backend -> DecodeAndFilter -> Nms -> ComputeCoverage.
// inference_ms covers the backend call only.
DetectionResult Detect(const imagery::ImageRecord& record, const Image& pixels,
                       DetectorBackend& backend, const DetectorConfig& cfg,
                       const Clock& clock = DefaultClock());

}  // namespace sentinel::detection
