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

#include <algorithm>

#include <opencv2/core.hpp>
#include <opencv2/dnn.hpp>

#include "sentinel/detection/backend.hpp"
#include "sentinel/error.hpp"

namespace sentinel::detection {

namespace {

constexpr int kNumClasses = 2;
constexpr int kRowWidth = 4 + kNumClasses;

}  // namespace

struct ModelFileBackend::Impl {
  cv::dnn::Net net;
  std::string model_id;
  int input_width;
  int input_height;
};

ModelFileBackend::ModelFileBackend(const std::filesystem::path& model_path,
                                   int input_width, int input_height)
    : impl_(std::make_unique<Impl>()) {
  impl_->input_width = input_width;
  impl_->input_height = input_height;
  impl_->model_id = model_path.stem().string();
  std::error_code ec;
  if (!std::filesystem::is_regular_file(model_path, ec)) {
    throw Error(ErrorCode::kBackendUnavailable, "model file not found: " + model_path.string());
  }
  try {
    impl_->net = cv::dnn::readNetFromONNX(model_path.string());
  } catch (const cv::Exception& e) {
    throw Error(ErrorCode::kBackendUnavailable,
                "cannot load model " + model_path.string() + ": " + e.what());
  }
  if (impl_->net.empty()) {
    throw Error(ErrorCode::kBackendUnavailable, "model " + model_path.string() + " is empty");
  }
  impl_->net.setPreferableBackend(cv::dnn::DNN_BACKEND_OPENCV);
  impl_->net.setPreferableTarget(cv::dnn::DNN_TARGET_CPU);
}

ModelFileBackend::~ModelFileBackend() = default;

BackendOutput ModelFileBackend::Infer(const InferenceInput& input) {
  const auto& px = input.pixels;
  if (px.width != impl_->input_width || px.height != impl_->input_height) {
    throw Error(ErrorCode::kInvalidArgument, "model input must be pre-resized");
  }

  // NCHW float blob, RGB order, scaled to [0, 1].
  const int sizes[] = {1, 3, px.height, px.width};
  cv::Mat blob(4, sizes, CV_32F);
  float* dst = blob.ptr<float>();
  const std::size_t plane = static_cast<std::size_t>(px.width) * px.height;
  for (int y = 0; y < px.height; ++y) {
    for (int x = 0; x < px.width; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * px.width + x;
      for (int c = 0; c < 3; ++c) {
        const int src_c = px.channels == 1 ? 0 : c;
        dst[c * plane + i] = px.at(x, y, src_c) / 255.0f;
      }
    }
  }

  cv::Mat out;
  try {
    impl_->net.setInput(blob);
    out = impl_->net.forward();
  } catch (const cv::Exception& e) {
    throw Error(ErrorCode::kBackendUnavailable, std::string("inference failed: ") + e.what());
  }

  // Accept (1,6,N), (1,N,6) or a 2-D (6,N)/(N,6) tensor.
  std::vector<int> dims(out.size.p, out.size.p + out.dims);
  if (dims.size() == 3 && dims[0] == 1) dims.erase(dims.begin());
  if (dims.size() != 2 || (dims[0] != kRowWidth && dims[1] != kRowWidth)) {
    throw Error(ErrorCode::kMalformedBackendOutput, "unexpected model output shape");
  }
  const bool channels_first = dims[0] == kRowWidth;
  const int count = channels_first ? dims[1] : dims[0];
  const float* data = out.ptr<float>();
  auto value = [&](int row, int field) {
    return channels_first ? data[field * count + row] : data[row * kRowWidth + field];
  };

  BackendOutput result;
  result.model_id = impl_->model_id;
  for (int i = 0; i < count; ++i) {
    const float cx = value(i, 0), cy = value(i, 1), w = value(i, 2), h = value(i, 3);
    const float wildfire = value(i, 4), smoke = value(i, 5);
    const bool is_smoke = smoke > wildfire;
    const double score = std::clamp(static_cast<double>(is_smoke ? smoke : wildfire), 0.0, 1.0);
    if (w <= 0 || h <= 0) continue;
    result.detections.push_back({{cx - w / 2.0, cy - h / 2.0, cx + w / 2.0, cy + h / 2.0},
                                 is_smoke ? ClassLabel::kSmoke : ClassLabel::kWildfire,
                                 score});
  }
  return result;
}

}  // namespace sentinel::detection
