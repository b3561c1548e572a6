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

#include <chrono>

#include <nlohmann/json.hpp>

#include "../common/http_util.hpp"
#include "sentinel/detection/backend.hpp"
#include "sentinel/error.hpp"

namespace sentinel::detection {

struct RemoteBackend::Impl {
  internal::UrlParts url;
  int timeout_ms;
  httplib::Client client;

  Impl(internal::UrlParts u, int timeout)
      : url(std::move(u)), timeout_ms(timeout), client(url.origin) {
    internal::SetTimeouts(client, timeout_ms);
    client.set_keep_alive(true);
  }
};

RemoteBackend::RemoteBackend(std::string url, int timeout_ms)
    : impl_(std::make_unique<Impl>(internal::SplitUrl(url), timeout_ms)) {
  if (!impl_->client.is_valid()) {
    throw Error(ErrorCode::kBackendUnavailable, "unusable detector URL " + url);
  }
}

RemoteBackend::~RemoteBackend() = default;

BackendOutput RemoteBackend::Infer(const InferenceInput& input) {
  const auto& px = input.pixels;
  httplib::Headers headers = {
      {"X-Image-Width", std::to_string(px.width)},
      {"X-Image-Height", std::to_string(px.height)},
      {"X-Image-Channels", std::to_string(px.channels)},
      {"X-Image-Id", std::string(input.image_id)},
  };
  const auto start = std::chrono::steady_clock::now();
  auto res = impl_->client.Post(impl_->url.path, headers,
                                reinterpret_cast<const char*>(px.pixels.data()),
                                px.pixels.size(), "application/octet-stream");
  if (!res) {
    const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                             std::chrono::steady_clock::now() - start)
                             .count();
    const auto err = res.error();
    if (err == httplib::Error::ConnectionTimeout ||
        (err == httplib::Error::Read && elapsed >= impl_->timeout_ms * 9 / 10)) {
      throw Error(ErrorCode::kInferenceTimeout,
                  "detector did not answer within " + std::to_string(impl_->timeout_ms) + " ms");
    }
    throw Error(ErrorCode::kBackendUnavailable,
                "detector request failed: " + httplib::to_string(err));
  }
  if (res->status != 200) {
    throw Error(ErrorCode::kBackendUnavailable,
                "detector returned HTTP " + std::to_string(res->status));
  }
  nlohmann::json body;
  try {
    body = nlohmann::json::parse(res->body);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kMalformedBackendOutput, std::string("detector reply: ") + e.what());
  }
  BackendOutput out = ParseBackendOutput(body);
  if (out.model_id.empty()) out.model_id = "remote";
  return out;
}

}  // namespace sentinel::detection
