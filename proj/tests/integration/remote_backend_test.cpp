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

#include <atomic>
#include <chrono>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "sentinel/detection/backend.hpp"
#include "sentinel/error.hpp"
#include "support/local_server.hpp"

namespace sentinel::detection {
namespace {

using nlohmann::json;

ErrorCode CodeOf(DetectorBackend& backend, const Image& img) {
  try {
    backend.Infer({"img", img});
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kInvalidArgument;
}

TEST(RemoteBackend, SendsPixelsAndParsesReply) {
  testing::LocalServer srv;
  std::string seen_id, seen_dims;
  std::size_t seen_bytes = 0;
  srv.server.Post("/detect", [&](const httplib::Request& req, httplib::Response& res) {
    seen_id = req.get_header_value("X-Image-Id");
    seen_dims = req.get_header_value("X-Image-Width") + "x" +
                req.get_header_value("X-Image-Height") + "x" +
                req.get_header_value("X-Image-Channels");
    seen_bytes = req.body.size();
    res.set_content(json{{"model_id", "yolo-remote"},
                         {"detections",
                          {{{"box", {1, 2, 30, 40}}, {"class", "smoke"}, {"confidence", 0.6}}}}}
                        .dump(),
                    "application/json");
  });
  srv.Start();

  RemoteBackend backend(srv.Url("/detect"), 2000);
  const Image img(8, 4, 3, 7);
  const auto out = backend.Infer({"scene-1", img});
  EXPECT_EQ(seen_id, "scene-1");
  EXPECT_EQ(seen_dims, "8x4x3");
  EXPECT_EQ(seen_bytes, 96u);
  EXPECT_EQ(out.model_id, "yolo-remote");
  ASSERT_EQ(out.detections.size(), 1u);
  EXPECT_EQ(out.detections[0].class_label, ClassLabel::kSmoke);
  EXPECT_EQ(out.detections[0].bbox.y_max, 40);
}

TEST(RemoteBackend, ErrorMapping) {
  testing::LocalServer srv;
  srv.server.Post("/down", [](const httplib::Request&, httplib::Response& res) {
    res.status = 503;
  });
  srv.server.Post("/junk", [](const httplib::Request&, httplib::Response& res) {
    res.set_content("not json", "text/plain");
  });
  srv.server.Post("/shape", [](const httplib::Request&, httplib::Response& res) {
    res.set_content(R"({"boxes": []})", "application/json");
  });
  srv.server.Post("/slow", [](const httplib::Request&, httplib::Response& res) {
    std::this_thread::sleep_for(std::chrono::milliseconds(1500));
    res.set_content(R"({"detections": []})", "application/json");
  });
  srv.Start();
  const Image img(4, 4, 3);

  RemoteBackend down(srv.Url("/down"), 2000);
  EXPECT_EQ(CodeOf(down, img), ErrorCode::kBackendUnavailable);
  RemoteBackend junk(srv.Url("/junk"), 2000);
  EXPECT_EQ(CodeOf(junk, img), ErrorCode::kMalformedBackendOutput);
  RemoteBackend shape(srv.Url("/shape"), 2000);
  EXPECT_EQ(CodeOf(shape, img), ErrorCode::kMalformedBackendOutput);
  RemoteBackend slow(srv.Url("/slow"), 300);
  EXPECT_EQ(CodeOf(slow, img), ErrorCode::kInferenceTimeout);
}

TEST(RemoteBackend, NothingListening) {
  int port;
  {
    testing::LocalServer probe;
    probe.Start();
    port = probe.port();
  }
  RemoteBackend backend("http://127.0.0.1:" + std::to_string(port) + "/detect", 500);
  EXPECT_EQ(CodeOf(backend, Image(2, 2, 3)), ErrorCode::kBackendUnavailable);
}

}  // namespace
}  // namespace sentinel::detection
