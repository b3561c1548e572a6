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

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "sentinel/service/service.hpp"

namespace sentinel::service {

struct ApiOptions {
  std::string host = "0.0.0.0";
  int port = 8080;  // 0 binds an ephemeral port
  // When set, /api/* other than /api/health requires
  // "Authorization: Bearer <token>" or "X-API-Token: <token>".
  std::optional<std::string> api_token;
  // Served at "/" when set (built dashboard assets).
  std::optional<std::filesystem::path> static_dir;
  int http_threads = 8;
};

// JSON REST front end:
//   POST /api/images          raw body or multipart "image" -> 202 {job_id}
//   GET  /api/jobs/{id}
//   GET  /api/results/{id}
//   GET  /api/history?region=&from=&to=
//   POST /api/evaluations     {"manifest", "backend", ...} -> 202 {job_id}
//   POST /api/judge-runs      {"run_manifest"} -> 202 {job_id}
//   GET  /api/health
class ApiServer {
 public:
  ApiServer(PipelineService& service, ApiOptions options);
  ~ApiServer();

  ApiServer(const ApiServer&) = delete;
  ApiServer& operator=(const ApiServer&) = delete;

  // Binds and serves on a background thread; returns the bound port.
  // Throws kIoError when the port cannot be bound.
  int Start();
  // Binds and serves on the calling thread until Stop.
  void Run();
  void Stop();
  int port() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// HTTP status used for an error code in API responses.
int HttpStatusFor(ErrorCode code);

}  // namespace sentinel::service
