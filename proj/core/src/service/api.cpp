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

#include "sentinel/service/api.hpp"

#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

namespace sentinel::service {

using nlohmann::json;

int HttpStatusFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kInvalidRange:
    case ErrorCode::kManifestInvalid:
    case ErrorCode::kEmptyManifest:
    case ErrorCode::kMismatchedItemSets:
    case ErrorCode::kEmptyScoreSet:
    case ErrorCode::kDuplicateId:
      return 400;
    case ErrorCode::kUnauthorized: return 401;
    case ErrorCode::kNotFound: return 404;
    case ErrorCode::kNotReady: return 409;
    case ErrorCode::kPayloadTooLarge: return 413;
    case ErrorCode::kUnsupportedFormat:
    case ErrorCode::kUnreadableFile:
    case ErrorCode::kZeroDimension:
      return 415;
    case ErrorCode::kQueueFull: return 429;
    case ErrorCode::kUnsupported: return 501;
    case ErrorCode::kAuthFailure:
    case ErrorCode::kProviderError:
    case ErrorCode::kMalformedBackendOutput:
    case ErrorCode::kEmptyResponse:
      return 502;
    case ErrorCode::kBackendUnavailable:
    case ErrorCode::kRateLimited:
      return 503;
    case ErrorCode::kTimeout:
    case ErrorCode::kInferenceTimeout:
      return 504;
    default: return 500;
  }
}

namespace {

void SendJson(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void SendError(httplib::Response& res, const Error& e) {
  SendJson(res, HttpStatusFor(e.code()),
           {{"error", {{"code", ErrorCodeName(e.code())}, {"message", e.what()},
                       {"details", e.details()}}}});
}

std::optional<std::string> Param(const httplib::Request& req, const char* name) {
  if (req.has_param(name)) return req.get_param_value(name);
  if (req.is_multipart_form_data() && req.has_file(name)) return req.get_file_value(name).content;
  return std::nullopt;
}

SubmitMetadata MetadataFrom(const httplib::Request& req) {
  SubmitMetadata meta;
  meta.image_id = Param(req, "image_id");
  if (auto s = Param(req, "source")) {
    meta.source = imagery::SourceFromName(*s);
    if (!meta.source) throw Error(ErrorCode::kInvalidArgument, "unknown source '" + *s + "'");
  }
  if (auto t = Param(req, "acquired_at")) meta.acquired_at = ParseTimestamp(*t);
  meta.region_tag = Param(req, "region");
  if (!meta.region_tag) meta.region_tag = Param(req, "region_tag");
  return meta;
}

Timestamp TimeParam(const httplib::Request& req, const char* name, Timestamp fallback) {
  if (!req.has_param(name) || req.get_param_value(name).empty()) return fallback;
  return ParseTimestamp(req.get_param_value(name));
}

}  // namespace

struct ApiServer::Impl {
  PipelineService& service;
  ApiOptions options;
  httplib::Server server;
  std::thread thread;
  int bound_port = -1;

  Impl(PipelineService& s, ApiOptions o) : service(s), options(std::move(o)) {}

  bool Authorized(const httplib::Request& req) const {
    if (!options.api_token) return true;
    const std::string bearer = "Bearer " + *options.api_token;
    return req.get_header_value("Authorization") == bearer ||
           req.get_header_value("X-API-Token") == *options.api_token;
  }

  httplib::Server::Handler Guard(std::function<void(const httplib::Request&, httplib::Response&)> fn,
                                 bool open = false) {
    return [this, fn = std::move(fn), open](const httplib::Request& req, httplib::Response& res) {
      try {
        if (!open && !Authorized(req)) {
          throw Error(ErrorCode::kUnauthorized, "missing or invalid API token");
        }
        fn(req, res);
      } catch (const Error& e) {
        SendError(res, e);
      } catch (const json::exception& e) {
        SendError(res, Error(ErrorCode::kInvalidArgument, std::string("bad JSON: ") + e.what()));
      } catch (const std::exception& e) {
        SendJson(res, 500, {{"error", {{"code", "Internal"}, {"message", e.what()}}}});
      }
    };
  }

  void Routes() {
    server.Post("/api/images", Guard([this](const httplib::Request& req, httplib::Response& res) {
      std::string body;
      if (req.is_multipart_form_data()) {
        if (!req.has_file("image")) {
          throw Error(ErrorCode::kInvalidArgument, "multipart upload needs an 'image' part");
        }
        body = req.get_file_value("image").content;
      } else {
        body = req.body;
      }
      std::vector<std::uint8_t> bytes(body.begin(), body.end());
      const auto id = service.SubmitImage(std::move(bytes), MetadataFrom(req));
      SendJson(res, 202, {{"job_id", id}, {"state", "queued"}});
    }));

    server.Get(R"(/api/jobs/([^/]+))",
               Guard([this](const httplib::Request& req, httplib::Response& res) {
                 SendJson(res, 200, service.GetJob(req.matches[1]));
               }));

    server.Get(R"(/api/results/([^/]+))",
               Guard([this](const httplib::Request& req, httplib::Response& res) {
                 SendJson(res, 200, service.GetResult(req.matches[1]));
               }));

    server.Get("/api/history", Guard([this](const httplib::Request& req, httplib::Response& res) {
      if (!req.has_param("region")) {
        throw Error(ErrorCode::kInvalidArgument, "query parameter 'region' is required");
      }
      const std::string region = req.get_param_value("region");
      const Timestamp from = TimeParam(req, "from", FromEpochMillis(0));
      const Timestamp to = TimeParam(req, "to", ParseIso8601("9999-12-31T23:59:59Z"));
      const auto points = service.History(region, from, to);
      json growth = json::array();
      if (points.size() >= 2) growth = store::GrowthRate(points);
      SendJson(res, 200, {{"region", region},
                          {"from", FormatIso8601(from)},
                          {"to", FormatIso8601(to)},
                          {"points", points},
                          {"growth_rate", std::move(growth)}});
    }));

    server.Post("/api/evaluations",
                Guard([this](const httplib::Request& req, httplib::Response& res) {
                  const json body = json::parse(req.body);
                  EvaluationRequest r;
                  r.manifest = body.at("manifest").get<std::string>();
                  r.detector = service.config().detector;
                  if (body.contains("backend")) {
                    r.detector.backend =
                        detection::BackendSpec::Parse(body.at("backend").get<std::string>());
                  }
                  r.detector.confidence_threshold =
                      body.value("detector_confidence", r.detector.confidence_threshold);
                  r.detector.nms_iou_threshold =
                      body.value("nms_iou_threshold", r.detector.nms_iou_threshold);
                  r.options.iou_threshold = body.value("iou_threshold", r.options.iou_threshold);
                  r.options.confidence_threshold =
                      body.value("confidence_threshold", r.options.confidence_threshold);
                  if (body.contains("split")) {
                    const auto name = body.at("split").get<std::string>();
                    auto split = imagery::SplitFromName(name);
                    if (!split) throw Error(ErrorCode::kInvalidArgument, "unknown split " + name);
                    r.options.split = *split;
                  }
                  if (body.contains("model_id")) {
                    r.options.model_id = body.at("model_id").get<std::string>();
                  }
                  SendJson(res, 202,
                           {{"job_id", service.RunEvaluation(std::move(r))}, {"state", "queued"}});
                }));

    server.Post("/api/judge-runs",
                Guard([this](const httplib::Request& req, httplib::Response& res) {
                  const json body = json::parse(req.body);
                  const auto id = service.RunJudge(body.at("run_manifest").get<std::string>());
                  SendJson(res, 202, {{"job_id", id}, {"state", "queued"}});
                }));

    server.Get("/api/health", Guard(
                                  [this](const httplib::Request&, httplib::Response& res) {
                                    SendJson(res, 200,
                                             {{"status", "ok"}, {"stats", service.Stats()}});
                                  },
                                  /*open=*/true));

    if (options.static_dir) {
      if (!server.set_mount_point("/", options.static_dir->string())) {
        throw Error(ErrorCode::kInvalidArgument,
                    "static directory " + options.static_dir->string() + " does not exist");
      }
    }
  }

  int Bind() {
    const int max_threads = std::max(1, options.http_threads);
    server.new_task_queue = [max_threads] {
      return new httplib::ThreadPool(static_cast<std::size_t>(max_threads));
    };
    server.set_payload_max_length(service.config().max_payload_bytes + (1u << 20));
    if (options.port == 0) {
      bound_port = server.bind_to_any_port(options.host);
    } else if (server.bind_to_port(options.host, options.port)) {
      bound_port = options.port;
    }
    if (bound_port <= 0) {
      throw Error(ErrorCode::kIoError, "cannot bind " + options.host + ":" +
                                           std::to_string(options.port));
    }
    return bound_port;
  }
};

ApiServer::ApiServer(PipelineService& service, ApiOptions options)
    : impl_(std::make_unique<Impl>(service, std::move(options))) {
  impl_->Routes();
}

ApiServer::~ApiServer() { Stop(); }

int ApiServer::Start() {
  const int port = impl_->Bind();
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return port;
}

void ApiServer::Run() {
  impl_->Bind();
  impl_->server.listen_after_bind();
}

void ApiServer::Stop() {
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

int ApiServer::port() const { return impl_->bound_port; }

}  // namespace sentinel::service
