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

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <span>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "sentinel/detection/backend.hpp"
#include "sentinel/error.hpp"
#include "sentinel/judge/judge.hpp"
#include "sentinel/metrics/metrics.hpp"
#include "sentinel/risk/client.hpp"
#include "sentinel/risk/risk.hpp"
#include "sentinel/store/store.hpp"
#include "sentinel/time.hpp"

namespace sentinel::service {

enum class JobKind { kDetect, kAssess, kEvaluate, kJudgeRun };
enum class JobState { kQueued, kRunning, kDone, kFailed };

std::string_view JobKindName(JobKind kind);
std::string_view JobStateName(JobState state);
bool IsTerminal(JobState state);
// queued -> running -> done | failed; nothing else.
bool IsLegalTransition(JobState from, JobState to);

struct JobError {
  ErrorCode code = ErrorCode::kInvalidArgument;
  std::string message;
  friend bool operator==(const JobError&, const JobError&) = default;
};

struct Job {
  std::string job_id;
  JobKind kind = JobKind::kDetect;
  JobState state = JobState::kQueued;
  Timestamp submitted_at{};
  std::optional<Timestamp> finished_at;
  std::optional<std::string> result_ref;  // record id or artifact id
  std::optional<JobError> error;
  friend bool operator==(const Job&, const Job&) = default;
};

struct SubmitMetadata {
  std::optional<std::string> image_id;
  std::optional<imagery::ImageSource> source;
  std::optional<Timestamp> acquired_at;  // defaults to submission time
  std::optional<std::string> region_tag;
};

// A named risk model: the report's source_model is `model`.
struct Assessor {
  std::string model;
  std::shared_ptr<risk::ChatClient> client;
};

struct ServiceConfig {
  std::size_t workers = 4;
  std::size_t queue_capacity = 256;
  std::size_t max_payload_bytes = 64u << 20;
  detection::DetectorConfig detector;
  // Builds one backend per worker; defaults to MakeBackendFactory(detector).
  detection::BackendFactory backend_factory;
  std::vector<Assessor> assessors;  // run in order after detection
  risk::GenerationParams risk_params;
  std::shared_ptr<risk::ChatClient> judge_client;
  risk::GenerationParams judge_params = judge::JudgeGenerationParams({});
  std::shared_ptr<const Clock> clock;  // defaults to the system clock
  // Uploaded rasters are written here; in-memory only when empty.
  std::filesystem::path upload_dir;
  // Observes every state change, in order, under the job lock; must not call
  // back into the service.
  std::function<void(const Job&)> on_transition;
};

// Everything persisted for a finished job.
struct JobResult {
  Job job;
  std::optional<store::HistoryRecord> record;  // detect / assess
  std::vector<store::StoredReport> reports;    // assess
  std::optional<store::Artifact> artifact;     // evaluate / judge_run
};

struct ServiceStats {
  std::size_t workers = 0;
  std::size_t queued = 0;
  std::size_t running = 0;
  std::size_t running_high_water = 0;
  std::size_t completed = 0;
  std::size_t failed = 0;
};

struct EvaluationRequest {
  std::filesystem::path manifest;
  detection::DetectorConfig detector;
  metrics::EvaluationOptions options;
};

// Asynchronous job front end over the detect/assess pipeline. Work runs on a
// bounded worker pool; all store writes go through one persistence thread.
class PipelineService {
 public:
  PipelineService(ServiceConfig config, std::shared_ptr<store::Store> store);
  ~PipelineService();

  PipelineService(const PipelineService&) = delete;
  PipelineService& operator=(const PipelineService&) = delete;

  // Checks size and format signature only, then queues. Throws
  // kPayloadTooLarge, kUnsupportedFormat and kQueueFull.
  std::string SubmitImage(std::vector<std::uint8_t> bytes, SubmitMetadata metadata = {});
  // Throws kManifestInvalid.
  std::string RunEvaluation(EvaluationRequest request);
  // Throws kMismatchedItemSets when a listed report file is absent, and
  // kInvalidArgument when no judge client is configured.
  std::string RunJudge(const std::filesystem::path& run_manifest);

  // Throws kNotFound.
  Job GetJob(const std::string& job_id) const;
  // Throws kNotFound and kNotReady (details carry the failure, if any).
  JobResult GetResult(const std::string& job_id) const;

  // Throws kInvalidRange.
  std::vector<store::TimeSeriesPoint> History(const std::string& region, Timestamp from,
                                              Timestamp to) const;

  ServiceStats Stats() const;
  // Blocks until no job is queued or running.
  void WaitIdle() const;
  // Stops accepting work, finishes queued jobs and joins all threads.
  void Shutdown();

  store::Store& store() const;
  const ServiceConfig& config() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

void to_json(nlohmann::json& j, const Job& job);
void to_json(nlohmann::json& j, const JobResult& result);
void to_json(nlohmann::json& j, const ServiceStats& stats);

}  // namespace sentinel::service
