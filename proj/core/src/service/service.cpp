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

#include "sentinel/service/service.hpp"

#include <condition_variable>
#include <cstdio>
#include <deque>
#include <future>
#include <mutex>
#include <thread>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "sentinel/imagery/raster.hpp"
#include "sentinel/judge/judge.hpp"
#include "sentinel/service/pipeline.hpp"

namespace sentinel::service {

using nlohmann::json;

std::string_view JobKindName(JobKind kind) {
  switch (kind) {
    case JobKind::kDetect: return "detect";
    case JobKind::kAssess: return "assess";
    case JobKind::kEvaluate: return "evaluate";
    case JobKind::kJudgeRun: return "judge_run";
  }
  return "unknown";
}

std::string_view JobStateName(JobState state) {
  switch (state) {
    case JobState::kQueued: return "queued";
    case JobState::kRunning: return "running";
    case JobState::kDone: return "done";
    case JobState::kFailed: return "failed";
  }
  return "unknown";
}

bool IsTerminal(JobState state) { return state == JobState::kDone || state == JobState::kFailed; }

bool IsLegalTransition(JobState from, JobState to) {
  if (from == JobState::kQueued) return to == JobState::kRunning;
  if (from == JobState::kRunning) return IsTerminal(to);
  return false;
}

namespace {

std::string SeqId(const char* prefix, std::uint64_t n) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%s-%06llu", prefix, static_cast<unsigned long long>(n));
  return buf;
}

// Single thread that owns every store write.
class PersistenceLane {
 public:
  PersistenceLane() : thread_([this] { Loop(); }) {}
  ~PersistenceLane() { Stop(); }

  template <typename Fn>
  auto Run(Fn fn) -> decltype(fn()) {
    using R = decltype(fn());
    auto task = std::make_shared<std::packaged_task<R()>>(std::move(fn));
    auto result = task->get_future();
    {
      std::lock_guard lock(mu_);
      tasks_.push_back([task] { (*task)(); });
    }
    cv_.notify_one();
    return result.get();
  }

  void Stop() {
    {
      std::lock_guard lock(mu_);
      if (stopping_) return;
      stopping_ = true;
    }
    cv_.notify_one();
    if (thread_.joinable()) thread_.join();
  }

 private:
  void Loop() {
    for (;;) {
      std::function<void()> task;
      {
        std::unique_lock lock(mu_);
        cv_.wait(lock, [this] { return stopping_ || !tasks_.empty(); });
        if (tasks_.empty()) return;
        task = std::move(tasks_.front());
        tasks_.pop_front();
      }
      task();
    }
  }

  std::mutex mu_;
  std::condition_variable cv_;
  std::deque<std::function<void()>> tasks_;
  bool stopping_ = false;
  std::thread thread_;
};

}  // namespace

struct PipelineService::Impl {
  struct Task {
    std::string job_id;
    std::function<std::string()> work;  // returns the result_ref
  };

  ServiceConfig config;
  std::shared_ptr<store::Store> store;
  std::shared_ptr<const Clock> clock;

  mutable std::mutex mu;
  mutable std::condition_variable work_cv;
  mutable std::condition_variable idle_cv;
  std::unordered_map<std::string, Job> jobs;
  std::deque<Task> queue;
  std::uint64_t next_seq = 0;
  std::size_t running = 0;
  std::size_t high_water = 0;
  std::size_t completed = 0;
  std::size_t failed = 0;
  bool stopping = false;

  std::mutex backends_mu;
  std::unique_ptr<detection::BackendPool> backends;

  PersistenceLane lane;
  std::vector<std::thread> workers;

  // Caller holds `mu`.
  void Transition(Job& job, JobState to) {
    if (!IsLegalTransition(job.state, to)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "illegal job transition " + std::string(JobStateName(job.state)) + " -> " +
                      std::string(JobStateName(to)));
    }
    job.state = to;
    if (IsTerminal(to)) job.finished_at = clock->Now();
    if (config.on_transition) config.on_transition(job);
  }

  // Returns the new job id.
  std::string Enqueue(JobKind kind, const std::function<std::string(std::uint64_t, Timestamp)>& work) {
    std::lock_guard lock(mu);
    if (stopping) throw Error(ErrorCode::kNotReady, "service is shutting down");
    if (queue.size() >= config.queue_capacity) {
      throw Error(ErrorCode::kQueueFull,
                  "job queue is full (" + std::to_string(config.queue_capacity) + ")");
    }
    const std::uint64_t seq = ++next_seq;
    Job job;
    job.job_id = SeqId("job", seq);
    job.kind = kind;
    job.submitted_at = clock->Now();
    const Timestamp submitted = job.submitted_at;
    jobs.emplace(job.job_id, job);
    if (config.on_transition) config.on_transition(job);
    queue.push_back({job.job_id, [work, seq, submitted] { return work(seq, submitted); }});
    work_cv.notify_one();
    return job.job_id;
  }

  void WorkerLoop() {
    for (;;) {
      Task task;
      {
        std::unique_lock lock(mu);
        work_cv.wait(lock, [this] { return stopping || !queue.empty(); });
        if (queue.empty()) return;
        task = std::move(queue.front());
        queue.pop_front();
        Transition(jobs.at(task.job_id), JobState::kRunning);
        ++running;
        high_water = std::max(high_water, running);
      }
      std::optional<std::string> ref;
      std::optional<JobError> error;
      try {
        ref = task.work();
      } catch (const Error& e) {
        error = JobError{e.code(), e.what()};
      } catch (const std::exception& e) {
        error = JobError{ErrorCode::kIoError, std::string("internal error: ") + e.what()};
      }
      {
        std::lock_guard lock(mu);
        Job& job = jobs.at(task.job_id);
        if (error) {
          job.error = std::move(error);
          Transition(job, JobState::kFailed);
          ++failed;
        } else {
          job.result_ref = std::move(ref);
          Transition(job, JobState::kDone);
          ++completed;
        }
        --running;
      }
      idle_cv.notify_all();
    }
  }

  detection::BackendPool& Backends() {
    std::lock_guard lock(backends_mu);
    if (!backends) {
      auto factory = config.backend_factory ? config.backend_factory
                                            : detection::MakeBackendFactory(config.detector);
      backends = std::make_unique<detection::BackendPool>(factory, config.workers);
    }
    return *backends;
  }

  std::string ProcessImage(std::uint64_t seq, Timestamp submitted,
                           const std::vector<std::uint8_t>& bytes, const SubmitMetadata& meta) {
    const Image pixels = imagery::DecodeImage(bytes);
    imagery::ImageRecord image;
    image.id = meta.image_id.value_or(SeqId("img", seq));
    image.source = meta.source.value_or(imagery::ImageSource::kOther);
    image.acquired_at = meta.acquired_at.value_or(submitted);
    image.width_px = pixels.width;
    image.height_px = pixels.height;
    image.region_tag = meta.region_tag;
    if (!config.upload_dir.empty()) {
      const auto format = imagery::SniffFormat(bytes);
      const auto path = config.upload_dir /
                        (image.id + "." + std::string(imagery::FormatExtension(*format)));
      imagery::WriteFileBytes(path, bytes);
      image.pixel_ref = std::filesystem::absolute(path).string();
    } else {
      image.pixel_ref = "upload:" + SeqId("job", seq);
    }

    detection::DetectionResult result;
    {
      auto lease = Backends().Acquire();
      result = detection::Detect(image, pixels, *lease, config.detector, *clock);
    }

    std::vector<risk::RiskReport> reports;
    for (const auto& assessor : config.assessors) {
      risk::GenerationParams params = config.risk_params;
      params.model_name = assessor.model;
      auto report = risk::AssessRisk(pixels, result, *assessor.client, params);
      report.source_model = assessor.model;
      reports.push_back(std::move(report));
    }

    const std::string record_id = SeqId("rec", seq);
    lane.Run([&] {
      if (!store->FindImage(image.id)) store->InsertImage(image);
      store::HistoryRecord rec;
      rec.record_id = record_id;
      rec.image_id = image.id;
      rec.acquired_at = image.acquired_at;
      rec.region_tag = image.region_tag;
      rec.detection = result;
      rec.created_at = clock->Now();
      store->InsertRecord(rec);
      for (std::size_t k = 0; k < reports.size(); ++k) {
        store->InsertRiskReport(record_id, reports[k],
                                SeqId("rpt", seq) + "-" + std::to_string(k + 1));
      }
    });
    return record_id;
  }

  std::string PersistArtifact(const char* kind, std::uint64_t seq, std::string body) {
    store::Artifact artifact{SeqId(kind, seq), kind, std::move(body), clock->Now()};
    lane.Run([&] { store->PutArtifact(artifact); });
    return artifact.artifact_id;
  }
};

PipelineService::PipelineService(ServiceConfig config, std::shared_ptr<store::Store> store)
    : impl_(std::make_unique<Impl>()) {
  if (config.workers == 0) throw Error(ErrorCode::kInvalidArgument, "need at least one worker");
  if (config.queue_capacity == 0) {
    throw Error(ErrorCode::kInvalidArgument, "queue capacity must be positive");
  }
  if (!store) throw Error(ErrorCode::kInvalidArgument, "service needs a store");
  config.detector.Validate();
  if (!config.upload_dir.empty()) std::filesystem::create_directories(config.upload_dir);
  impl_->clock = config.clock ? config.clock
                              : std::shared_ptr<const Clock>(&DefaultClock(), [](const Clock*) {});
  impl_->config = std::move(config);
  impl_->store = std::move(store);
  for (std::size_t i = 0; i < impl_->config.workers; ++i) {
    impl_->workers.emplace_back([this] { impl_->WorkerLoop(); });
  }
}

PipelineService::~PipelineService() { Shutdown(); }

std::string PipelineService::SubmitImage(std::vector<std::uint8_t> bytes, SubmitMetadata metadata) {
  if (bytes.size() > impl_->config.max_payload_bytes) {
    throw Error(ErrorCode::kPayloadTooLarge,
                "payload of " + std::to_string(bytes.size()) + " bytes exceeds " +
                    std::to_string(impl_->config.max_payload_bytes));
  }
  if (!imagery::SniffFormat(bytes)) {
    throw Error(ErrorCode::kUnsupportedFormat,
                bytes.empty() ? "empty payload" : "payload is not a PNG, JPEG or TIFF raster");
  }
  const JobKind kind = impl_->config.assessors.empty() ? JobKind::kDetect : JobKind::kAssess;
  auto payload = std::make_shared<const std::vector<std::uint8_t>>(std::move(bytes));
  auto meta = std::make_shared<const SubmitMetadata>(std::move(metadata));
  Impl* impl = impl_.get();
  return impl_->Enqueue(kind, [impl, payload, meta](std::uint64_t seq, Timestamp submitted) {
    return impl->ProcessImage(seq, submitted, *payload, *meta);
  });
}

std::string PipelineService::RunEvaluation(EvaluationRequest request) {
  const auto manifest = std::make_shared<const imagery::DatasetManifest>(
      imagery::LoadManifest(request.manifest));
  request.detector.Validate();
  const auto base = request.manifest.parent_path();
  auto req = std::make_shared<const EvaluationRequest>(std::move(request));
  Impl* impl = impl_.get();
  return impl_->Enqueue(JobKind::kEvaluate, [impl, manifest, base, req](std::uint64_t seq,
                                                                         Timestamp) {
    auto backend = detection::MakeBackend(req->detector);
    const auto report =
        EvaluateDetector(*manifest, base, *backend, req->detector, req->options, *impl->clock);
    return impl->PersistArtifact("metrics", seq, json(report).dump());
  });
}

std::string PipelineService::RunJudge(const std::filesystem::path& run_manifest) {
  if (!impl_->config.judge_client) {
    throw Error(ErrorCode::kInvalidArgument, "no judge client configured");
  }
  auto manifest = std::make_shared<const judge::RunManifest>(judge::LoadRunManifest(run_manifest));
  std::vector<std::string> missing;
  for (const auto& item : manifest->items) {
    for (const auto& p : {item.report_a, item.report_b}) {
      if (!std::filesystem::is_regular_file(p)) missing.push_back(p.string());
    }
  }
  if (!missing.empty()) {
    throw Error(ErrorCode::kMismatchedItemSets,
                std::to_string(missing.size()) + " report file(s) missing", missing);
  }
  Impl* impl = impl_.get();
  return impl_->Enqueue(JobKind::kJudgeRun, [impl, manifest](std::uint64_t seq, Timestamp) {
    const auto outcome =
        judge::RunJudge(*manifest, *impl->config.judge_client, impl->config.judge_params);
    const json body = {{"comparison", outcome.comparison},
                       {"scores", outcome.scores},
                       {"csv", judge::ScoresCsv(outcome.scores)}};
    return impl->PersistArtifact("comparison", seq, body.dump());
  });
}

Job PipelineService::GetJob(const std::string& job_id) const {
  std::lock_guard lock(impl_->mu);
  auto it = impl_->jobs.find(job_id);
  if (it == impl_->jobs.end()) throw Error(ErrorCode::kNotFound, "no job '" + job_id + "'");
  return it->second;
}

JobResult PipelineService::GetResult(const std::string& job_id) const {
  JobResult out;
  out.job = GetJob(job_id);
  const Job& job = out.job;
  if (job.state != JobState::kDone) {
    std::vector<std::string> details = {std::string(JobStateName(job.state))};
    if (job.error) details.push_back(job.error->message);
    throw Error(ErrorCode::kNotReady,
                "job '" + job_id + "' is " + std::string(JobStateName(job.state)), details);
  }
  auto& st = *impl_->store;
  switch (job.kind) {
    case JobKind::kDetect:
    case JobKind::kAssess:
      out.record = st.GetRecord(*job.result_ref);
      out.reports = st.ReportsForRecord(*job.result_ref);
      break;
    case JobKind::kEvaluate:
    case JobKind::kJudgeRun:
      out.artifact = st.GetArtifact(*job.result_ref);
      break;
  }
  return out;
}

std::vector<store::TimeSeriesPoint> PipelineService::History(const std::string& region,
                                                             Timestamp from, Timestamp to) const {
  return impl_->store->CoverageTimeSeries(region, from, to);
}

ServiceStats PipelineService::Stats() const {
  std::lock_guard lock(impl_->mu);
  return {impl_->config.workers, impl_->queue.size(), impl_->running, impl_->high_water,
          impl_->completed,     impl_->failed};
}

void PipelineService::WaitIdle() const {
  std::unique_lock lock(impl_->mu);
  impl_->idle_cv.wait(lock, [this] { return impl_->queue.empty() && impl_->running == 0; });
}

void PipelineService::Shutdown() {
  {
    std::lock_guard lock(impl_->mu);
    if (impl_->stopping && impl_->workers.empty()) return;
    impl_->stopping = true;
  }
  impl_->work_cv.notify_all();
  for (auto& t : impl_->workers) {
    if (t.joinable()) t.join();
  }
  impl_->workers.clear();
  impl_->lane.Stop();
  impl_->store->Flush();
}

store::Store& PipelineService::store() const { return *impl_->store; }

const ServiceConfig& PipelineService::config() const { return impl_->config; }

void to_json(json& j, const Job& job) {
  j = json{{"job_id", job.job_id},
           {"kind", JobKindName(job.kind)},
           {"state", JobStateName(job.state)},
           {"submitted_at", FormatIso8601(job.submitted_at)},
           {"finished_at", job.finished_at ? json(FormatIso8601(*job.finished_at)) : json(nullptr)},
           {"result_ref", job.result_ref ? json(*job.result_ref) : json(nullptr)},
           {"error", job.error ? json{{"code", ErrorCodeName(job.error->code)},
                                      {"message", job.error->message}}
                               : json(nullptr)}};
}

void to_json(json& j, const JobResult& r) {
  j = json{{"job", r.job}};
  if (r.record) {
    j["record"] = *r.record;
    j["detection"] = r.record->detection;
    json reports = json::array();
    for (const auto& s : r.reports) {
      reports.push_back({{"report_id", s.report_id}, {"model", s.report.source_model},
                         {"report", s.report}});
    }
    j["risk_reports"] = std::move(reports);
  }
  if (r.artifact) {
    j["artifact"] = {{"artifact_id", r.artifact->artifact_id},
                     {"kind", r.artifact->kind},
                     {"body", json::parse(r.artifact->body)}};
  }
}

void to_json(json& j, const ServiceStats& s) {
  j = json{{"workers", s.workers},
           {"queued", s.queued},
           {"running", s.running},
           {"running_high_water", s.running_high_water},
           {"completed", s.completed},
           {"failed", s.failed}};
}

}  // namespace sentinel::service
