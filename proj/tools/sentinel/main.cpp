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

// sentinel: command-line front end for ingest, detection, evaluation, risk
// assessment, judging and the HTTP service.

#include <csignal>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include <pthread.h>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "sentinel/detection/backend.hpp"
#include "sentinel/error.hpp"
#include "sentinel/imagery/dataset.hpp"
#include "sentinel/imagery/ingest.hpp"
#include "sentinel/imagery/raster.hpp"
#include "sentinel/judge/judge.hpp"
#include "sentinel/metrics/metrics.hpp"
#include "sentinel/risk/client.hpp"
#include "sentinel/risk/risk.hpp"
#include "sentinel/service/api.hpp"
#include "sentinel/service/pipeline.hpp"
#include "sentinel/service/service.hpp"
#include "sentinel/store/store.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace sentinel;

namespace {

imagery::Split ParseSplit(const std::string& name) {
  auto split = imagery::SplitFromName(name);
  if (!split) throw Error(ErrorCode::kInvalidArgument, "unknown split '" + name + "'");
  return *split;
}

void WriteText(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
}

std::string Getenv(const char* name, const std::string& fallback = {}) {
  const char* v = std::getenv(name);
  return v && *v ? std::string(v) : fallback;
}

// Scripted transcript when given, otherwise the provider from the environment.
std::shared_ptr<risk::ChatClient> MakeChatClient(const std::string& transcript,
                                                 const char* model_var,
                                                 const std::string& scripted_name) {
  if (!transcript.empty()) {
    return std::make_shared<risk::ScriptedChatClient>(fs::path(transcript), scripted_name);
  }
  return std::make_shared<risk::HttpChatClient>(risk::ProviderConfig::FromEnvironment(model_var));
}

struct IngestArgs {
  std::string dir;
  std::string out = "manifest.json";
  std::uint64_t seed = 0;
  std::string source = "other";
  std::string standardize;
};

int RunIngest(const IngestArgs& a) {
  imagery::IngestOptions opts;
  auto source = imagery::SourceFromName(a.source);
  if (!source) throw Error(ErrorCode::kInvalidArgument, "unknown source '" + a.source + "'");
  opts.default_source = *source;
  opts.split_seed = a.seed;
  if (!a.standardize.empty()) opts.standardized_dir = a.standardize;
  const auto outcome = imagery::IngestDirectory(a.dir, opts);
  for (const auto& s : outcome.skipped) {
    std::fprintf(stderr, "skipped %s: %s\n", s.path.string().c_str(), s.reason.c_str());
  }
  imagery::SaveManifest(outcome.manifest, a.out);
  const auto c = outcome.manifest.Counts();
  std::printf("%zu images (train %zu, val %zu, test %zu) -> %s\n",
              outcome.manifest.entries.size(), c.train, c.val, c.test, a.out.c_str());
  return 0;
}

struct DetectArgs {
  std::string manifest;
  std::string backend;
  std::string out = "results.json";
  std::string split;
  double confidence = 0.25;
  double nms_iou = 0.5;
  int timeout_ms = 30000;
};

int RunDetect(const DetectArgs& a) {
  const auto manifest = imagery::LoadManifest(a.manifest);
  detection::DetectorConfig cfg;
  cfg.backend = detection::BackendSpec::Parse(a.backend);
  cfg.confidence_threshold = a.confidence;
  cfg.nms_iou_threshold = a.nms_iou;
  cfg.timeout_ms = a.timeout_ms;
  auto backend = detection::MakeBackend(cfg);
  std::optional<imagery::Split> split;
  if (!a.split.empty()) split = ParseSplit(a.split);
  const auto results = service::DetectManifest(manifest, fs::path(a.manifest).parent_path(),
                                               *backend, cfg, split);
  detection::SaveResults(results, a.out);
  std::size_t boxes = 0;
  for (const auto& r : results) boxes += r.detections.size();
  std::printf("%zu images, %zu detections -> %s\n", results.size(), boxes, a.out.c_str());
  return 0;
}

struct EvaluateArgs {
  std::string manifest;
  std::vector<std::string> results;
  double iou = 0.5;
  double confidence = 0.25;
  std::string split = "test";
  std::string json_out;
};

int RunEvaluate(const EvaluateArgs& a) {
  const auto manifest = imagery::LoadManifest(a.manifest);
  metrics::EvaluationOptions opts;
  opts.iou_threshold = a.iou;
  opts.confidence_threshold = a.confidence;
  opts.split = ParseSplit(a.split);
  std::vector<metrics::MetricsReport> reports;
  for (const auto& path : a.results) {
    const auto results = detection::LoadResults(path);
    reports.push_back(metrics::EvaluateModel(manifest, results, opts));
  }
  std::fputs(metrics::FormatMetricsTable(reports).c_str(), stdout);
  if (!a.json_out.empty()) {
    const json j = reports.size() == 1 ? json(reports.front()) : json(reports);
    WriteText(a.json_out, j.dump(2) + "\n");
  }
  return 0;
}

struct AssessArgs {
  std::string result;
  bool provider_env = false;
  std::string transcript;
  std::string manifest;
  std::string image;
  std::string model;
  std::string out_dir = ".";
};

int RunAssess(const AssessArgs& a) {
  if (!a.provider_env && a.transcript.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "pass --provider-env or --transcript");
  }
  const auto results = detection::LoadResults(a.result);
  std::optional<imagery::DatasetManifest> manifest;
  if (!a.manifest.empty()) manifest = imagery::LoadManifest(a.manifest);
  if (!a.image.empty() && results.size() != 1) {
    throw Error(ErrorCode::kInvalidArgument, "--image needs a results file with one result");
  }
  auto client = MakeChatClient(a.provider_env ? std::string() : a.transcript, "LLM_MODEL",
                               a.model.empty() ? "scripted" : a.model);
  risk::GenerationParams params;
  params.model_name = a.model.empty() ? Getenv("LLM_MODEL") : a.model;
  fs::create_directories(a.out_dir);
  for (const auto& result : results) {
    Image pixels;
    if (!a.image.empty()) {
      pixels = imagery::DecodeImage(imagery::ReadFileBytes(a.image));
    } else if (manifest) {
      const auto* entry = manifest->Find(result.image_id);
      if (!entry) {
        throw Error(ErrorCode::kNotFound, "image '" + result.image_id + "' not in manifest");
      }
      pixels = service::LoadPixels(entry->image, fs::path(a.manifest).parent_path());
    } else {
      throw Error(ErrorCode::kInvalidArgument, "pass --image or --manifest to locate pixels");
    }
    const auto report = risk::AssessRisk(pixels, result, *client, params);
    const auto path = fs::path(a.out_dir) / (result.image_id + ".report.json");
    risk::SaveReport(report, path.string());
    std::printf("%s: severity %s%s -> %s\n", result.image_id.c_str(),
                std::string(risk::SeverityName(report.severity)).c_str(),
                report.degraded ? " (degraded)" : "", path.string().c_str());
  }
  return 0;
}

struct JudgeArgs {
  std::string run_manifest;
  std::string transcript;
  std::string csv_out = "scores.csv";
  std::string json_out = "comparison.json";
};

int RunJudgeCmd(const JudgeArgs& a) {
  const auto manifest = judge::LoadRunManifest(a.run_manifest);
  auto client = MakeChatClient(a.transcript, "JUDGE_MODEL", "scripted-judge");
  const auto params = judge::JudgeGenerationParams(Getenv("JUDGE_MODEL"));
  const auto outcome = judge::RunJudge(manifest, *client, params);
  WriteText(a.csv_out, judge::ScoresCsv(outcome.scores));
  WriteText(a.json_out, json(outcome.comparison).dump(2) + "\n");
  std::printf("%s\n", outcome.comparison.Headline().c_str());
  std::printf("winner: %s\n",
              outcome.comparison.winner ? outcome.comparison.winner->c_str() : "tie");
  return 0;
}

struct ServeArgs {
  std::string host = "0.0.0.0";
  int port = 8080;
  std::size_t workers = 4;
  std::size_t queue = 256;
  std::string backend;
  std::string db;
  std::string static_dir;
  std::string upload_dir;
  std::string token;
  std::string transcript;
  std::string judge_transcript;
};

int RunServe(const ServeArgs& a) {
  service::ServiceConfig cfg;
  cfg.workers = a.workers;
  cfg.queue_capacity = a.queue;
  if (a.backend.empty()) throw Error(ErrorCode::kInvalidArgument, "--backend is required");
  cfg.detector.backend = detection::BackendSpec::Parse(a.backend);
  cfg.upload_dir = a.upload_dir;
  if (!a.transcript.empty() || !Getenv("LLM_ENDPOINT").empty()) {
    const std::string model = Getenv("LLM_MODEL", "scripted");
    cfg.assessors.push_back(
        {model, std::make_shared<risk::BoundedChatClient>(
                    MakeChatClient(a.transcript, "LLM_MODEL", model))});
  }
  if (!a.judge_transcript.empty() ||
      (!Getenv("LLM_ENDPOINT").empty() && !Getenv("JUDGE_MODEL").empty())) {
    cfg.judge_client = std::make_shared<risk::BoundedChatClient>(
        MakeChatClient(a.judge_transcript, "JUDGE_MODEL", "scripted-judge"));
    cfg.judge_params = judge::JudgeGenerationParams(Getenv("JUDGE_MODEL"));
  }
  const std::string db = a.db.empty() ? Getenv("DB_URL", "file:sentinel-data") : a.db;
  std::shared_ptr<store::Store> st = store::OpenStore(db);

  service::ApiOptions api;
  api.host = a.host;
  api.port = a.port;
  const std::string token = a.token.empty() ? Getenv("SENTINEL_API_TOKEN") : a.token;
  if (!token.empty()) api.api_token = token;
  if (!a.static_dir.empty()) api.static_dir = a.static_dir;

  // Block termination signals before any thread starts so only the waiter
  // below receives them.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  service::PipelineService svc(std::move(cfg), st);
  service::ApiServer server(svc, api);
  const int port = server.Start();
  std::printf("listening on %s:%d (%zu workers, store %s)\n", a.host.c_str(), port, a.workers,
              db.c_str());
  std::fflush(stdout);

  int sig = 0;
  sigwait(&signals, &sig);
  std::printf("signal %d, shutting down\n", sig);
  server.Stop();
  svc.Shutdown();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wildfire detection, risk assessment and evaluation toolkit", "sentinel"};
  app.require_subcommand(1);

  IngestArgs ingest;
  auto* c_ingest = app.add_subcommand("ingest", "Build a dataset manifest from a directory");
  c_ingest->add_option("dir", ingest.dir, "Image directory")->required()->check(CLI::ExistingDirectory);
  c_ingest->add_option("--out", ingest.out, "Manifest path")->capture_default_str();
  c_ingest->add_option("--seed", ingest.seed, "Split seed")->capture_default_str();
  c_ingest->add_option("--source", ingest.source, "Default source (landsat8, goes16, other)")
      ->capture_default_str();
  c_ingest->add_option("--standardize", ingest.standardize,
                       "Write 416x416 PNG copies to this directory");

  DetectArgs detect;
  auto* c_detect = app.add_subcommand("detect", "Run a detector over a manifest");
  c_detect->add_option("--manifest", detect.manifest, "Dataset manifest")->required();
  c_detect->add_option("--backend", detect.backend, "model:<path>, remote:<url> or mock:<path>")
      ->required();
  c_detect->add_option("--out", detect.out, "Results path")->capture_default_str();
  c_detect->add_option("--split", detect.split, "Restrict to train, val or test");
  c_detect->add_option("--confidence", detect.confidence, "Confidence threshold")
      ->capture_default_str();
  c_detect->add_option("--nms-iou", detect.nms_iou, "NMS IoU threshold")->capture_default_str();
  c_detect->add_option("--timeout-ms", detect.timeout_ms, "Backend timeout")->capture_default_str();

  EvaluateArgs evaluate;
  auto* c_eval = app.add_subcommand("evaluate", "Score detection results against ground truth");
  c_eval->add_option("--manifest", evaluate.manifest, "Dataset manifest")->required();
  c_eval->add_option("--results", evaluate.results, "Results file(s), one table row each")
      ->required();
  c_eval->add_option("--iou", evaluate.iou, "Matching IoU")->capture_default_str();
  c_eval->add_option("--confidence", evaluate.confidence, "Operating confidence")
      ->capture_default_str();
  c_eval->add_option("--split", evaluate.split, "Evaluation split")->capture_default_str();
  c_eval->add_option("--json", evaluate.json_out, "Also write the report(s) as JSON");

  AssessArgs assess;
  auto* c_assess = app.add_subcommand("assess", "Generate risk reports for detection results");
  c_assess->add_option("--result", assess.result, "Results file")->required();
  c_assess->add_flag("--provider-env", assess.provider_env,
                     "Use LLM_ENDPOINT, LLM_API_KEY and LLM_MODEL");
  c_assess->add_option("--transcript", assess.transcript, "Scripted replies instead of a provider");
  c_assess->add_option("--manifest", assess.manifest, "Manifest used to locate pixels");
  c_assess->add_option("--image", assess.image, "Image file for a single result");
  c_assess->add_option("--model", assess.model, "Model name recorded on the report");
  c_assess->add_option("--out-dir", assess.out_dir, "Report directory")->capture_default_str();

  JudgeArgs judge_args;
  auto* c_judge = app.add_subcommand("judge", "Compare two models' reports with an LLM judge");
  c_judge->add_option("--run-manifest", judge_args.run_manifest, "Judge run manifest")->required();
  c_judge->add_option("--transcript", judge_args.transcript,
                      "Scripted judge replies (default: LLM_ENDPOINT + JUDGE_MODEL)");
  c_judge->add_option("--csv", judge_args.csv_out, "Scores CSV")->capture_default_str();
  c_judge->add_option("--out", judge_args.json_out, "Comparison JSON")->capture_default_str();

  ServeArgs serve;
  auto* c_serve = app.add_subcommand("serve", "Run the HTTP API");
  c_serve->add_option("--host", serve.host, "Bind address")->capture_default_str();
  c_serve->add_option("--port", serve.port, "Port (0 = ephemeral)")->capture_default_str();
  c_serve->add_option("--workers", serve.workers, "Worker threads")->capture_default_str()
      ->check(CLI::PositiveNumber);
  c_serve->add_option("--queue", serve.queue, "Queue capacity")->capture_default_str()
      ->check(CLI::PositiveNumber);
  c_serve->add_option("--backend", serve.backend, "Detector backend spec")->required();
  c_serve->add_option("--db", serve.db, "Store URL (default: DB_URL or file:sentinel-data)");
  c_serve->add_option("--static", serve.static_dir, "Serve dashboard assets from here");
  c_serve->add_option("--upload-dir", serve.upload_dir, "Keep uploaded rasters here");
  c_serve->add_option("--token", serve.token, "API token (default: SENTINEL_API_TOKEN)");
  c_serve->add_option("--transcript", serve.transcript, "Scripted risk replies");
  c_serve->add_option("--judge-transcript", serve.judge_transcript, "Scripted judge replies");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*c_ingest) return RunIngest(ingest);
    if (*c_detect) return RunDetect(detect);
    if (*c_eval) return RunEvaluate(evaluate);
    if (*c_assess) return RunAssess(assess);
    if (*c_judge) return RunJudgeCmd(judge_args);
    if (*c_serve) return RunServe(serve);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    for (const auto& d : e.details()) std::fprintf(stderr, "  %s\n", d.c_str());
    return 1;
  }
  return 0;
}
