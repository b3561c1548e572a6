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

#include "support/checks.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <mutex>
#include <random>
#include <thread>

#include "oracles/oracles.hpp"
#include "sentinel/detection/backend.hpp"
#include "sentinel/imagery/dataset.hpp"
#include "sentinel/judge/judge.hpp"
#include "sentinel/metrics/metrics.hpp"
#include "sentinel/risk/risk.hpp"
#include "sentinel/service/service.hpp"
#include "sentinel/store/store.hpp"
#include "support/e2e.hpp"
#include "support/support.hpp"

namespace sentinel::testing {

namespace {

using detection::BoundingBox;
using detection::Detection;
using Steady = std::chrono::steady_clock;

double SecondsSince(Steady::time_point start) {
  return std::chrono::duration<double>(Steady::now() - start).count();
}

std::string Fmt(const char* format, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, format, a, b, c);
  return buf;
}

// Integer box with positive extent inside [lo, hi].
oracle::IntBox RandomIntBox(std::mt19937_64& rng, int lo, int hi) {
  int x0 = UniformInt(rng, lo, hi - 1), x1 = UniformInt(rng, lo, hi - 1);
  int y0 = UniformInt(rng, lo, hi - 1), y1 = UniformInt(rng, lo, hi - 1);
  if (x0 > x1) std::swap(x0, x1);
  if (y0 > y1) std::swap(y0, y1);
  return {x0, y0, x1 + 1, y1 + 1};
}

BoundingBox ToBox(const oracle::IntBox& b) {
  return {static_cast<double>(b.x0), static_cast<double>(b.y0), static_cast<double>(b.x1),
          static_cast<double>(b.y1)};
}

// Box on the half-pixel grid inside [0, size].
oracle::Box RandomGridBox(std::mt19937_64& rng, int size) {
  const int units = 2 * size;
  int a = UniformInt(rng, 0, units - 1), b = UniformInt(rng, a + 1, units);
  int c = UniformInt(rng, 0, units - 1), d = UniformInt(rng, c + 1, units);
  return {a / 2.0, c / 2.0, b / 2.0, d / 2.0, UniformInt(rng, 0, 1), 0};
}

// Nudges a ground-truth box by up to two pixels so some detections match.
oracle::Box Jitter(std::mt19937_64& rng, const oracle::Box& g, int size) {
  auto move = [&](double v) {
    return std::clamp(v + UniformInt(rng, -4, 4) / 2.0, 0.0, static_cast<double>(size));
  };
  oracle::Box d{move(g.x0), move(g.y0), move(g.x1), move(g.y1), g.cls, 0};
  if (d.x1 <= d.x0 || d.y1 <= d.y0) d = g;
  return d;
}

}  // namespace

CheckResult CheckF1Rows() {
  struct Row {
    const char* model;
    double precision, recall, published_f1;
  };
  // Published precision, recall and F1 (percent) for the four detectors.
  const Row rows[] = {{"YOLOv8", 60.7, 67.6, 64.0},
                      {"YOLOv11", 51.7, 89.8, 65.6},
                      {"YOLO-NAS", 56.0, 57.1, 56.6},
                      {"YOLOv12", 81.1, 74.8, 77.8}};
  const auto start = Steady::now();
  CheckResult r{true, ""};
  for (const auto& row : rows) {
    const double f1 = metrics::F1(row.precision, row.recall);
    const bool ok = std::abs(f1 - row.published_f1) <= 0.1 + 1e-12;
    r.pass = r.pass && ok;
    r.detail += std::string(row.model) + Fmt(" %.4f vs %.1f; ", f1, row.published_f1);
  }
  const double secs = SecondsSince(start);
  r.pass = r.pass && secs < 1.0;
  r.detail += Fmt("%.3fs", secs);
  return r;
}

CheckResult CheckMetricsOracle(int fixtures, std::uint64_t seed) {
  constexpr int kSize = 64;
  constexpr double kIou = 0.5, kConf = 0.25;
  std::mt19937_64 rng(seed);
  const auto start = Steady::now();
  int failures = 0;
  double worst_ap = 0;
  std::size_t total_tp = 0;
  for (int f = 0; f < fixtures; ++f) {
    const int n_images = UniformInt(rng, 1, 10);
    std::vector<oracle::ImageCase> cases(n_images);
    imagery::DatasetManifest manifest;
    std::vector<detection::DetectionResult> results;
    for (int i = 0; i < n_images; ++i) {
      auto& c = cases[i];
      const int n_gt = UniformInt(rng, i == 0 ? 1 : 0, 6);
      for (int g = 0; g < n_gt; ++g) c.ground_truth.push_back(RandomGridBox(rng, kSize));
      const int n_det = UniformInt(rng, 0, 6);
      for (int d = 0; d < n_det; ++d) {
        oracle::Box box = (!c.ground_truth.empty() && UniformInt(rng, 0, 2) > 0)
                              ? Jitter(rng, c.ground_truth[UniformInt(
                                                rng, 0, static_cast<int>(c.ground_truth.size()) - 1)],
                                       kSize)
                              : RandomGridBox(rng, kSize);
        if (UniformInt(rng, 0, 5) == 0) box.cls = 1 - box.cls;
        box.conf = UniformInt(rng, 1, 9) / 10.0;
        c.detections.push_back(box);
      }

      imagery::ManifestEntry entry;
      entry.image.id = "f" + std::to_string(f) + "-" + std::to_string(i);
      entry.image.width_px = kSize;
      entry.image.height_px = kSize;
      for (const auto& g : c.ground_truth) {
        entry.annotations.push_back(imagery::Annotation::Make(
            *ClassFromId(g.cls), {(g.x0 + g.x1) / 2 / kSize, (g.y0 + g.y1) / 2 / kSize,
                                  (g.x1 - g.x0) / kSize, (g.y1 - g.y0) / kSize}));
      }
      manifest.split_of[entry.image.id] = imagery::Split::kTest;
      detection::DetectionResult res;
      res.image_id = entry.image.id;
      res.model_id = "fixture";
      res.image_width = kSize;
      res.image_height = kSize;
      for (const auto& d : c.detections) {
        res.detections.push_back({{d.x0, d.y0, d.x1, d.y1}, *ClassFromId(d.cls), d.conf});
      }
      manifest.entries.push_back(std::move(entry));
      results.push_back(std::move(res));
    }

    metrics::EvaluationOptions opts;
    opts.iou_threshold = kIou;
    opts.confidence_threshold = kConf;
    const auto got = metrics::EvaluateModel(manifest, results, opts);
    const auto want = oracle::BruteForceEvaluate(cases, kIou, kConf);

    bool ok = got.per_class_ap.size() == want.ap.size() && got.true_positives == want.tp &&
              got.false_positives == want.fp;
    for (const auto& [cls, ap] : want.ap) {
      auto it = got.per_class_ap.find(*ClassFromId(cls));
      if (it == got.per_class_ap.end()) {
        ok = false;
        continue;
      }
      worst_ap = std::max(worst_ap, std::abs(it->second - ap));
      ok = ok && std::abs(it->second - ap) <= 1e-9;
    }
    ok = ok && std::abs(got.map_50 - want.map) <= 1e-9 &&
         std::abs(got.precision_pct - want.precision_pct) <= 1e-9 &&
         std::abs(got.recall_pct - want.recall_pct) <= 1e-9 &&
         std::abs(got.f1_pct - want.f1_pct) <= 1e-9;
    total_tp += want.tp;
    if (!ok) ++failures;
  }
  const double secs = SecondsSince(start);
  return {failures == 0 && secs < 30.0,
          std::to_string(fixtures - failures) + "/" + std::to_string(fixtures) +
              " fixtures equal, " + std::to_string(total_tp) + " TPs" +
              Fmt(", max AP diff %.3g, %.2fs", worst_ap, secs)};
}

CheckResult CheckIouOracle(int sets, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const auto start = Steady::now();
  int mismatches = 0, overlapping = 0;
  for (int i = 0; i < sets; ++i) {
    const auto a = RandomIntBox(rng, 0, 40);
    const auto b = RandomIntBox(rng, 0, 40);
    const double want = oracle::RasterIou(a, b);
    if (want > 0) ++overlapping;
    if (detection::Iou(ToBox(a), ToBox(b)) != want) ++mismatches;
  }
  const double secs = SecondsSince(start);
  return {mismatches == 0 && secs < 30.0,
          std::to_string(sets - mismatches) + "/" + std::to_string(sets) + " exact, " +
              std::to_string(overlapping) + " overlapping" + Fmt(", %.2fs", secs)};
}

CheckResult CheckNmsProperties(int sets, std::uint64_t seed) {
  constexpr double kThreshold = 0.5;
  std::mt19937_64 rng(seed);
  const auto start = Steady::now();
  int violations = 0;
  std::size_t suppressed = 0;
  for (int s = 0; s < sets; ++s) {
    std::vector<Detection> input;
    const int n = UniformInt(rng, 0, 25);
    for (int i = 0; i < n; ++i) {
      input.push_back({ToBox(RandomIntBox(rng, 0, 60)),
                       UniformInt(rng, 0, 1) ? ClassLabel::kSmoke : ClassLabel::kWildfire,
                       UniformInt(rng, 1, 20) / 20.0});
    }
    const auto kept = detection::Nms(input, kThreshold);
    bool ok = kept.size() <= input.size();
    // Subset: each kept detection consumes a distinct equal input.
    std::vector<bool> used(input.size(), false);
    for (const auto& k : kept) {
      bool found = false;
      for (std::size_t i = 0; i < input.size() && !found; ++i) {
        if (!used[i] && input[i] == k) used[i] = found = true;
      }
      ok = ok && found;
    }
    // Suppression-free: no same-class kept pair at or above the threshold.
    for (std::size_t i = 0; i < kept.size(); ++i) {
      for (std::size_t j = i + 1; j < kept.size(); ++j) {
        if (kept[i].class_label == kept[j].class_label &&
            detection::Iou(kept[i].bbox, kept[j].bbox) >= kThreshold) {
          ok = false;
        }
      }
    }
    // Maximal: every dropped detection overlaps a kept one of its class.
    for (std::size_t i = 0; i < input.size(); ++i) {
      if (used[i]) continue;
      ++suppressed;
      const bool covered = std::any_of(kept.begin(), kept.end(), [&](const Detection& k) {
        return k.class_label == input[i].class_label &&
               detection::Iou(k.bbox, input[i].bbox) >= kThreshold;
      });
      ok = ok && covered;
    }
    if (!ok) ++violations;
  }
  const double secs = SecondsSince(start);
  return {violations == 0 && secs < 30.0,
          std::to_string(sets - violations) + "/" + std::to_string(sets) + " sets valid, " +
              std::to_string(suppressed) + " suppressed" + Fmt(", %.2fs", secs)};
}

CheckResult CheckCoverageOracle(int sets, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const auto start = Steady::now();
  int failures = 0;
  double worst = 0, max_pct = 0;
  for (int s = 0; s < sets; ++s) {
    const int w = UniformInt(rng, 1, 160), h = UniformInt(rng, 1, 160);
    std::vector<oracle::IntBox> wildfire, smoke;
    std::vector<Detection> dets;
    const int n = UniformInt(rng, 0, 15);
    for (int i = 0; i < n; ++i) {
      // Boxes may extend past the frame; only the inside counts.
      const auto b = RandomIntBox(rng, -20, std::max(w, h) + 20);
      const bool is_smoke = UniformInt(rng, 0, 1) == 1;
      const auto clipped = ToBox(b).Clipped(w, h);
      if (!clipped.valid()) continue;
      (is_smoke ? smoke : wildfire).push_back(b);
      dets.push_back({clipped, is_smoke ? ClassLabel::kSmoke : ClassLabel::kWildfire, 0.9});
    }
    const auto got = detection::ComputeCoverage(dets, w, h);
    bool ok = true;
    for (auto [pct, boxes] : {std::pair{got.wildfire_pct, &wildfire},
                              std::pair{got.smoke_pct, &smoke}}) {
      const double want = oracle::RasterCoveragePct(*boxes, w, h);
      const double rel = want == 0 ? std::abs(pct) : std::abs(pct - want) / want;
      worst = std::max(worst, rel);
      max_pct = std::max(max_pct, pct);
      ok = ok && rel <= 1e-6 && pct <= 100.0 && pct >= 0.0;
    }
    if (!ok) ++failures;
  }
  const double secs = SecondsSince(start);
  return {failures == 0 && secs < 30.0,
          std::to_string(sets - failures) + "/" + std::to_string(sets) + " sets" +
              Fmt(", max rel err %.3g, max %.2f%%, %.2fs", worst, max_pct, secs)};
}

CheckResult CheckSplitDeterminism() {
  const auto counts = imagery::ComputeSplitCounts(3771);
  bool ok = counts == imagery::SplitCounts{2639, 565, 567};

  imagery::DatasetManifest m;
  for (int i = 0; i < 3771; ++i) {
    imagery::ManifestEntry e;
    char id[32];
    std::snprintf(id, sizeof id, "img_%05d", i);
    e.image.id = id;
    e.image.width_px = e.image.height_px = 416;
    m.entries.push_back(std::move(e));
  }
  const auto a = imagery::AssignSplits(m, 2024);
  const auto b = imagery::AssignSplits(m, 2024);
  const auto c = imagery::AssignSplits(m, 2025);
  ok = ok && a.split_of == b.split_of && a.Counts() == counts && a.split_of != c.split_of;
  return {ok, "counts " + std::to_string(counts.train) + "/" + std::to_string(counts.val) + "/" +
                  std::to_string(counts.test) + ", seeded assignment " +
                  (a.split_of == b.split_of ? "reproducible" : "differs")};
}

CheckResult CheckPromptGolden() {
  risk::DetectionSummary s;
  s.image_width = s.image_height = 416;
  s.smoke_coverage_pct = 8.67;
  s.wildfire_coverage_pct = 25.00;
  const std::string prompt = risk::BuildPrompt(s);
  const std::string golden = ReadText(FixturePath("prompt/golden_416x416_8.67_25.00.txt"));
  bool ok = prompt == golden;
  std::string detail = ok ? "byte-identical" : "differs from golden";
  const bool role = prompt.find("You are a senior wildfire analyst specializing in satellite "
                                "imagery analysis.") != std::string::npos;
  int items = 0;
  for (int i = 1; i <= 6; ++i) {
    if (prompt.find("\n" + std::to_string(i) + ". ") != std::string::npos) ++items;
  }
  const bool values = prompt.find("smoke coverage (%): 8.67") != std::string::npos &&
                      prompt.find("wildfire coverage (%): 25.00") != std::string::npos;
  ok = ok && role && items == 6 && values;
  detail += std::string(", role line ") + (role ? "present" : "missing") + ", " +
            std::to_string(items) + "/6 items, coverage values " + (values ? "present" : "missing");
  return {ok, detail};
}

CheckResult CheckJudgeAggregation() {
  auto make = [](const char* model, std::vector<int> scores) {
    std::vector<judge::JudgeScore> out;
    for (std::size_t i = 0; i < scores.size(); ++i) {
      judge::JudgeScore s;
      s.item_id = "item-" + std::to_string(i);
      s.report_id = s.item_id + "-" + model;
      s.model = model;
      s.overall = scores[i];
      out.push_back(s);
    }
    return out;
  };
  const auto cmp = judge::CompareModels(make("a", {7, 8, 6}), make("b", {6, 6, 7}));
  const bool ok = judge::FormatMean(cmp.a.mean) == "7.00" &&
                  judge::FormatMean(cmp.b.mean) == "6.33" && cmp.winner == "a";
  return {ok, cmp.Headline()};
}

CheckResult CheckDeterministicEndToEnd() {
  const auto start = Steady::now();
  TempDir dir;
  const auto run = RunDeterministicPipeline(dir.path());
  const auto bad = GoldenMismatches(run);
  const double secs = SecondsSince(start);
  const bool means = judge::FormatMean(run.comparison.a.mean) == "7.00" &&
                     judge::FormatMean(run.comparison.b.mean) == "6.33" &&
                     run.comparison.winner == "model-a";
  std::string detail = bad.empty() ? "golden outputs identical" : "mismatched:";
  for (const auto& name : bad) detail += " " + name;
  detail += "; " + run.comparison.Headline() + Fmt("; %.2fs", secs);
  return {bad.empty() && means && secs < 60.0, detail};
}

namespace {

// Sleeps inside Infer and tracks how many calls overlap.
class SlowBackend final : public detection::DetectorBackend {
 public:
  struct Gauge {
    std::atomic<int> active{0};
    std::atomic<int> peak{0};
  };
  SlowBackend(int delay_ms, std::shared_ptr<Gauge> gauge)
      : delay_ms_(delay_ms), gauge_(std::move(gauge)) {}

  detection::BackendOutput Infer(const detection::InferenceInput& input) override {
    const int now = ++gauge_->active;
    int peak = gauge_->peak.load();
    while (now > peak && !gauge_->peak.compare_exchange_weak(peak, now)) {
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(delay_ms_));
    --gauge_->active;
    if (input.image_id.starts_with("bad")) {
      throw Error(ErrorCode::kBackendUnavailable, "scripted failure");
    }
    return {"slow-mock", {}};
  }

 private:
  int delay_ms_;
  std::shared_ptr<Gauge> gauge_;
};

service::ServiceConfig SlowConfig(std::size_t workers, int delay_ms,
                                  std::shared_ptr<SlowBackend::Gauge> gauge) {
  service::ServiceConfig cfg;
  cfg.workers = workers;
  cfg.backend_factory = [delay_ms, gauge] {
    return std::make_unique<SlowBackend>(delay_ms, gauge);
  };
  return cfg;
}

}  // namespace

CheckResult CheckSubmitReturnsBeforeProcessing() {
  constexpr int kDelayMs = 400;
  auto gauge = std::make_shared<SlowBackend::Gauge>();
  service::PipelineService svc(SlowConfig(1, kDelayMs, gauge), store::OpenStore("memory:"));
  const auto png = SyntheticPng(64, 64, 1);
  const auto start = Steady::now();
  const auto id = svc.SubmitImage(png);
  const double submit_ms = SecondsSince(start) * 1000;
  const auto state = svc.GetJob(id).state;
  svc.WaitIdle();
  const double total_ms = SecondsSince(start) * 1000;
  const auto final_state = svc.GetJob(id).state;
  const bool ok = submit_ms < kDelayMs / 4.0 && !service::IsTerminal(state) &&
                  final_state == service::JobState::kDone && total_ms >= kDelayMs;
  return {ok, Fmt("submit %.1f ms vs %.0f ms inference, job done after %.0f ms", submit_ms,
                  kDelayMs, total_ms)};
}

CheckResult CheckWorkerHighWater(int submissions) {
  constexpr std::size_t kWorkers = 4;
  auto gauge = std::make_shared<SlowBackend::Gauge>();
  service::PipelineService svc(SlowConfig(kWorkers, 10, gauge), store::OpenStore("memory:"));
  const auto png = SyntheticPng(32, 32, 2);
  std::atomic<int> accepted{0};
  std::vector<std::thread> clients;
  for (int t = 0; t < 10; ++t) {
    clients.emplace_back([&, t] {
      for (int i = t; i < submissions; i += 10) {
        svc.SubmitImage(png);
        ++accepted;
      }
    });
  }
  for (auto& c : clients) c.join();
  svc.WaitIdle();
  const auto stats = svc.Stats();
  const bool ok = accepted == submissions &&
                  stats.completed == static_cast<std::size_t>(submissions) &&
                  stats.running_high_water <= kWorkers &&
                  gauge->peak.load() <= static_cast<int>(kWorkers);
  return {ok, std::to_string(stats.completed) + " completed, high-water " +
                  std::to_string(stats.running_high_water) + " jobs / " +
                  std::to_string(gauge->peak.load()) + " inferences vs pool " +
                  std::to_string(kWorkers)};
}

CheckResult CheckJobStateMonotonic() {
  auto gauge = std::make_shared<SlowBackend::Gauge>();
  auto cfg = SlowConfig(3, 2, gauge);
  std::mutex mu;
  std::map<std::string, std::vector<service::JobState>> seen;
  cfg.on_transition = [&](const service::Job& job) {
    std::lock_guard lock(mu);
    seen[job.job_id].push_back(job.state);
  };
  service::PipelineService svc(cfg, store::OpenStore("memory:"));
  const auto png = SyntheticPng(32, 32, 3);
  std::vector<std::string> ids;
  for (int i = 0; i < 40; ++i) {
    service::SubmitMetadata meta;
    meta.image_id = (i % 5 == 0 ? "bad-" : "ok-") + std::to_string(i);
    ids.push_back(svc.SubmitImage(png, meta));
  }
  // Poll while work is in flight; observed states must only move forward.
  std::map<std::string, int> last_rank;
  bool regressed = false;
  for (int round = 0; round < 50; ++round) {
    for (const auto& id : ids) {
      const int rank = static_cast<int>(svc.GetJob(id).state == service::JobState::kFailed
                                            ? service::JobState::kDone
                                            : svc.GetJob(id).state);
      auto [it, fresh] = last_rank.emplace(id, rank);
      if (!fresh) {
        regressed = regressed || rank < it->second;
        it->second = std::max(it->second, rank);
      }
    }
    if (svc.Stats().queued == 0 && svc.Stats().running == 0) break;
    std::this_thread::sleep_for(std::chrono::milliseconds(2));
  }
  svc.WaitIdle();
  int done = 0, failed = 0;
  bool legal = true;
  std::lock_guard lock(mu);
  for (const auto& id : ids) {
    const auto& states = seen[id];
    legal = legal && states.size() == 3 && states[0] == service::JobState::kQueued;
    for (std::size_t i = 1; i < states.size(); ++i) {
      legal = legal && service::IsLegalTransition(states[i - 1], states[i]);
    }
    if (states.back() == service::JobState::kDone) ++done;
    if (states.back() == service::JobState::kFailed) ++failed;
  }
  const bool ok = legal && !regressed && done == 32 && failed == 8;
  return {ok, std::to_string(done) + " done, " + std::to_string(failed) + " failed, " +
                  (legal ? "all transitions legal" : "illegal transition seen") +
                  (regressed ? ", polled state regressed" : "")};
}

CheckResult CheckStoreRoundTrip(int cycles, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0, 1);
  TempDir dir;
  const Timestamp base = ParseIso8601("2025-07-01T00:00:00Z");
  std::vector<store::HistoryRecord> inserted;
  int mismatched = 0;
  {
    auto st = store::OpenEmbeddedStore(dir / "db");
    for (int i = 0; i < cycles; ++i) {
      imagery::ImageRecord img;
      img.id = "img-" + std::to_string(i);
      img.source = i % 2 ? imagery::ImageSource::kGoes16 : imagery::ImageSource::kLandsat8;
      img.acquired_at = base + std::chrono::minutes(i);
      img.width_px = UniformInt(rng, 16, 4000);
      img.height_px = UniformInt(rng, 16, 4000);
      img.pixel_ref = "/data/" + img.id + ".png";
      if (i % 3) img.region_tag = "region-" + std::to_string(i % 7);
      st->InsertImage(img);

      store::HistoryRecord rec;
      rec.image_id = img.id;
      rec.acquired_at = img.acquired_at;
      rec.region_tag = img.region_tag;
      rec.created_at = img.acquired_at + std::chrono::milliseconds(UniformInt(rng, 0, 99999));
      rec.detection.image_id = img.id;
      rec.detection.model_id = "m" + std::to_string(i % 4);
      rec.detection.image_width = img.width_px;
      rec.detection.image_height = img.height_px;
      rec.detection.inference_ms = UniformInt(rng, 0, 1 << 20) / 1024.0;
      const int n = UniformInt(rng, 0, 5);
      for (int k = 0; k < n; ++k) {
        const double x = u(rng) * img.width_px * 0.5, y = u(rng) * img.height_px * 0.5;
        rec.detection.detections.push_back(
            {{x, y, x + 1 + u(rng) * 100, y + 1 + u(rng) * 100},
             k % 2 ? ClassLabel::kSmoke : ClassLabel::kWildfire,
             u(rng)});
      }
      rec.detection.coverage = {100 * u(rng), 100 * u(rng)};
      rec.record_id = st->InsertRecord(rec);
      if (st->GetRecord(rec.record_id) != rec || st->FindImage(img.id) != img) ++mismatched;
      inserted.push_back(std::move(rec));
    }
  }
  // Reopen from disk and compare everything again.
  int reopened_mismatched = 0;
  auto st = store::OpenEmbeddedStore(dir / "db");
  for (const auto& rec : inserted) {
    if (st->GetRecord(rec.record_id) != rec) ++reopened_mismatched;
  }
  const bool ok = mismatched == 0 && reopened_mismatched == 0 &&
                  st->RecordCount() == static_cast<std::size_t>(cycles);
  return {ok, std::to_string(cycles - mismatched) + "/" + std::to_string(cycles) +
                  " field-equal, " + std::to_string(cycles - reopened_mismatched) +
                  " after reopen"};
}

CheckResult CheckGrowthRateFixture() {
  const Timestamp t = ParseIso8601("2025-08-01T10:00:00Z");
  auto st = store::OpenStore("memory:");
  const double coverage[] = {5.0, 7.0};
  for (int i = 0; i < 2; ++i) {
    imagery::ImageRecord img;
    img.id = "g" + std::to_string(i);
    img.acquired_at = t + std::chrono::hours(i);
    img.width_px = img.height_px = 416;
    img.region_tag = "ridge";
    st->InsertImage(img);
    store::HistoryRecord rec;
    rec.image_id = img.id;
    rec.acquired_at = img.acquired_at;
    rec.region_tag = img.region_tag;
    rec.created_at = img.acquired_at;
    rec.detection.coverage.wildfire_pct = coverage[i];
    st->InsertRecord(rec);
  }
  const auto points = st->CoverageTimeSeries("ridge", t, t + std::chrono::hours(2));
  const auto growth = store::GrowthRate(points);
  const bool ok = points.size() == 2 && points[0].wildfire_pct == 5.0 &&
                  points[1].wildfire_pct == 7.0 && growth.size() == 1 &&
                  std::abs(growth[0].pp_per_hour - 2.0) <= 1e-12;
  return {ok, Fmt("%.0f points, growth %.6f pp/h", static_cast<double>(points.size()),
                  growth.empty() ? 0.0 : growth[0].pp_per_hour)};
}

}  // namespace sentinel::testing
