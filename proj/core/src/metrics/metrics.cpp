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

#include "sentinel/metrics/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "sentinel/error.hpp"

namespace sentinel::metrics {

using nlohmann::json;

std::vector<GroundTruthBox> ToPixelBoxes(const std::vector<imagery::Annotation>& annotations,
                                         int width, int height) {
  std::vector<GroundTruthBox> out;
  out.reserve(annotations.size());
  for (const auto& a : annotations) {
    const auto& b = a.bbox;
    out.push_back({{(b.cx - b.w / 2) * width, (b.cy - b.h / 2) * height,
                    (b.cx + b.w / 2) * width, (b.cy + b.h / 2) * height},
                   a.class_label});
  }
  return out;
}

std::size_t MatchOutcome::tp_count() const {
  return static_cast<std::size_t>(std::count_if(
      matches.begin(), matches.end(), [](const DetectionMatch& m) { return m.true_positive; }));
}

std::size_t MatchOutcome::fp_count() const { return matches.size() - tp_count(); }

MatchOutcome MatchDetections(std::span<const Detection> detections,
                             std::span<const GroundTruthBox> ground_truth,
                             double iou_threshold) {
  std::vector<std::size_t> order(detections.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return detection::ConfidenceOrder(detections[a], detections[b]);
  });

  MatchOutcome outcome;
  outcome.iou_threshold = iou_threshold;
  std::vector<bool> used(ground_truth.size(), false);
  for (std::size_t idx : order) {
    const Detection& d = detections[idx];
    DetectionMatch m{idx, d.confidence, d.class_label, false, std::nullopt};
    double best = -1;
    std::optional<std::size_t> best_gt;
    for (std::size_t g = 0; g < ground_truth.size(); ++g) {
      if (used[g] || ground_truth[g].class_label != d.class_label) continue;
      const double overlap = detection::Iou(d.bbox, ground_truth[g].bbox);
      if (overlap > best) {
        best = overlap;
        best_gt = g;
      }
    }
    if (best_gt && best >= iou_threshold) {
      used[*best_gt] = true;
      m.true_positive = true;
      m.gt_index = best_gt;
    }
    outcome.matches.push_back(m);
  }
  outcome.fn_count = static_cast<std::size_t>(std::count(used.begin(), used.end(), false));
  return outcome;
}

std::vector<PRPoint> PrCurve(std::vector<ScoredDetection> scored, std::size_t total_gt) {
  if (total_gt == 0) throw Error(ErrorCode::kNoGroundTruth, "PR curve needs ground truth");
  std::stable_sort(scored.begin(), scored.end(),
                   [](const ScoredDetection& a, const ScoredDetection& b) {
                     return a.confidence > b.confidence;
                   });
  std::vector<PRPoint> curve;
  std::size_t tp = 0, fp = 0;
  for (std::size_t i = 0; i < scored.size(); ++i) {
    scored[i].true_positive ? ++tp : ++fp;
    const bool last_at_cut =
        i + 1 == scored.size() || scored[i + 1].confidence != scored[i].confidence;
    if (!last_at_cut) continue;
    curve.push_back({scored[i].confidence, static_cast<double>(tp) / static_cast<double>(tp + fp),
                     static_cast<double>(tp) / static_cast<double>(total_gt)});
  }
  return curve;
}

double AveragePrecision(std::span<const PRPoint> curve) {
  if (curve.empty()) throw Error(ErrorCode::kEmptyCurve, "cannot integrate an empty curve");
  std::vector<double> envelope(curve.size());
  double running = 0;
  for (std::size_t i = curve.size(); i-- > 0;) {
    running = std::max(running, curve[i].precision);
    envelope[i] = running;
  }
  double ap = 0;
  double prev_recall = 0;
  for (std::size_t i = 0; i < curve.size(); ++i) {
    ap += (curve[i].recall - prev_recall) * envelope[i];
    prev_recall = curve[i].recall;
  }
  return std::clamp(ap, 0.0, 1.0);
}

double F1(double precision_pct, double recall_pct) {
  if (precision_pct + recall_pct <= 0) return 0.0;
  return 2 * precision_pct * recall_pct / (precision_pct + recall_pct);
}

MetricsReport EvaluateModel(const imagery::DatasetManifest& manifest,
                            std::span<const detection::DetectionResult> results,
                            const EvaluationOptions& options) {
  std::unordered_map<std::string, const detection::DetectionResult*> by_image;
  for (const auto& r : results) by_image.emplace(r.image_id, &r);

  const auto entries = manifest.InSplit(options.split);
  std::vector<std::string> missing;
  for (const auto* e : entries) {
    if (!by_image.contains(e->image.id)) missing.push_back(e->image.id);
  }
  if (!missing.empty()) {
    throw Error(ErrorCode::kMissingResults,
                std::to_string(missing.size()) + " image(s) have no detection result", missing);
  }

  MetricsReport report;
  report.iou_threshold = options.iou_threshold;
  report.confidence_threshold = options.confidence_threshold;
  report.num_images = entries.size();

  std::map<ClassLabel, std::vector<ScoredDetection>> scored;
  std::map<ClassLabel, std::size_t> gt_per_class;
  std::size_t tp_at_cut = 0, dets_at_cut = 0;

  for (const auto* e : entries) {
    const auto& result = *by_image.at(e->image.id);
    if (report.model_id.empty()) report.model_id = result.model_id;
    const int w = result.image_width > 0 ? result.image_width : e->image.width_px;
    const int h = result.image_height > 0 ? result.image_height : e->image.height_px;
    const auto gts = ToPixelBoxes(e->annotations, w, h);
    for (const auto& g : gts) ++gt_per_class[g.class_label];
    report.num_ground_truth += gts.size();
    report.num_detections += result.detections.size();

    const auto outcome = MatchDetections(result.detections, gts, options.iou_threshold);
    for (const auto& m : outcome.matches) {
      scored[m.class_label].push_back({m.confidence, m.true_positive});
      if (m.confidence >= options.confidence_threshold) {
        ++dets_at_cut;
        if (m.true_positive) ++tp_at_cut;
      }
    }
  }
  if (options.model_id) report.model_id = *options.model_id;
  if (report.num_ground_truth == 0) {
    throw Error(ErrorCode::kNoGroundTruth, "evaluation split has no ground-truth boxes");
  }

  double ap_sum = 0;
  for (ClassLabel c : kAllClasses) {
    const std::size_t n_gt = gt_per_class[c];
    if (n_gt == 0) continue;
    const auto& s = scored[c];
    const double ap = s.empty() ? 0.0 : AveragePrecision(PrCurve(s, n_gt));
    report.per_class_ap[c] = ap;
    ap_sum += ap;
  }
  report.map_50 = ap_sum / static_cast<double>(report.per_class_ap.size());

  report.true_positives = tp_at_cut;
  report.false_positives = dets_at_cut - tp_at_cut;
  report.precision_pct =
      dets_at_cut == 0 ? 0.0 : 100.0 * static_cast<double>(tp_at_cut) / dets_at_cut;
  report.recall_pct = 100.0 * static_cast<double>(tp_at_cut) / report.num_ground_truth;
  report.f1_pct = F1(report.precision_pct, report.recall_pct);
  return report;
}

void to_json(json& j, const MetricsReport& r) {
  json ap = json::object();
  for (const auto& [c, v] : r.per_class_ap) ap[std::string(ClassName(c))] = v;
  j = json{{"model_id", r.model_id},
           {"per_class_ap", std::move(ap)},
           {"map_50", r.map_50},
           {"precision_pct", r.precision_pct},
           {"recall_pct", r.recall_pct},
           {"f1_pct", r.f1_pct},
           {"counts",
            {{"images", r.num_images},
             {"ground_truth", r.num_ground_truth},
             {"detections", r.num_detections},
             {"true_positives", r.true_positives},
             {"false_positives", r.false_positives}}},
           {"iou_threshold", r.iou_threshold},
           {"confidence_threshold", r.confidence_threshold}};
}

void from_json(const json& j, MetricsReport& r) {
  r = MetricsReport{};
  r.model_id = j.at("model_id").get<std::string>();
  for (const auto& [name, v] : j.at("per_class_ap").items()) {
    auto c = ClassFromName(name);
    if (!c) throw Error(ErrorCode::kInvalidArgument, "unknown class '" + name + "'");
    r.per_class_ap[*c] = v.get<double>();
  }
  r.map_50 = j.at("map_50").get<double>();
  r.precision_pct = j.at("precision_pct").get<double>();
  r.recall_pct = j.at("recall_pct").get<double>();
  r.f1_pct = j.at("f1_pct").get<double>();
  const auto& counts = j.at("counts");
  r.num_images = counts.at("images").get<std::size_t>();
  r.num_ground_truth = counts.at("ground_truth").get<std::size_t>();
  r.num_detections = counts.at("detections").get<std::size_t>();
  r.true_positives = counts.value("true_positives", std::size_t{0});
  r.false_positives = counts.value("false_positives", std::size_t{0});
  r.iou_threshold = j.value("iou_threshold", 0.5);
  r.confidence_threshold = j.value("confidence_threshold", 0.25);
}

std::string FormatMetricsTable(std::span<const MetricsReport> reports) {
  std::size_t name_width = 5;
  for (const auto& r : reports) name_width = std::max(name_width, r.model_id.size());
  std::string out;
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%-*s | %6s | %7s | %6s | %5s\n", static_cast<int>(name_width),
                "Model", "mAP(%)", "Prec(%)", "Rec(%)", "F1(%)");
  out += buf;
  out += std::string(name_width, '-') + "-|--------|---------|--------|------\n";
  for (const auto& r : reports) {
    std::snprintf(buf, sizeof(buf), "%-*s | %6.1f | %7.1f | %6.1f | %5.1f\n",
                  static_cast<int>(name_width), r.model_id.c_str(), 100.0 * r.map_50,
                  r.precision_pct, r.recall_pct, r.f1_pct);
    out += buf;
  }
  return out;
}

}  // namespace sentinel::metrics
