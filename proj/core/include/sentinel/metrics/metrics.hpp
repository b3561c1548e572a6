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

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "sentinel/detection/detection.hpp"
#include "sentinel/imagery/dataset.hpp"

namespace sentinel::metrics {

using detection::BoundingBox;
using detection::Detection;

struct GroundTruthBox {
  BoundingBox bbox;
  ClassLabel class_label = ClassLabel::kWildfire;
};

// Normalized annotations to absolute pixels in a width x height frame.
std::vector<GroundTruthBox> ToPixelBoxes(const std::vector<imagery::Annotation>& annotations,
                                         int width, int height);

struct DetectionMatch {
  std::size_t detection_index = 0;  // index into the input list
  double confidence = 0;
  ClassLabel class_label = ClassLabel::kWildfire;
  bool true_positive = false;
  std::optional<std::size_t> gt_index;
};

struct MatchOutcome {
  // One entry per detection, in processing (confidence) order.
  std::vector<DetectionMatch> matches;
  std::size_t fn_count = 0;
  double iou_threshold = 0.5;

  std::size_t tp_count() const;
  std::size_t fp_count() const;
};

// Greedy matching in detection::ConfidenceOrder. A detection is a true
// positive iff its best-IoU unmatched same-class ground truth (lowest index on
// ties) reaches the threshold; that ground truth is then consumed.
MatchOutcome MatchDetections(std::span<const Detection> detections,
                             std::span<const GroundTruthBox> ground_truth,
                             double iou_threshold = 0.5);

struct ScoredDetection {
  double confidence = 0;
  bool true_positive = false;
};

struct PRPoint {
  double confidence_cut = 0;
  double precision = 0;
  double recall = 0;
  friend bool operator==(const PRPoint&, const PRPoint&) = default;
};

// One point per distinct confidence, descending, with cumulative counts.
// Throws kNoGroundTruth when total_gt == 0.
std::vector<PRPoint> PrCurve(std::vector<ScoredDetection> scored, std::size_t total_gt);

// All-points interpolated area under the precision envelope.
// Throws kEmptyCurve.
double AveragePrecision(std::span<const PRPoint> curve);

// Harmonic mean in percentage units; 0 when both inputs are 0.
double F1(double precision_pct, double recall_pct);

struct MetricsReport {
  std::string model_id;
  // Only classes with at least one ground-truth box appear here.
  std::map<ClassLabel, double> per_class_ap;
  double map_50 = 0;
  double precision_pct = 0;
  double recall_pct = 0;
  double f1_pct = 0;
  std::size_t num_images = 0;
  std::size_t num_ground_truth = 0;
  std::size_t num_detections = 0;
  std::size_t true_positives = 0;
  std::size_t false_positives = 0;
  double iou_threshold = 0.5;
  double confidence_threshold = 0.25;

  friend bool operator==(const MetricsReport&, const MetricsReport&) = default;
};

struct EvaluationOptions {
  double iou_threshold = 0.5;
  // Operating point for precision/recall/F1; AP uses every detection given.
  double confidence_threshold = 0.25;
  imagery::Split split = imagery::Split::kTest;
  std::optional<std::string> model_id;
};

// Scores the results for every image of `options.split`; precision/recall
// are micro-averaged over all boxes of both classes.
// Throws kMissingResults (details() lists the ids) and kNoGroundTruth.
MetricsReport EvaluateModel(const imagery::DatasetManifest& manifest,
                            std::span<const detection::DetectionResult> results,
                            const EvaluationOptions& options = {});

void to_json(nlohmann::json& j, const MetricsReport& r);
void from_json(const nlohmann::json& j, MetricsReport& r);

// "Model | mAP(%) | Prec(%) | Rec(%) | F1(%)" with one decimal per cell.
std::string FormatMetricsTable(std::span<const MetricsReport> reports);

}  // namespace sentinel::metrics
