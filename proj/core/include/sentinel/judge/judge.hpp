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
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "sentinel/risk/client.hpp"
#include "sentinel/risk/risk.hpp"

namespace sentinel::judge {

struct JudgeRubric {
  std::vector<std::string> dimensions = {"semantic correctness", "risk reasoning",
                                         "actionable clarity"};
  int scale_min = 1;
  int scale_max = 10;
  std::string instruction =
      "You are an expert wildfire risk assessor acting as an impartial judge. Evaluate the "
      "candidate risk assessment against the detection data using the rubric below.";
};

struct JudgeScore {
  std::string item_id;    // shared across the compared models, e.g. image id
  std::string report_id;  // the scored report
  std::string model;      // model that produced the report
  int overall = 0;
  std::map<std::string, int> per_dimension;
  std::string rationale;
  std::string judge_model;

  friend bool operator==(const JudgeScore&, const JudgeScore&) = default;
};

// Deterministic judge prompt; ends by asking for a final "SCORE: <integer>".
std::string BuildJudgePrompt(const risk::RiskReport& report, const risk::DetectionSummary& summary,
                             const JudgeRubric& rubric = {});

// Parses the last "SCORE: n" line, plus optional "<DIMENSION>: n" lines.
// Throws kUnparseableScore or kOutOfRangeScore.
JudgeScore ParseJudgeResponse(std::string_view raw, const JudgeRubric& rubric = {});

// Judge requests run at temperature 0.
risk::GenerationParams JudgeGenerationParams(std::string model_name);

JudgeScore ScoreReport(const risk::RiskReport& report, std::string item_id,
                       std::string report_id, risk::ChatClient& judge_client,
                       const risk::GenerationParams& params, const JudgeRubric& rubric = {});

struct ModelSummary {
  std::string model;
  double mean = 0;  // full precision; FormatMean for display
  std::size_t n = 0;
  friend bool operator==(const ModelSummary&, const ModelSummary&) = default;
};

struct ItemDelta {
  std::string item_id;
  int score_a = 0;
  int score_b = 0;
  int delta = 0;  // a - b
  friend bool operator==(const ItemDelta&, const ItemDelta&) = default;
};

struct ComparisonReport {
  ModelSummary a;
  ModelSummary b;
  std::optional<std::string> winner;  // nullopt on a tie
  std::vector<ItemDelta> deltas;      // ordered by item_id

  bool tie() const { return !winner.has_value(); }
  // "model X mean 7.03 vs model Y mean 6.16"
  std::string Headline() const;
  friend bool operator==(const ComparisonReport&, const ComparisonReport&) = default;
};

std::string FormatMean(double mean);

// Throws kEmptyScoreSet and kMismatchedItemSets.
ComparisonReport CompareModels(const std::vector<JudgeScore>& scores_a,
                               const std::vector<JudgeScore>& scores_b);

struct RunItem {
  std::string item_id;
  std::filesystem::path report_a;
  std::filesystem::path report_b;
};

struct RunManifest {
  std::string model_a;
  std::string model_b;
  std::vector<RunItem> items;
};

// {"model_a": str, "model_b": str, "items": [{"item_id", "model_a_report",
// "model_b_report"}]}; relative paths resolve against the manifest directory.
RunManifest LoadRunManifest(const std::filesystem::path& path);

struct RunOutcome {
  std::vector<JudgeScore> scores;  // a then b per item, in manifest order
  ComparisonReport comparison;
};

// Scores every report sequentially. Throws kMismatchedItemSets when a report
// file is missing or unreadable.
RunOutcome RunJudge(const RunManifest& manifest, risk::ChatClient& judge_client,
                    const risk::GenerationParams& params, const JudgeRubric& rubric = {});

// "item_id,model,score" rows with a header line.
std::string ScoresCsv(const std::vector<JudgeScore>& scores);

void to_json(nlohmann::json& j, const JudgeScore& s);
void from_json(const nlohmann::json& j, JudgeScore& s);
void to_json(nlohmann::json& j, const ComparisonReport& r);
void from_json(const nlohmann::json& j, ComparisonReport& r);

}  // namespace sentinel::judge
