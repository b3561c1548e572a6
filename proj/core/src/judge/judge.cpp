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

#include "sentinel/judge/judge.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "sentinel/error.hpp"

namespace sentinel::judge {

using nlohmann::json;

namespace {

std::string Upper(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

void AppendList(std::string& out, const std::vector<std::string>& items) {
  if (items.empty()) {
    out += "- (none)\n";
    return;
  }
  for (const auto& item : items) out += "- " + item + "\n";
}

// Finds "<label>:" (case-insensitive, optional surrounding '*') and reads the
// integer that follows. Returns the position of the last match.
struct LabeledInt {
  bool found_label = false;
  std::optional<long> value;
};

LabeledInt FindLastLabeledInt(std::string_view text, std::string_view label) {
  const std::string hay = Upper(text);
  const std::string needle = Upper(label);
  LabeledInt out;
  std::size_t pos = hay.rfind(needle);
  while (pos != std::string::npos) {
    const bool left_ok =
        pos == 0 || !std::isalnum(static_cast<unsigned char>(hay[pos - 1]));
    std::size_t i = pos + needle.size();
    while (i < hay.size() && hay[i] == '*') ++i;
    if (left_ok && i < hay.size() && hay[i] == ':') {
      out.found_label = true;
      ++i;
      while (i < hay.size() && (hay[i] == ' ' || hay[i] == '\t' || hay[i] == '*')) ++i;
      std::size_t j = i;
      if (j < hay.size() && (hay[j] == '-' || hay[j] == '+')) ++j;
      const std::size_t digits = j;
      while (j < hay.size() && std::isdigit(static_cast<unsigned char>(hay[j]))) ++j;
      if (j > digits && j - digits <= 9) {
        out.value = std::stol(hay.substr(i, j - i));
        return out;
      }
    }
    if (pos == 0) break;
    pos = hay.rfind(needle, pos - 1);
  }
  return out;
}

}  // namespace

std::string BuildJudgePrompt(const risk::RiskReport& report, const risk::DetectionSummary& summary,
                             const JudgeRubric& rubric) {
  char line[160];
  std::string out = rubric.instruction;
  out += "\n\nRubric dimensions:\n";
  for (std::size_t i = 0; i < rubric.dimensions.size(); ++i) {
    out += std::to_string(i + 1) + ". " + rubric.dimensions[i] + "\n";
  }
  std::snprintf(line, sizeof(line),
                "\nScore the response as a whole on an integer scale from %d (unusable) to %d "
                "(expert quality).\n",
                rubric.scale_min, rubric.scale_max);
  out += line;

  out += "\nDetection summary:\n";
  std::snprintf(line, sizeof(line), "Image size: %dx%d\n", summary.image_width,
                summary.image_height);
  out += line;
  out += "Smoke coverage (%): " + detection::FormatPercent(summary.smoke_coverage_pct) + "\n";
  out += "Wildfire coverage (%): " + detection::FormatPercent(summary.wildfire_coverage_pct) + "\n";
  out += "Detections: " + std::to_string(summary.boxes.size()) + "\n";
  for (const auto& d : summary.boxes) {
    std::snprintf(line, sizeof(line), "- %s %.2f [%.1f, %.1f, %.1f, %.1f]\n",
                  std::string(ClassName(d.class_label)).c_str(), d.confidence, d.bbox.x_min,
                  d.bbox.y_min, d.bbox.x_max, d.bbox.y_max);
    out += line;
  }

  out += "\nCandidate report:\n";
  out += "General observations: " + report.general_observations + "\n";
  out += "Fire behavior: " + report.fire_behavior + "\n";
  out += "Spread potential: " + report.spread_potential + "\n";
  out += "Severity: " + std::string(risk::SeverityName(report.severity));
  if (report.severity_source == risk::SeveritySource::kCoverageFallback) {
    out += " (derived from coverage)";
  }
  out += "\nCritical risks:\n";
  AppendList(out, report.critical_risks);
  out += "Recommendations:\n";
  AppendList(out, report.recommendations);

  out += "\nExplain your reasoning briefly. You may add one line per dimension in the form "
         "\"<DIMENSION>: <integer>\". The final line must be exactly \"SCORE: <integer>\".\n";
  return out;
}

JudgeScore ParseJudgeResponse(std::string_view raw, const JudgeRubric& rubric) {
  const auto found = FindLastLabeledInt(raw, "SCORE");
  if (!found.value) {
    throw Error(ErrorCode::kUnparseableScore, "no 'SCORE: <integer>' line in judge reply");
  }
  const long n = *found.value;
  if (n < rubric.scale_min || n > rubric.scale_max) {
    throw Error(ErrorCode::kOutOfRangeScore,
                "score " + std::to_string(n) + " outside [" + std::to_string(rubric.scale_min) +
                    ", " + std::to_string(rubric.scale_max) + "]");
  }
  JudgeScore score;
  score.overall = static_cast<int>(n);
  for (const auto& dim : rubric.dimensions) {
    const auto d = FindLastLabeledInt(raw, dim);
    if (d.value && *d.value >= rubric.scale_min && *d.value <= rubric.scale_max) {
      score.per_dimension[dim] = static_cast<int>(*d.value);
    }
  }
  std::string_view text = raw;
  const std::string upper = Upper(raw);
  if (auto p = upper.rfind("SCORE"); p != std::string::npos) text = text.substr(0, p);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) {
    text.remove_suffix(1);
  }
  score.rationale = std::string(text);
  return score;
}

risk::GenerationParams JudgeGenerationParams(std::string model_name) {
  risk::GenerationParams p;
  p.temperature = 0.0;
  p.top_p = 1.0;
  p.max_tokens = 512;
  p.model_name = std::move(model_name);
  return p;
}

JudgeScore ScoreReport(const risk::RiskReport& report, std::string item_id,
                       std::string report_id, risk::ChatClient& judge_client,
                       const risk::GenerationParams& params, const JudgeRubric& rubric) {
  risk::ChatRequest request;
  request.user = BuildJudgePrompt(report, report.summary, rubric);
  request.params = params;
  const auto exchange = judge_client.Complete(request);
  JudgeScore score = ParseJudgeResponse(exchange.response.text, rubric);
  score.item_id = std::move(item_id);
  score.report_id = std::move(report_id);
  score.model = report.source_model;
  score.judge_model =
      params.model_name.empty() ? exchange.response.provider_id : params.model_name;
  return score;
}

std::string FormatMean(double mean) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", mean);
  return buf;
}

std::string ComparisonReport::Headline() const {
  return "model " + a.model + " mean " + FormatMean(a.mean) + " vs model " + b.model + " mean " +
         FormatMean(b.mean);
}

namespace {

ModelSummary Summarize(const std::vector<JudgeScore>& scores) {
  ModelSummary s;
  s.model = scores.front().model;
  long total = 0;
  for (const auto& x : scores) total += x.overall;
  s.n = scores.size();
  s.mean = static_cast<double>(total) / static_cast<double>(s.n);
  return s;
}

std::map<std::string, int> ByItem(const std::vector<JudgeScore>& scores) {
  std::map<std::string, int> out;
  for (const auto& s : scores) {
    if (!out.emplace(s.item_id, s.overall).second) {
      throw Error(ErrorCode::kMismatchedItemSets, "item '" + s.item_id + "' scored twice");
    }
  }
  return out;
}

}  // namespace

ComparisonReport CompareModels(const std::vector<JudgeScore>& scores_a,
                               const std::vector<JudgeScore>& scores_b) {
  if (scores_a.empty() || scores_b.empty()) {
    throw Error(ErrorCode::kEmptyScoreSet, "both models need at least one score");
  }
  const auto items_a = ByItem(scores_a);
  const auto items_b = ByItem(scores_b);
  std::vector<std::string> only;
  for (const auto& [id, _] : items_a) {
    if (!items_b.contains(id)) only.push_back(id);
  }
  for (const auto& [id, _] : items_b) {
    if (!items_a.contains(id)) only.push_back(id);
  }
  if (!only.empty()) {
    throw Error(ErrorCode::kMismatchedItemSets,
                std::to_string(only.size()) + " item(s) scored for only one model", only);
  }

  ComparisonReport report;
  report.a = Summarize(scores_a);
  report.b = Summarize(scores_b);
  for (const auto& [id, sa] : items_a) {
    const int sb = items_b.at(id);
    report.deltas.push_back({id, sa, sb, sa - sb});
  }
  // Compare at display precision so the headline and the verdict agree.
  const std::string ma = FormatMean(report.a.mean);
  const std::string mb = FormatMean(report.b.mean);
  if (ma != mb) {
    report.winner = report.a.mean > report.b.mean ? report.a.model : report.b.model;
  }
  return report;
}

RunManifest LoadRunManifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kUnreadableFile, "cannot open run manifest " + path.string());
  RunManifest m;
  const auto base = path.parent_path();
  auto resolve = [&](const std::string& p) {
    std::filesystem::path fp(p);
    return fp.is_absolute() ? fp : base / fp;
  };
  try {
    const json j = json::parse(in);
    m.model_a = j.value("model_a", "");
    m.model_b = j.value("model_b", "");
    for (const auto& item : j.at("items")) {
      m.items.push_back({item.at("item_id").get<std::string>(),
                         resolve(item.at("model_a_report").get<std::string>()),
                         resolve(item.at("model_b_report").get<std::string>())});
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kManifestInvalid, path.string() + ": " + e.what());
  }
  if (m.items.empty()) throw Error(ErrorCode::kEmptyScoreSet, "run manifest lists no items");
  return m;
}

RunOutcome RunJudge(const RunManifest& manifest, risk::ChatClient& judge_client,
                    const risk::GenerationParams& params, const JudgeRubric& rubric) {
  auto load = [](const std::filesystem::path& p) {
    try {
      return risk::LoadReport(p.string());
    } catch (const Error& e) {
      throw Error(ErrorCode::kMismatchedItemSets, "report unavailable: " + p.string(),
                  {e.what()});
    }
  };
  RunOutcome out;
  std::vector<JudgeScore> a, b;
  for (const auto& item : manifest.items) {
    auto ra = load(item.report_a);
    auto rb = load(item.report_b);
    if (!manifest.model_a.empty()) ra.source_model = manifest.model_a;
    if (!manifest.model_b.empty()) rb.source_model = manifest.model_b;
    a.push_back(ScoreReport(ra, item.item_id, item.report_a.filename().string(), judge_client,
                            params, rubric));
    b.push_back(ScoreReport(rb, item.item_id, item.report_b.filename().string(), judge_client,
                            params, rubric));
    out.scores.push_back(a.back());
    out.scores.push_back(b.back());
  }
  out.comparison = CompareModels(a, b);
  return out;
}

std::string ScoresCsv(const std::vector<JudgeScore>& scores) {
  auto field = [](const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
      if (c == '"') q += '"';
      q += c;
    }
    return q + "\"";
  };
  std::string out = "item_id,model,score\n";
  for (const auto& s : scores) {
    out += field(s.item_id) + "," + field(s.model) + "," + std::to_string(s.overall) + "\n";
  }
  return out;
}

void to_json(json& j, const JudgeScore& s) {
  j = json{{"item_id", s.item_id},         {"report_id", s.report_id},
           {"model", s.model},             {"overall", s.overall},
           {"per_dimension", s.per_dimension}, {"rationale", s.rationale},
           {"judge_model", s.judge_model}};
}

void from_json(const json& j, JudgeScore& s) {
  s = JudgeScore{};
  s.item_id = j.value("item_id", "");
  s.report_id = j.value("report_id", "");
  s.model = j.value("model", "");
  s.overall = j.at("overall").get<int>();
  if (j.contains("per_dimension")) {
    s.per_dimension = j.at("per_dimension").get<std::map<std::string, int>>();
  }
  s.rationale = j.value("rationale", "");
  s.judge_model = j.value("judge_model", "");
}

namespace {

json SummaryJson(const ModelSummary& s) {
  return {{"model", s.model}, {"mean", std::stod(FormatMean(s.mean))},
          {"mean_display", FormatMean(s.mean)}, {"n", s.n}};
}

ModelSummary SummaryFromJson(const json& j) {
  ModelSummary s;
  s.model = j.at("model").get<std::string>();
  s.mean = j.at("mean").get<double>();
  s.n = j.at("n").get<std::size_t>();
  return s;
}

}  // namespace

void to_json(json& j, const ComparisonReport& r) {
  json deltas = json::array();
  for (const auto& d : r.deltas) {
    deltas.push_back(
        {{"item_id", d.item_id}, {"score_a", d.score_a}, {"score_b", d.score_b}, {"delta", d.delta}});
  }
  j = json{{"models", {SummaryJson(r.a), SummaryJson(r.b)}},
           {"winner", r.winner ? json(*r.winner) : json(nullptr)},
           {"tie", r.tie()},
           {"headline", r.Headline()},
           {"deltas", std::move(deltas)}};
}

void from_json(const json& j, ComparisonReport& r) {
  r = ComparisonReport{};
  const auto& models = j.at("models");
  if (models.size() != 2) throw Error(ErrorCode::kInvalidArgument, "comparison needs two models");
  r.a = SummaryFromJson(models.at(0));
  r.b = SummaryFromJson(models.at(1));
  if (j.contains("winner") && !j.at("winner").is_null()) {
    r.winner = j.at("winner").get<std::string>();
  }
  for (const auto& d : j.at("deltas")) {
    r.deltas.push_back({d.at("item_id").get<std::string>(), d.at("score_a").get<int>(),
                        d.at("score_b").get<int>(), d.at("delta").get<int>()});
  }
}

}  // namespace sentinel::judge
