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

#include "sentinel/risk/risk.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "sentinel/error.hpp"
#include "sentinel/imagery/raster.hpp"
#include "sentinel/imagery/transform.hpp"

namespace sentinel::risk {

using nlohmann::json;

DetectionSummary DetectionSummary::From(const detection::DetectionResult& result) {
  return {result.image_width, result.image_height, result.coverage.smoke_pct,
          result.coverage.wildfire_pct, result.detections};
}

std::string_view SeverityName(Severity s) {
  switch (s) {
    case Severity::kLow: return "low";
    case Severity::kModerate: return "moderate";
    case Severity::kHigh: return "high";
    case Severity::kExtreme: return "extreme";
  }
  return "low";
}

std::optional<Severity> SeverityFromName(std::string_view name) {
  if (name == "low") return Severity::kLow;
  if (name == "moderate") return Severity::kModerate;
  if (name == "high") return Severity::kHigh;
  if (name == "extreme") return Severity::kExtreme;
  return std::nullopt;
}

Severity ClassifySeverityFallback(const detection::CoverageMetrics& coverage,
                                  const SeverityThresholds& t) {
  const double total = std::min(100.0, coverage.wildfire_pct + coverage.smoke_pct);
  if (total < t.low_below) return Severity::kLow;
  if (total < t.moderate_below) return Severity::kModerate;
  if (total < t.high_below) return Severity::kHigh;
  return Severity::kExtreme;
}

const std::string_view kRoleLine =
    "You are a senior wildfire analyst specializing in satellite imagery analysis.";

const std::vector<std::string_view> kAnalysisRequirements = {
    "Visual assessment independent of bounding boxes",
    "Fire behavior from smoke patterns and burn distribution",
    "Spread potential evaluation (pattern, growth rate)",
    "Severity classification from coverage metrics",
    "Critical risk identification",
    "Actionable recommendations /Insight (immediate actions, monitoring, resources)",
};

const std::string_view kKeyConsiderations =
    "Smoke plume density, fire zone clustering, spatial relationships, infrastructure impact.";

std::string BuildPrompt(const DetectionSummary& summary) {
  std::string p;
  p.reserve(1400);
  p += kRoleLine;
  p += " Analyze the following detection data from satellite imagery and provide a "
       "comprehensive risk assessment.\n";
  p += "In the first step, you need to analyze the image and provide a detailed analysis "
       "addressing the following points,\n";
  p += "There might be some bounding boxes of ROI in the image, but it is not guaranteed that "
       "all the bounding boxes are detected or localized correctly.\n";
  p += "** If you find a wildfire that the model did not detect, you can assume that the "
       "wildfire is detected and provide the analysis based on your point.\n";
  p += "\nInput Parameters:\n";
  p += "Image size: " + std::to_string(summary.image_width) + "x" +
       std::to_string(summary.image_height) +
       ", smoke coverage (%): " + detection::FormatPercent(summary.smoke_coverage_pct) +
       ", wildfire coverage (%): " + detection::FormatPercent(summary.wildfire_coverage_pct) +
       "\n";
  p += "\nAnalysis Requirements:\n";
  for (std::size_t i = 0; i < kAnalysisRequirements.size(); ++i) {
    p += std::to_string(i + 1) + ". ";
    p += kAnalysisRequirements[i];
    p += "\n";
  }
  p += "\nKey Considerations: ";
  p += kKeyConsiderations;
  p += "\n";
  return p;
}

namespace {

enum class Section { kNone, kGeneral, kFireBehavior, kSpread, kSeverity, kCritical, kActions };

struct HeadingRule {
  std::string_view prefix;
  Section section;
};

// First match wins, so longer phrases precede their shorter relatives.
constexpr std::array kHeadingRules = {
    HeadingRule{"general observation", Section::kGeneral},
    HeadingRule{"visual assessment", Section::kGeneral},
    HeadingRule{"observation", Section::kGeneral},
    HeadingRule{"overview", Section::kGeneral},
    HeadingRule{"fire behavior", Section::kFireBehavior},
    HeadingRule{"fire behaviour", Section::kFireBehavior},
    HeadingRule{"spread potential", Section::kSpread},
    HeadingRule{"spread", Section::kSpread},
    HeadingRule{"severity", Section::kSeverity},
    HeadingRule{"critical risk", Section::kCritical},
    HeadingRule{"risk identification", Section::kCritical},
    HeadingRule{"key risk", Section::kCritical},
    HeadingRule{"actionable", Section::kActions},
    HeadingRule{"recommendation", Section::kActions},
    HeadingRule{"insight", Section::kActions},
    HeadingRule{"immediate action", Section::kActions},
};

std::string Lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string_view Trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::string StripEmphasis(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if ((s[i] == '*' || s[i] == '_') && i + 1 < s.size() && s[i + 1] == s[i]) {
      ++i;
      continue;
    }
    out += s[i];
  }
  return std::string(Trim(out));
}

// Removes markdown heading hashes, bullets and "3." / "3)" enumerators.
std::string_view StripMarkers(std::string_view s, bool* had_marker) {
  s = Trim(s);
  bool marker = false;
  while (!s.empty()) {
    const bool lone_star = s.front() == '*' && !(s.size() > 1 && s[1] == '*');
    if (s.front() == '#' || s.front() == '-' || s.front() == '>' || lone_star) {
      s.remove_prefix(1);
      marker = true;
    } else if (s.substr(0, 3) == "\xE2\x80\xA2") {  // U+2022 bullet
      s.remove_prefix(3);
      marker = true;
    } else if (std::isdigit(static_cast<unsigned char>(s.front()))) {
      std::size_t i = 0;
      while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
      if (i < s.size() && (s[i] == '.' || s[i] == ')')) {
        s.remove_prefix(i + 1);
        marker = true;
      } else {
        break;
      }
    } else {
      break;
    }
    s = Trim(s);
  }
  if (had_marker) *had_marker = marker;
  return s;
}

std::size_t WordCount(std::string_view s) {
  std::size_t n = 0;
  bool in_word = false;
  for (char c : s) {
    const bool space = std::isspace(static_cast<unsigned char>(c)) != 0;
    if (!space && !in_word) ++n;
    in_word = !space;
  }
  return n;
}

struct HeadingMatch {
  Section section;
  std::string inline_text;
};

// Plain bullets inside a section are list items, not headings, unless the
// label itself is emphasized ("- **Severity:** high").
std::optional<HeadingMatch> MatchHeading(std::string_view line, bool in_section) {
  const std::string_view raw = Trim(line);
  const bool emphasized = raw.starts_with("**") || raw.starts_with("__") || raw.starts_with("#");
  const bool bullet = !emphasized && (raw.starts_with("-") || raw.starts_with("*") ||
                                      raw.starts_with("\xE2\x80\xA2"));
  if (bullet && in_section) {
    const std::string_view after = Trim(StripMarkers(raw, nullptr));
    if (!after.starts_with("**") && !after.starts_with("__")) return std::nullopt;
  }
  const std::string clean = StripEmphasis(StripMarkers(raw, nullptr));
  const std::string_view body = StripMarkers(clean, nullptr);
  const auto colon = body.find(':');
  const std::string_view label = Trim(body.substr(0, colon));
  if (label.empty() || WordCount(label) > 6) return std::nullopt;
  if (colon == std::string_view::npos && !emphasized && WordCount(label) > 4) return std::nullopt;
  const std::string lower = Lower(label);
  for (const auto& rule : kHeadingRules) {
    if (lower.starts_with(rule.prefix)) {
      HeadingMatch m{rule.section, {}};
      if (colon != std::string_view::npos) m.inline_text = StripEmphasis(body.substr(colon + 1));
      return m;
    }
  }
  return std::nullopt;
}

std::string JoinLines(const std::vector<std::string>& lines) {
  std::string out;
  for (const auto& l : lines) {
    if (!out.empty()) out += '\n';
    out += l;
  }
  const auto first = out.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  return out.substr(first, out.find_last_not_of(" \t\r\n") - first + 1);
}

std::vector<std::string> SplitItems(const std::vector<std::string>& lines) {
  std::vector<std::string> items;
  for (const auto& line : lines) {
    if (Trim(line).empty()) continue;
    bool marker = false;
    const std::string text = StripEmphasis(StripMarkers(line, &marker));
    if (text.empty()) continue;
    if (marker || items.empty()) {
      items.push_back(text);
    } else {
      items.back() += " " + text;
    }
  }
  return items;
}

bool IsWordChar(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

std::optional<Severity> FirstSeverityKeyword(std::string_view text) {
  const std::string lower = Lower(text);
  std::optional<Severity> best;
  std::size_t best_pos = std::string::npos;
  for (Severity s : {Severity::kLow, Severity::kModerate, Severity::kHigh, Severity::kExtreme}) {
    const std::string_view word = SeverityName(s);
    std::size_t pos = 0;
    while ((pos = lower.find(word, pos)) != std::string::npos) {
      const bool left_ok = pos == 0 || !IsWordChar(lower[pos - 1]);
      const std::size_t end = pos + word.size();
      const bool right_ok = end >= lower.size() || !IsWordChar(lower[end]);
      if (left_ok && right_ok) break;
      pos = end;
    }
    if (pos != std::string::npos && pos < best_pos) {
      best_pos = pos;
      best = s;
    }
  }
  return best;
}

std::string FallbackRecommendation(Severity s) {
  switch (s) {
    case Severity::kLow: return "Continue routine satellite monitoring of the area.";
    case Severity::kModerate:
      return "Increase monitoring frequency and notify local fire services.";
    case Severity::kHigh:
      return "Dispatch ground crews to verify the detection and stage containment resources.";
    case Severity::kExtreme:
      return "Initiate emergency response and assess evacuation needs for nearby communities.";
  }
  return {};
}

}  // namespace

RiskReport ParseReport(std::string_view raw, const DetectionSummary& summary,
                       std::string_view model, const SeverityThresholds& thresholds) {
  if (raw.find_first_not_of(" \t\r\n") == std::string_view::npos) {
    throw Error(ErrorCode::kEmptyResponse, "model reply is empty");
  }

  std::map<Section, std::vector<std::string>> sections;
  Section current = Section::kNone;
  std::istringstream in{std::string(raw)};
  std::string line;
  while (std::getline(in, line)) {
    if (auto h = MatchHeading(line, current != Section::kNone)) {
      current = h->section;
      auto& body = sections[current];
      if (!h->inline_text.empty()) body.push_back(h->inline_text);
      continue;
    }
    sections[current].push_back(line);
  }

  RiskReport report;
  report.raw_response = std::string(raw);
  report.source_model = std::string(model);
  report.summary = summary;
  report.general_observations = JoinLines(sections[Section::kGeneral]);
  if (report.general_observations.empty()) {
    report.general_observations = JoinLines(sections[Section::kNone]);
  }
  report.fire_behavior = JoinLines(sections[Section::kFireBehavior]);
  report.spread_potential = JoinLines(sections[Section::kSpread]);
  report.critical_risks = SplitItems(sections[Section::kCritical]);
  report.recommendations = SplitItems(sections[Section::kActions]);

  std::optional<Severity> parsed;
  if (sections.contains(Section::kSeverity)) {
    parsed = FirstSeverityKeyword(JoinLines(sections[Section::kSeverity]));
  }
  if (parsed) {
    report.severity = *parsed;
    report.severity_source = SeveritySource::kParsed;
  } else {
    report.severity = ClassifySeverityFallback(
        {summary.wildfire_coverage_pct, summary.smoke_coverage_pct}, thresholds);
    report.severity_source = SeveritySource::kCoverageFallback;
    report.degraded = true;
  }
  if (report.recommendations.empty()) {
    report.recommendations.push_back(FallbackRecommendation(report.severity));
    report.degraded = true;
  }
  return report;
}

Image RenderOverlay(const Image& image, const std::vector<detection::Detection>& detections) {
  Image out(image.width, image.height, 3);
  for (int y = 0; y < image.height; ++y) {
    for (int x = 0; x < image.width; ++x) {
      for (int c = 0; c < 3; ++c) out.at(x, y, c) = image.at(x, y, image.channels == 1 ? 0 : c);
    }
  }
  constexpr int kThickness = 2;
  for (const auto& d : detections) {
    const std::array<std::uint8_t, 3> color = d.class_label == ClassLabel::kWildfire
                                                  ? std::array<std::uint8_t, 3>{255, 0, 0}
                                                  : std::array<std::uint8_t, 3>{128, 128, 128};
    const int x0 = std::clamp(static_cast<int>(std::floor(d.bbox.x_min)), 0, image.width - 1);
    const int y0 = std::clamp(static_cast<int>(std::floor(d.bbox.y_min)), 0, image.height - 1);
    const int x1 = std::clamp(static_cast<int>(std::ceil(d.bbox.x_max)) - 1, 0, image.width - 1);
    const int y1 = std::clamp(static_cast<int>(std::ceil(d.bbox.y_max)) - 1, 0, image.height - 1);
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        const bool edge = x - x0 < kThickness || x1 - x < kThickness || y - y0 < kThickness ||
                          y1 - y < kThickness;
        if (!edge) continue;
        for (int c = 0; c < 3; ++c) out.at(x, y, c) = color[static_cast<std::size_t>(c)];
      }
    }
  }
  return out;
}

RiskReport AssessRisk(const Image& image, const detection::DetectionResult& result,
                      ChatClient& client, const GenerationParams& params,
                      const SeverityThresholds& thresholds) {
  params.Validate();
  const DetectionSummary summary = DetectionSummary::From(result);

  const Image* frame = &image;
  Image resized;
  if (result.image_width > 0 && result.image_height > 0 &&
      (image.width != result.image_width || image.height != result.image_height)) {
    resized = imagery::ResizeBilinear(image, {result.image_width, result.image_height});
    frame = &resized;
  }

  ChatRequest request;
  request.user = BuildPrompt(summary);
  request.image_png = imagery::EncodePng(RenderOverlay(*frame, result.detections));
  request.params = params;

  const ChatExchange exchange = client.Complete(request);
  const std::string model =
      params.model_name.empty() ? exchange.response.provider_id : params.model_name;
  RiskReport report = ParseReport(exchange.response.text, summary, model, thresholds);
  report.image_id = result.image_id;
  return report;
}

void to_json(json& j, const DetectionSummary& s) {
  j = json{{"image_width", s.image_width},
           {"image_height", s.image_height},
           {"smoke_coverage_pct", s.smoke_coverage_pct},
           {"wildfire_coverage_pct", s.wildfire_coverage_pct},
           {"boxes", s.boxes}};
}

void from_json(const json& j, DetectionSummary& s) {
  s.image_width = j.at("image_width").get<int>();
  s.image_height = j.at("image_height").get<int>();
  s.smoke_coverage_pct = j.at("smoke_coverage_pct").get<double>();
  s.wildfire_coverage_pct = j.at("wildfire_coverage_pct").get<double>();
  s.boxes = j.value("boxes", std::vector<detection::Detection>{});
}

void to_json(json& j, const RiskReport& r) {
  j = json{{"image_id", r.image_id},
           {"general_observations", r.general_observations},
           {"fire_behavior", r.fire_behavior},
           {"spread_potential", r.spread_potential},
           {"severity", SeverityName(r.severity)},
           {"severity_source", r.severity_source == SeveritySource::kParsed ? "parsed"
                                                                            : "coverage_fallback"},
           {"critical_risks", r.critical_risks},
           {"recommendations", r.recommendations},
           {"raw_response", r.raw_response},
           {"source_model", r.source_model},
           {"summary", r.summary},
           {"degraded", r.degraded}};
}

void from_json(const json& j, RiskReport& r) {
  r.image_id = j.value("image_id", std::string());
  r.general_observations = j.value("general_observations", std::string());
  r.fire_behavior = j.value("fire_behavior", std::string());
  r.spread_potential = j.value("spread_potential", std::string());
  auto severity = SeverityFromName(j.at("severity").get<std::string>());
  if (!severity) throw Error(ErrorCode::kInvalidArgument, "unknown severity");
  r.severity = *severity;
  r.severity_source = j.value("severity_source", std::string("parsed")) == "coverage_fallback"
                          ? SeveritySource::kCoverageFallback
                          : SeveritySource::kParsed;
  r.critical_risks = j.value("critical_risks", std::vector<std::string>{});
  r.recommendations = j.value("recommendations", std::vector<std::string>{});
  r.raw_response = j.value("raw_response", std::string());
  r.source_model = j.value("source_model", std::string());
  if (auto it = j.find("summary"); it != j.end()) {
    r.summary = it->get<DetectionSummary>();
  } else {
    r.summary = DetectionSummary{};
  }
  r.degraded = j.value("degraded", false);
}

RiskReport LoadReport(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kUnreadableFile, "cannot open " + path);
  try {
    return json::parse(in).get<RiskReport>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, path + ": " + e.what());
  }
}

void SaveReport(const RiskReport& report, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path);
  out << json(report).dump(2) << '\n';
}

}  // namespace sentinel::risk
