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

#include "sentinel/store/store.hpp"

#include <cstdio>
#include <random>

#include <nlohmann/json.hpp>

#include "sentinel/error.hpp"

namespace sentinel::store {

using nlohmann::json;

std::vector<GrowthInterval> GrowthRate(const std::vector<TimeSeriesPoint>& series) {
  if (series.size() < 2) {
    throw Error(ErrorCode::kTooFewPoints, "growth rate needs at least two points");
  }
  std::vector<GrowthInterval> out;
  out.reserve(series.size() - 1);
  for (std::size_t i = 1; i < series.size(); ++i) {
    const auto& a = series[i - 1];
    const auto& b = series[i];
    if (b.timestamp <= a.timestamp) {
      throw Error(ErrorCode::kNonMonotonicTime,
                  "timestamps must strictly increase (point " + std::to_string(i) + ")");
    }
    const double hours =
        std::chrono::duration<double, std::ratio<3600>>(b.timestamp - a.timestamp).count();
    out.push_back({a.timestamp, b.timestamp, (b.wildfire_pct - a.wildfire_pct) / hours});
  }
  return out;
}

std::string NewId(std::string_view prefix) {
  thread_local std::mt19937_64 rng(std::random_device{}());
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(rng()));
  return std::string(prefix) + "-" + buf;
}

std::unique_ptr<Store> OpenStore(const std::string& url) {
  if (url.empty() || url == "memory:") return OpenEmbeddedStore({});
  if (url.rfind("sqlite://", 0) == 0) {
    // sqlite:///abs/path or sqlite://rel/path
    return OpenSqliteStore(url.substr(9));
  }
  if (url.rfind("file:", 0) == 0) return OpenEmbeddedStore(url.substr(5));
  if (const auto scheme = url.find("://"); scheme != std::string::npos) {
    throw Error(ErrorCode::kUnsupported,
                "store scheme '" + url.substr(0, scheme) + "' is not supported");
  }
  return OpenEmbeddedStore(url);
}

void to_json(json& j, const HistoryRecord& r) {
  j = json{{"record_id", r.record_id},
           {"image_id", r.image_id},
           {"acquired_at", ToEpochMillis(r.acquired_at)},
           {"region_tag", r.region_tag ? json(*r.region_tag) : json(nullptr)},
           {"detection", r.detection},
           {"risk_report_id", r.risk_report_id ? json(*r.risk_report_id) : json(nullptr)},
           {"created_at", ToEpochMillis(r.created_at)}};
}

void from_json(const json& j, HistoryRecord& r) {
  r = HistoryRecord{};
  r.record_id = j.at("record_id").get<std::string>();
  r.image_id = j.at("image_id").get<std::string>();
  r.acquired_at = FromEpochMillis(j.at("acquired_at").get<std::int64_t>());
  if (const auto& t = j.at("region_tag"); !t.is_null()) r.region_tag = t.get<std::string>();
  r.detection = j.at("detection").get<detection::DetectionResult>();
  if (auto it = j.find("risk_report_id"); it != j.end() && !it->is_null()) {
    r.risk_report_id = it->get<std::string>();
  }
  r.created_at = FromEpochMillis(j.at("created_at").get<std::int64_t>());
}

void to_json(json& j, const TimeSeriesPoint& p) {
  j = json{{"timestamp", FormatIso8601(p.timestamp)},
           {"timestamp_ms", ToEpochMillis(p.timestamp)},
           {"wildfire_pct", p.wildfire_pct},
           {"smoke_pct", p.smoke_pct}};
}

void from_json(const json& j, TimeSeriesPoint& p) {
  p.timestamp = j.contains("timestamp_ms")
                    ? FromEpochMillis(j.at("timestamp_ms").get<std::int64_t>())
                    : ParseTimestamp(j.at("timestamp").get<std::string>());
  p.wildfire_pct = j.at("wildfire_pct").get<double>();
  p.smoke_pct = j.at("smoke_pct").get<double>();
}

void to_json(json& j, const GrowthInterval& g) {
  j = json{{"from", FormatIso8601(g.from)}, {"to", FormatIso8601(g.to)},
           {"pp_per_hour", g.pp_per_hour}};
}

}  // namespace sentinel::store
