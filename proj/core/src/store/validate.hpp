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

#include <algorithm>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "sentinel/error.hpp"
#include "sentinel/store/store.hpp"

namespace sentinel::store::internal {

// Normalizes and checks a record before insertion; assigns an id if empty.
inline HistoryRecord PrepareRecord(const HistoryRecord& in) {
  HistoryRecord rec = in;
  if (rec.image_id.empty()) throw Error(ErrorCode::kInvalidArgument, "record needs an image id");
  if (rec.risk_report_id) {
    throw Error(ErrorCode::kInvalidArgument,
                "risk_report_id is assigned by InsertRiskReport, not on insert");
  }
  if (rec.acquired_at > rec.created_at) {
    throw Error(ErrorCode::kInvalidArgument, "acquired_at is after created_at");
  }
  if (rec.detection.image_id.empty()) rec.detection.image_id = rec.image_id;
  if (rec.detection.image_id != rec.image_id) {
    throw Error(ErrorCode::kInvalidArgument, "detection belongs to a different image");
  }
  if (rec.record_id.empty()) rec.record_id = NewId("rec");
  return rec;
}

struct SeriesRow {
  std::int64_t acquired_ms;
  std::int64_t created_ms;
  std::uint64_t order;  // insertion order, breaks created_at ties
  double wildfire_pct;
  double smoke_pct;
};

// Sorts rows and keeps one point per timestamp (the latest created).
inline std::vector<TimeSeriesPoint> CollapseSeries(std::vector<SeriesRow> rows) {
  std::sort(rows.begin(), rows.end(), [](const SeriesRow& a, const SeriesRow& b) {
    if (a.acquired_ms != b.acquired_ms) return a.acquired_ms < b.acquired_ms;
    if (a.created_ms != b.created_ms) return a.created_ms < b.created_ms;
    return a.order < b.order;
  });
  std::vector<TimeSeriesPoint> out;
  for (const auto& r : rows) {
    TimeSeriesPoint p{FromEpochMillis(r.acquired_ms), r.wildfire_pct, r.smoke_pct};
    if (!out.empty() && out.back().timestamp == p.timestamp) {
      out.back() = p;
    } else {
      out.push_back(p);
    }
  }
  return out;
}

inline void CheckRange(Timestamp from, Timestamp to) {
  if (from > to) throw Error(ErrorCode::kInvalidRange, "time range start is after its end");
}

}  // namespace sentinel::store::internal
