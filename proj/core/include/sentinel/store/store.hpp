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

#include <chrono>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "sentinel/detection/detection.hpp"
#include "sentinel/imagery/dataset.hpp"
#include "sentinel/judge/judge.hpp"
#include "sentinel/risk/risk.hpp"
#include "sentinel/time.hpp"

namespace sentinel::store {

struct HistoryRecord {
  std::string record_id;  // empty on insert -> generated
  std::string image_id;
  Timestamp acquired_at{};
  std::optional<std::string> region_tag;
  detection::DetectionResult detection;
  // Set by InsertRiskReport; the first report stored for the record.
  std::optional<std::string> risk_report_id;
  Timestamp created_at{};

  friend bool operator==(const HistoryRecord&, const HistoryRecord&) = default;
};

struct TimeSeriesPoint {
  Timestamp timestamp{};
  double wildfire_pct = 0;
  double smoke_pct = 0;
  friend bool operator==(const TimeSeriesPoint&, const TimeSeriesPoint&) = default;
};

struct GrowthInterval {
  Timestamp from{};
  Timestamp to{};
  double pp_per_hour = 0;  // wildfire percentage points per hour
  friend bool operator==(const GrowthInterval&, const GrowthInterval&) = default;
};

// Throws kTooFewPoints (< 2) and kNonMonotonicTime.
std::vector<GrowthInterval> GrowthRate(const std::vector<TimeSeriesPoint>& series);

struct StoredReport {
  std::string report_id;
  std::string record_id;
  risk::RiskReport report;
  friend bool operator==(const StoredReport&, const StoredReport&) = default;
};

struct StoredScore {
  std::string score_id;
  judge::JudgeScore score;  // score.report_id references a StoredReport
  friend bool operator==(const StoredScore&, const StoredScore&) = default;
};

// Named JSON artifacts such as metrics and comparison reports.
struct Artifact {
  std::string artifact_id;
  std::string kind;  // e.g. "metrics", "comparison"
  std::string body;  // serialized JSON
  Timestamp created_at{};
  friend bool operator==(const Artifact&, const Artifact&) = default;
};

// All methods are thread-safe. Writes are serialized, reads run concurrently
// against a consistent view.
class Store {
 public:
  virtual ~Store() = default;

  // Throws kDuplicateId.
  virtual void InsertImage(const imagery::ImageRecord& image) = 0;
  virtual std::optional<imagery::ImageRecord> FindImage(const std::string& id) const = 0;

  // Returns the record id. Throws kDuplicateId, kForeignKeyViolation (unknown
  // image) and kInvalidArgument (acquired_at after created_at, or a preset
  // risk_report_id).
  virtual std::string InsertRecord(const HistoryRecord& record) = 0;
  // Throws kNotFound.
  virtual HistoryRecord GetRecord(const std::string& record_id) const = 0;

  // Throws kDuplicateId and kForeignKeyViolation (unknown record).
  virtual std::string InsertRiskReport(const std::string& record_id,
                                       const risk::RiskReport& report,
                                       std::optional<std::string> report_id = std::nullopt) = 0;
  virtual StoredReport GetRiskReport(const std::string& report_id) const = 0;
  virtual std::vector<StoredReport> ReportsForRecord(const std::string& record_id) const = 0;

  // Throws kDuplicateId and kForeignKeyViolation (unknown report).
  virtual std::string InsertJudgeScore(const judge::JudgeScore& score,
                                       std::optional<std::string> score_id = std::nullopt) = 0;
  virtual std::vector<StoredScore> ScoresForReport(const std::string& report_id) const = 0;

  virtual void PutArtifact(const Artifact& artifact) = 0;  // kDuplicateId
  virtual Artifact GetArtifact(const std::string& artifact_id) const = 0;

  // Records with matching region and acquired_at in [from, to), ascending.
  // Records sharing a timestamp collapse to the most recently created one.
  // Throws kInvalidRange when from > to.
  virtual std::vector<TimeSeriesPoint> CoverageTimeSeries(const std::string& region_tag,
                                                          Timestamp from, Timestamp to) const = 0;

  virtual std::size_t RecordCount() const = 0;
  // Flushes buffered state (index snapshot, WAL) to disk.
  virtual void Flush() = 0;
};

struct EmbeddedOptions {
  bool sync_writes = true;          // fdatasync after every append
  std::size_t snapshot_every = 256; // appends between index snapshots
};

// Append-only record log plus a periodic index snapshot in `dir`. An empty
// path keeps everything in memory.
std::unique_ptr<Store> OpenEmbeddedStore(const std::filesystem::path& dir,
                                         const EmbeddedOptions& options = {});

// Relational backend on SQLite.
std::unique_ptr<Store> OpenSqliteStore(const std::filesystem::path& db_file);

// "" or "memory:" -> in-memory embedded; "file:<dir>" or a bare path ->
// embedded; "sqlite:///<file>" -> SQLite. Other schemes throw kUnsupported.
std::unique_ptr<Store> OpenStore(const std::string& url);

std::string NewId(std::string_view prefix);

void to_json(nlohmann::json& j, const HistoryRecord& r);
void from_json(const nlohmann::json& j, HistoryRecord& r);
void to_json(nlohmann::json& j, const TimeSeriesPoint& p);
void from_json(const nlohmann::json& j, TimeSeriesPoint& p);
void to_json(nlohmann::json& j, const GrowthInterval& g);

}  // namespace sentinel::store
