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

#include <mutex>

#include <nlohmann/json.hpp>
#include <sqlite3.h>

#include "sentinel/error.hpp"
#include "sentinel/store/store.hpp"
#include "store/validate.hpp"

namespace sentinel::store {

using nlohmann::json;

namespace {

constexpr const char* kSchema = R"sql(
PRAGMA foreign_keys = ON;
CREATE TABLE IF NOT EXISTS images (
  id TEXT PRIMARY KEY,
  source TEXT NOT NULL,
  acquired_at INTEGER NOT NULL,
  width INTEGER NOT NULL,
  height INTEGER NOT NULL,
  region_tag TEXT,
  pixel_ref TEXT NOT NULL
);
CREATE TABLE IF NOT EXISTS detections (
  id TEXT PRIMARY KEY,
  image_id TEXT NOT NULL REFERENCES images(id),
  model_id TEXT NOT NULL,
  created_at INTEGER NOT NULL,
  inference_ms REAL NOT NULL,
  wildfire_pct REAL NOT NULL,
  smoke_pct REAL NOT NULL,
  boxes_json TEXT NOT NULL,
  acquired_at INTEGER NOT NULL,
  region_tag TEXT,
  image_width INTEGER NOT NULL,
  image_height INTEGER NOT NULL
);
CREATE INDEX IF NOT EXISTS detections_region_time ON detections(region_tag, acquired_at);
CREATE TABLE IF NOT EXISTS risk_reports (
  id TEXT PRIMARY KEY,
  detection_id TEXT NOT NULL REFERENCES detections(id),
  severity TEXT NOT NULL,
  report_json TEXT NOT NULL,
  model TEXT NOT NULL
);
CREATE TABLE IF NOT EXISTS judge_scores (
  id TEXT PRIMARY KEY,
  report_id TEXT NOT NULL REFERENCES risk_reports(id),
  judge_model TEXT NOT NULL,
  score INTEGER NOT NULL,
  rationale TEXT NOT NULL,
  score_json TEXT NOT NULL
);
CREATE TABLE IF NOT EXISTS artifacts (
  id TEXT PRIMARY KEY,
  kind TEXT NOT NULL,
  body TEXT NOT NULL,
  created_at INTEGER NOT NULL
);
)sql";

class Statement {
 public:
  Statement(sqlite3* db, const char* sql) : db_(db) {
    if (sqlite3_prepare_v2(db, sql, -1, &stmt_, nullptr) != SQLITE_OK) {
      throw Error(ErrorCode::kIoError, std::string("sqlite prepare: ") + sqlite3_errmsg(db));
    }
  }
  ~Statement() { sqlite3_finalize(stmt_); }
  Statement(const Statement&) = delete;
  Statement& operator=(const Statement&) = delete;

  Statement& Bind(int i, const std::string& v) {
    sqlite3_bind_text(stmt_, i, v.data(), static_cast<int>(v.size()), SQLITE_TRANSIENT);
    return *this;
  }
  Statement& Bind(int i, const std::optional<std::string>& v) {
    if (v) return Bind(i, *v);
    sqlite3_bind_null(stmt_, i);
    return *this;
  }
  Statement& Bind(int i, std::int64_t v) {
    sqlite3_bind_int64(stmt_, i, v);
    return *this;
  }
  Statement& Bind(int i, double v) {
    sqlite3_bind_double(stmt_, i, v);
    return *this;
  }

  // True while a row is available.
  bool Step() {
    const int rc = sqlite3_step(stmt_);
    if (rc == SQLITE_ROW) return true;
    if (rc == SQLITE_DONE) return false;
    const int ext = sqlite3_extended_errcode(db_);
    const std::string msg = sqlite3_errmsg(db_);
    if (ext == SQLITE_CONSTRAINT_PRIMARYKEY || ext == SQLITE_CONSTRAINT_UNIQUE) {
      throw Error(ErrorCode::kDuplicateId, msg);
    }
    if (ext == SQLITE_CONSTRAINT_FOREIGNKEY) throw Error(ErrorCode::kForeignKeyViolation, msg);
    throw Error(ErrorCode::kIoError, "sqlite: " + msg);
  }

  std::string Text(int col) const {
    const auto* p = sqlite3_column_text(stmt_, col);
    return p ? std::string(reinterpret_cast<const char*>(p),
                           static_cast<std::size_t>(sqlite3_column_bytes(stmt_, col)))
             : std::string();
  }
  std::optional<std::string> OptText(int col) const {
    if (sqlite3_column_type(stmt_, col) == SQLITE_NULL) return std::nullopt;
    return Text(col);
  }
  std::int64_t Int(int col) const { return sqlite3_column_int64(stmt_, col); }
  double Real(int col) const { return sqlite3_column_double(stmt_, col); }

 private:
  sqlite3* db_;
  sqlite3_stmt* stmt_ = nullptr;
};

class SqliteStore final : public Store {
 public:
  explicit SqliteStore(const std::filesystem::path& file) {
    if (sqlite3_open_v2(file.c_str(), &db_,
                        SQLITE_OPEN_READWRITE | SQLITE_OPEN_CREATE | SQLITE_OPEN_FULLMUTEX,
                        nullptr) != SQLITE_OK) {
      const std::string msg = db_ ? sqlite3_errmsg(db_) : "out of memory";
      sqlite3_close(db_);
      throw Error(ErrorCode::kIoError, "cannot open " + file.string() + ": " + msg);
    }
    sqlite3_busy_timeout(db_, 5000);
    Exec(kSchema);
  }

  ~SqliteStore() override { sqlite3_close(db_); }

  void InsertImage(const imagery::ImageRecord& image) override {
    std::lock_guard lock(mu_);
    Statement s(db_,
                "INSERT INTO images(id, source, acquired_at, width, height, region_tag, pixel_ref) "
                "VALUES (?1, ?2, ?3, ?4, ?5, ?6, ?7)");
    s.Bind(1, image.id)
        .Bind(2, std::string(imagery::SourceName(image.source)))
        .Bind(3, ToEpochMillis(image.acquired_at))
        .Bind(4, std::int64_t{image.width_px})
        .Bind(5, std::int64_t{image.height_px})
        .Bind(6, image.region_tag)
        .Bind(7, image.pixel_ref);
    s.Step();
  }

  std::optional<imagery::ImageRecord> FindImage(const std::string& id) const override {
    std::lock_guard lock(mu_);
    Statement s(db_,
                "SELECT source, acquired_at, width, height, region_tag, pixel_ref FROM images "
                "WHERE id = ?1");
    s.Bind(1, id);
    if (!s.Step()) return std::nullopt;
    imagery::ImageRecord r;
    r.id = id;
    r.source = imagery::SourceFromName(s.Text(0)).value_or(imagery::ImageSource::kOther);
    r.acquired_at = FromEpochMillis(s.Int(1));
    r.width_px = static_cast<int>(s.Int(2));
    r.height_px = static_cast<int>(s.Int(3));
    r.region_tag = s.OptText(4);
    r.pixel_ref = s.Text(5);
    return r;
  }

  std::string InsertRecord(const HistoryRecord& in) override {
    const HistoryRecord rec = internal::PrepareRecord(in);
    std::lock_guard lock(mu_);
    {
      Statement probe(db_, "SELECT 1 FROM detections WHERE id = ?1");
      probe.Bind(1, rec.record_id);
      if (probe.Step()) {
        throw Error(ErrorCode::kDuplicateId, "record '" + rec.record_id + "' already stored");
      }
    }
    Statement s(db_,
                "INSERT INTO detections(id, image_id, model_id, created_at, inference_ms, "
                "wildfire_pct, smoke_pct, boxes_json, acquired_at, region_tag, image_width, "
                "image_height) VALUES (?1, ?2, ?3, ?4, ?5, ?6, ?7, ?8, ?9, ?10, ?11, ?12)");
    const auto& d = rec.detection;
    s.Bind(1, rec.record_id)
        .Bind(2, rec.image_id)
        .Bind(3, d.model_id)
        .Bind(4, ToEpochMillis(rec.created_at))
        .Bind(5, d.inference_ms)
        .Bind(6, d.coverage.wildfire_pct)
        .Bind(7, d.coverage.smoke_pct)
        .Bind(8, json(d.detections).dump())
        .Bind(9, ToEpochMillis(rec.acquired_at))
        .Bind(10, rec.region_tag)
        .Bind(11, std::int64_t{d.image_width})
        .Bind(12, std::int64_t{d.image_height});
    s.Step();
    return rec.record_id;
  }

  HistoryRecord GetRecord(const std::string& record_id) const override {
    std::lock_guard lock(mu_);
    Statement s(db_,
                "SELECT image_id, model_id, created_at, inference_ms, wildfire_pct, smoke_pct, "
                "boxes_json, acquired_at, region_tag, image_width, image_height, "
                "(SELECT id FROM risk_reports WHERE detection_id = d.id ORDER BY rowid LIMIT 1) "
                "FROM detections d WHERE id = ?1");
    s.Bind(1, record_id);
    if (!s.Step()) throw Error(ErrorCode::kNotFound, "no record '" + record_id + "'");
    HistoryRecord r;
    r.record_id = record_id;
    r.image_id = s.Text(0);
    r.detection.image_id = r.image_id;
    r.detection.model_id = s.Text(1);
    r.created_at = FromEpochMillis(s.Int(2));
    r.detection.inference_ms = s.Real(3);
    r.detection.coverage = {s.Real(4), s.Real(5)};
    r.detection.detections = json::parse(s.Text(6)).get<std::vector<detection::Detection>>();
    r.acquired_at = FromEpochMillis(s.Int(7));
    r.region_tag = s.OptText(8);
    r.detection.image_width = static_cast<int>(s.Int(9));
    r.detection.image_height = static_cast<int>(s.Int(10));
    r.risk_report_id = s.OptText(11);
    return r;
  }

  std::string InsertRiskReport(const std::string& record_id, const risk::RiskReport& report,
                               std::optional<std::string> report_id) override {
    const std::string id = report_id.value_or(NewId("rpt"));
    std::lock_guard lock(mu_);
    Statement s(db_,
                "INSERT INTO risk_reports(id, detection_id, severity, report_json, model) "
                "VALUES (?1, ?2, ?3, ?4, ?5)");
    s.Bind(1, id)
        .Bind(2, record_id)
        .Bind(3, std::string(risk::SeverityName(report.severity)))
        .Bind(4, json(report).dump())
        .Bind(5, report.source_model);
    s.Step();
    return id;
  }

  StoredReport GetRiskReport(const std::string& report_id) const override {
    std::lock_guard lock(mu_);
    Statement s(db_, "SELECT detection_id, report_json FROM risk_reports WHERE id = ?1");
    s.Bind(1, report_id);
    if (!s.Step()) throw Error(ErrorCode::kNotFound, "no report '" + report_id + "'");
    return {report_id, s.Text(0), json::parse(s.Text(1)).get<risk::RiskReport>()};
  }

  std::vector<StoredReport> ReportsForRecord(const std::string& record_id) const override {
    std::lock_guard lock(mu_);
    Statement s(db_,
                "SELECT id, report_json FROM risk_reports WHERE detection_id = ?1 ORDER BY rowid");
    s.Bind(1, record_id);
    std::vector<StoredReport> out;
    while (s.Step()) {
      out.push_back({s.Text(0), record_id, json::parse(s.Text(1)).get<risk::RiskReport>()});
    }
    return out;
  }

  std::string InsertJudgeScore(const judge::JudgeScore& score,
                               std::optional<std::string> score_id) override {
    const std::string id = score_id.value_or(NewId("scr"));
    std::lock_guard lock(mu_);
    Statement s(db_,
                "INSERT INTO judge_scores(id, report_id, judge_model, score, rationale, score_json) "
                "VALUES (?1, ?2, ?3, ?4, ?5, ?6)");
    s.Bind(1, id)
        .Bind(2, score.report_id)
        .Bind(3, score.judge_model)
        .Bind(4, std::int64_t{score.overall})
        .Bind(5, score.rationale)
        .Bind(6, json(score).dump());
    s.Step();
    return id;
  }

  std::vector<StoredScore> ScoresForReport(const std::string& report_id) const override {
    std::lock_guard lock(mu_);
    Statement s(db_, "SELECT id, score_json FROM judge_scores WHERE report_id = ?1 ORDER BY rowid");
    s.Bind(1, report_id);
    std::vector<StoredScore> out;
    while (s.Step()) out.push_back({s.Text(0), json::parse(s.Text(1)).get<judge::JudgeScore>()});
    return out;
  }

  void PutArtifact(const Artifact& a) override {
    std::lock_guard lock(mu_);
    Statement s(db_, "INSERT INTO artifacts(id, kind, body, created_at) VALUES (?1, ?2, ?3, ?4)");
    s.Bind(1, a.artifact_id).Bind(2, a.kind).Bind(3, a.body).Bind(4, ToEpochMillis(a.created_at));
    s.Step();
  }

  Artifact GetArtifact(const std::string& artifact_id) const override {
    std::lock_guard lock(mu_);
    Statement s(db_, "SELECT kind, body, created_at FROM artifacts WHERE id = ?1");
    s.Bind(1, artifact_id);
    if (!s.Step()) throw Error(ErrorCode::kNotFound, "no artifact '" + artifact_id + "'");
    return {artifact_id, s.Text(0), s.Text(1), FromEpochMillis(s.Int(2))};
  }

  std::vector<TimeSeriesPoint> CoverageTimeSeries(const std::string& region_tag, Timestamp from,
                                                  Timestamp to) const override {
    internal::CheckRange(from, to);
    std::lock_guard lock(mu_);
    Statement s(db_,
                "SELECT acquired_at, created_at, rowid, wildfire_pct, smoke_pct FROM detections "
                "WHERE region_tag = ?1 AND acquired_at >= ?2 AND acquired_at < ?3");
    s.Bind(1, region_tag).Bind(2, ToEpochMillis(from)).Bind(3, ToEpochMillis(to));
    std::vector<internal::SeriesRow> rows;
    while (s.Step()) {
      rows.push_back({s.Int(0), s.Int(1), static_cast<std::uint64_t>(s.Int(2)), s.Real(3),
                      s.Real(4)});
    }
    return internal::CollapseSeries(std::move(rows));
  }

  std::size_t RecordCount() const override {
    std::lock_guard lock(mu_);
    Statement s(db_, "SELECT COUNT(*) FROM detections");
    s.Step();
    return static_cast<std::size_t>(s.Int(0));
  }

  void Flush() override {}

 private:
  void Exec(const char* sql) {
    char* err = nullptr;
    if (sqlite3_exec(db_, sql, nullptr, nullptr, &err) != SQLITE_OK) {
      const std::string msg = err ? err : "unknown error";
      sqlite3_free(err);
      throw Error(ErrorCode::kIoError, "sqlite: " + msg);
    }
  }

  sqlite3* db_ = nullptr;
  mutable std::mutex mu_;
};

}  // namespace

std::unique_ptr<Store> OpenSqliteStore(const std::filesystem::path& db_file) {
  return std::make_unique<SqliteStore>(db_file);
}

}  // namespace sentinel::store
