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

#include <fcntl.h>
#include <sys/stat.h>
#include <unistd.h>

#include <array>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <mutex>
#include <shared_mutex>
#include <unordered_map>

#include <nlohmann/json.hpp>
#include <zlib.h>

#include "sentinel/error.hpp"
#include "sentinel/store/store.hpp"
#include "store/validate.hpp"

namespace sentinel::store {

using nlohmann::json;

namespace {

// Log file: 16-byte header (magic, version, reserved), then frames of
//   [u8 kind][u32 payload length][payload JSON][u32 crc32 of the preceding]
// all little-endian. The index snapshot stores the decoded index together
// with the log offset it covers; frames past that offset are replayed on open.
constexpr std::array<char, 8> kLogMagic = {'S', 'N', 'T', 'L', 'L', 'O', 'G', '\0'};
constexpr std::array<char, 8> kIndexMagic = {'S', 'N', 'T', 'L', 'I', 'D', 'X', '\0'};
constexpr std::uint32_t kFormatVersion = 1;
constexpr std::size_t kHeaderSize = 16;
constexpr std::size_t kFrameOverhead = 1 + 4 + 4;

enum class Kind : std::uint8_t { kImage = 1, kRecord = 2, kReport = 3, kScore = 4, kArtifact = 5 };

void PutU32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out += static_cast<char>((v >> (8 * i)) & 0xFF);
}

void PutU64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out += static_cast<char>((v >> (8 * i)) & 0xFF);
}

std::uint32_t GetU32(const char* p) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(p[i])) << (8 * i);
  return v;
}

std::uint64_t GetU64(const char* p) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(p[i])) << (8 * i);
  return v;
}

std::uint32_t Crc(std::string_view bytes) {
  return static_cast<std::uint32_t>(
      crc32(0L, reinterpret_cast<const Bytef*>(bytes.data()), static_cast<uInt>(bytes.size())));
}

std::string Header(const std::array<char, 8>& magic) {
  std::string h(magic.data(), magic.size());
  PutU32(h, kFormatVersion);
  PutU32(h, 0);
  return h;
}

[[noreturn]] void ThrowIo(const std::string& what) {
  throw Error(ErrorCode::kIoError, what + ": " + std::strerror(errno));
}

// Byte storage behind the log: a file, or a string when running in memory.
class LogSink {
 public:
  explicit LogSink(const std::filesystem::path& path, bool sync) : sync_(sync) {
    if (path.empty()) {
      buffer_ = Header(kLogMagic);
      return;
    }
    fd_ = ::open(path.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
    if (fd_ < 0) ThrowIo("cannot open " + path.string());
    struct stat st {};
    if (::fstat(fd_, &st) != 0) ThrowIo("cannot stat " + path.string());
    size_ = static_cast<std::uint64_t>(st.st_size);
    if (size_ == 0) {
      Write(Header(kLogMagic));
      SyncNow();
    } else {
      const std::string head = Read(0, std::min<std::uint64_t>(size_, kHeaderSize));
      if (head.size() < kHeaderSize || head.compare(0, 8, kLogMagic.data(), 8) != 0) {
        throw Error(ErrorCode::kStorageCorrupt, path.string() + " is not a record log");
      }
      if (GetU32(head.data() + 8) != kFormatVersion) {
        throw Error(ErrorCode::kStorageCorrupt,
                    "unsupported log version " + std::to_string(GetU32(head.data() + 8)));
      }
    }
  }

  ~LogSink() {
    if (fd_ >= 0) ::close(fd_);
  }

  LogSink(const LogSink&) = delete;
  LogSink& operator=(const LogSink&) = delete;

  std::uint64_t size() const { return fd_ >= 0 ? size_ : buffer_.size(); }

  // Returns the offset the bytes were written at.
  std::uint64_t Append(std::string_view bytes) {
    const std::uint64_t at = size();
    Write(bytes);
    if (sync_) SyncNow();
    return at;
  }

  std::string Read(std::uint64_t offset, std::uint64_t len) const {
    if (fd_ < 0) return buffer_.substr(offset, len);
    std::string out(len, '\0');
    std::uint64_t done = 0;
    while (done < len) {
      const ssize_t n = ::pread(fd_, out.data() + done, len - done,
                                static_cast<off_t>(offset + done));
      if (n < 0) {
        if (errno == EINTR) continue;
        ThrowIo("log read failed");
      }
      if (n == 0) break;
      done += static_cast<std::uint64_t>(n);
    }
    out.resize(done);
    return out;
  }

  void Truncate(std::uint64_t len) {
    if (fd_ < 0) {
      buffer_.resize(len);
      return;
    }
    if (::ftruncate(fd_, static_cast<off_t>(len)) != 0) ThrowIo("log truncate failed");
    size_ = len;
    SyncNow();
  }

  void SyncNow() {
    if (fd_ >= 0 && ::fdatasync(fd_) != 0) ThrowIo("log sync failed");
  }

  bool in_memory() const { return fd_ < 0; }

 private:
  void Write(std::string_view bytes) {
    if (fd_ < 0) {
      buffer_.append(bytes);
      return;
    }
    std::size_t done = 0;
    while (done < bytes.size()) {
      const ssize_t n = ::pwrite(fd_, bytes.data() + done, bytes.size() - done,
                                 static_cast<off_t>(size_ + done));
      if (n < 0) {
        if (errno == EINTR) continue;
        ThrowIo("log write failed");
      }
      done += static_cast<std::size_t>(n);
    }
    size_ += bytes.size();
  }

  int fd_ = -1;
  bool sync_;
  std::uint64_t size_ = 0;
  std::string buffer_;
};

struct Loc {
  std::uint64_t offset = 0;  // of the payload
  std::uint32_t length = 0;
};

void to_json(json& j, const Loc& l) { j = json::array({l.offset, l.length}); }
void from_json(const json& j, Loc& l) {
  l.offset = j.at(0).get<std::uint64_t>();
  l.length = j.at(1).get<std::uint32_t>();
}

struct RecordMeta {
  std::optional<std::string> region;
  std::int64_t acquired_ms = 0;
  std::int64_t created_ms = 0;
  std::uint64_t order = 0;
  double wildfire_pct = 0;
  double smoke_pct = 0;
};

void to_json(json& j, const RecordMeta& m) {
  j = json{{"region", m.region ? json(*m.region) : json(nullptr)},
           {"acq", m.acquired_ms},
           {"created", m.created_ms},
           {"order", m.order},
           {"wf", m.wildfire_pct},
           {"sm", m.smoke_pct}};
}

void from_json(const json& j, RecordMeta& m) {
  if (!j.at("region").is_null()) m.region = j.at("region").get<std::string>();
  m.acquired_ms = j.at("acq").get<std::int64_t>();
  m.created_ms = j.at("created").get<std::int64_t>();
  m.order = j.at("order").get<std::uint64_t>();
  m.wildfire_pct = j.at("wf").get<double>();
  m.smoke_pct = j.at("sm").get<double>();
}

struct Index {
  std::unordered_map<std::string, Loc> images;
  std::unordered_map<std::string, Loc> records;
  std::unordered_map<std::string, RecordMeta> record_meta;
  std::unordered_map<std::string, Loc> reports;
  std::unordered_map<std::string, std::vector<std::string>> record_reports;
  std::unordered_map<std::string, Loc> scores;
  std::unordered_map<std::string, std::vector<std::string>> report_scores;
  std::unordered_map<std::string, Loc> artifacts;
  std::uint64_t next_order = 0;
};

json IndexToJson(const Index& ix) {
  return json{{"images", ix.images},
              {"records", ix.records},
              {"record_meta", ix.record_meta},
              {"reports", ix.reports},
              {"record_reports", ix.record_reports},
              {"scores", ix.scores},
              {"report_scores", ix.report_scores},
              {"artifacts", ix.artifacts},
              {"next_order", ix.next_order}};
}

Index IndexFromJson(const json& j) {
  Index ix;
  j.at("images").get_to(ix.images);
  j.at("records").get_to(ix.records);
  j.at("record_meta").get_to(ix.record_meta);
  j.at("reports").get_to(ix.reports);
  j.at("record_reports").get_to(ix.record_reports);
  j.at("scores").get_to(ix.scores);
  j.at("report_scores").get_to(ix.report_scores);
  j.at("artifacts").get_to(ix.artifacts);
  ix.next_order = j.at("next_order").get<std::uint64_t>();
  return ix;
}

json ArtifactToJson(const Artifact& a) {
  return {{"artifact_id", a.artifact_id},
          {"kind", a.kind},
          {"body", a.body},
          {"created_at", ToEpochMillis(a.created_at)}};
}

Artifact ArtifactFromJson(const json& j) {
  return {j.at("artifact_id").get<std::string>(), j.at("kind").get<std::string>(),
          j.at("body").get<std::string>(),
          FromEpochMillis(j.at("created_at").get<std::int64_t>())};
}

class EmbeddedStore final : public Store {
 public:
  EmbeddedStore(const std::filesystem::path& dir, const EmbeddedOptions& options)
      : options_(options) {
    if (!dir.empty()) {
      std::error_code ec;
      std::filesystem::create_directories(dir, ec);
      if (ec) throw Error(ErrorCode::kIoError, "cannot create " + dir.string() + ": " + ec.message());
      index_path_ = dir / "index.snap";
    }
    log_ = std::make_unique<LogSink>(dir.empty() ? std::filesystem::path() : dir / "records.log",
                                     options.sync_writes);
    std::uint64_t start = kHeaderSize;
    if (auto snap = LoadSnapshot()) {
      index_ = std::move(snap->first);
      start = snap->second;
    }
    Replay(start);
  }

  ~EmbeddedStore() override {
    try {
      Flush();
    } catch (...) {
    }
  }

  void InsertImage(const imagery::ImageRecord& image) override {
    std::unique_lock lock(mu_);
    if (image.id.empty()) throw Error(ErrorCode::kInvalidArgument, "image needs an id");
    if (index_.images.contains(image.id)) {
      throw Error(ErrorCode::kDuplicateId, "image '" + image.id + "' already stored");
    }
    const Loc loc = AppendFrame(Kind::kImage, json(image).dump());
    index_.images.emplace(image.id, loc);
  }

  std::optional<imagery::ImageRecord> FindImage(const std::string& id) const override {
    std::shared_lock lock(mu_);
    auto it = index_.images.find(id);
    if (it == index_.images.end()) return std::nullopt;
    return Load(it->second).get<imagery::ImageRecord>();
  }

  std::string InsertRecord(const HistoryRecord& in) override {
    HistoryRecord rec = internal::PrepareRecord(in);
    std::unique_lock lock(mu_);
    if (index_.records.contains(rec.record_id)) {
      throw Error(ErrorCode::kDuplicateId, "record '" + rec.record_id + "' already stored");
    }
    if (!index_.images.contains(rec.image_id)) {
      throw Error(ErrorCode::kForeignKeyViolation, "unknown image '" + rec.image_id + "'");
    }
    const Loc loc = AppendFrame(Kind::kRecord, json(rec).dump());
    IndexRecord(rec, loc);
    return rec.record_id;
  }

  HistoryRecord GetRecord(const std::string& record_id) const override {
    std::shared_lock lock(mu_);
    auto it = index_.records.find(record_id);
    if (it == index_.records.end()) {
      throw Error(ErrorCode::kNotFound, "no record '" + record_id + "'");
    }
    auto rec = Load(it->second).get<HistoryRecord>();
    if (auto r = index_.record_reports.find(record_id);
        r != index_.record_reports.end() && !r->second.empty()) {
      rec.risk_report_id = r->second.front();
    }
    return rec;
  }

  std::string InsertRiskReport(const std::string& record_id, const risk::RiskReport& report,
                               std::optional<std::string> report_id) override {
    const std::string id = report_id.value_or(NewId("rpt"));
    std::unique_lock lock(mu_);
    if (index_.reports.contains(id)) {
      throw Error(ErrorCode::kDuplicateId, "report '" + id + "' already stored");
    }
    if (!index_.records.contains(record_id)) {
      throw Error(ErrorCode::kForeignKeyViolation, "unknown record '" + record_id + "'");
    }
    const json payload = {{"report_id", id}, {"record_id", record_id}, {"report", report}};
    const Loc loc = AppendFrame(Kind::kReport, payload.dump());
    index_.reports.emplace(id, loc);
    index_.record_reports[record_id].push_back(id);
    return id;
  }

  StoredReport GetRiskReport(const std::string& report_id) const override {
    std::shared_lock lock(mu_);
    return LoadReport(report_id);
  }

  std::vector<StoredReport> ReportsForRecord(const std::string& record_id) const override {
    std::shared_lock lock(mu_);
    std::vector<StoredReport> out;
    if (auto it = index_.record_reports.find(record_id); it != index_.record_reports.end()) {
      for (const auto& id : it->second) out.push_back(LoadReport(id));
    }
    return out;
  }

  std::string InsertJudgeScore(const judge::JudgeScore& score,
                               std::optional<std::string> score_id) override {
    const std::string id = score_id.value_or(NewId("scr"));
    std::unique_lock lock(mu_);
    if (index_.scores.contains(id)) {
      throw Error(ErrorCode::kDuplicateId, "score '" + id + "' already stored");
    }
    if (!index_.reports.contains(score.report_id)) {
      throw Error(ErrorCode::kForeignKeyViolation, "unknown report '" + score.report_id + "'");
    }
    const json payload = {{"score_id", id}, {"score", score}};
    const Loc loc = AppendFrame(Kind::kScore, payload.dump());
    index_.scores.emplace(id, loc);
    index_.report_scores[score.report_id].push_back(id);
    return id;
  }

  std::vector<StoredScore> ScoresForReport(const std::string& report_id) const override {
    std::shared_lock lock(mu_);
    std::vector<StoredScore> out;
    if (auto it = index_.report_scores.find(report_id); it != index_.report_scores.end()) {
      for (const auto& id : it->second) {
        const json j = Load(index_.scores.at(id));
        out.push_back({j.at("score_id").get<std::string>(), j.at("score").get<judge::JudgeScore>()});
      }
    }
    return out;
  }

  void PutArtifact(const Artifact& artifact) override {
    std::unique_lock lock(mu_);
    if (artifact.artifact_id.empty()) {
      throw Error(ErrorCode::kInvalidArgument, "artifact needs an id");
    }
    if (index_.artifacts.contains(artifact.artifact_id)) {
      throw Error(ErrorCode::kDuplicateId, "artifact '" + artifact.artifact_id + "' already stored");
    }
    const Loc loc = AppendFrame(Kind::kArtifact, ArtifactToJson(artifact).dump());
    index_.artifacts.emplace(artifact.artifact_id, loc);
  }

  Artifact GetArtifact(const std::string& artifact_id) const override {
    std::shared_lock lock(mu_);
    auto it = index_.artifacts.find(artifact_id);
    if (it == index_.artifacts.end()) {
      throw Error(ErrorCode::kNotFound, "no artifact '" + artifact_id + "'");
    }
    return ArtifactFromJson(Load(it->second));
  }

  std::vector<TimeSeriesPoint> CoverageTimeSeries(const std::string& region_tag, Timestamp from,
                                                  Timestamp to) const override {
    internal::CheckRange(from, to);
    const std::int64_t lo = ToEpochMillis(from), hi = ToEpochMillis(to);
    std::vector<internal::SeriesRow> rows;
    {
      std::shared_lock lock(mu_);
      for (const auto& [id, m] : index_.record_meta) {
        if (m.region != region_tag || m.acquired_ms < lo || m.acquired_ms >= hi) continue;
        rows.push_back({m.acquired_ms, m.created_ms, m.order, m.wildfire_pct, m.smoke_pct});
      }
    }
    return internal::CollapseSeries(std::move(rows));
  }

  std::size_t RecordCount() const override {
    std::shared_lock lock(mu_);
    return index_.records.size();
  }

  void Flush() override {
    std::unique_lock lock(mu_);
    WriteSnapshot();
  }

 private:
  Loc AppendFrame(Kind kind, const std::string& payload) {
    std::string frame;
    frame.reserve(payload.size() + kFrameOverhead);
    frame += static_cast<char>(kind);
    PutU32(frame, static_cast<std::uint32_t>(payload.size()));
    frame += payload;
    PutU32(frame, Crc(frame));
    const std::uint64_t at = log_->Append(frame);
    if (++appends_since_snapshot_ >= options_.snapshot_every) WriteSnapshot();
    return {at + 5, static_cast<std::uint32_t>(payload.size())};
  }

  json Load(const Loc& loc) const {
    return json::parse(log_->Read(loc.offset, loc.length));
  }

  StoredReport LoadReport(const std::string& report_id) const {
    auto it = index_.reports.find(report_id);
    if (it == index_.reports.end()) {
      throw Error(ErrorCode::kNotFound, "no report '" + report_id + "'");
    }
    const json j = Load(it->second);
    return {j.at("report_id").get<std::string>(), j.at("record_id").get<std::string>(),
            j.at("report").get<risk::RiskReport>()};
  }

  void IndexRecord(const HistoryRecord& rec, const Loc& loc) {
    index_.records.emplace(rec.record_id, loc);
    index_.record_meta.emplace(
        rec.record_id,
        RecordMeta{rec.region_tag, ToEpochMillis(rec.acquired_at), ToEpochMillis(rec.created_at),
                   index_.next_order++, rec.detection.coverage.wildfire_pct,
                   rec.detection.coverage.smoke_pct});
  }

  void Apply(Kind kind, const json& j, const Loc& loc) {
    switch (kind) {
      case Kind::kImage:
        index_.images.emplace(j.at("id").get<std::string>(), loc);
        break;
      case Kind::kRecord:
        IndexRecord(j.get<HistoryRecord>(), loc);
        break;
      case Kind::kReport: {
        const auto id = j.at("report_id").get<std::string>();
        index_.reports.emplace(id, loc);
        index_.record_reports[j.at("record_id").get<std::string>()].push_back(id);
        break;
      }
      case Kind::kScore: {
        const auto id = j.at("score_id").get<std::string>();
        index_.scores.emplace(id, loc);
        index_.report_scores[j.at("score").at("report_id").get<std::string>()].push_back(id);
        break;
      }
      case Kind::kArtifact:
        index_.artifacts.emplace(j.at("artifact_id").get<std::string>(), loc);
        break;
      default:
        throw Error(ErrorCode::kStorageCorrupt, "unknown frame kind");
    }
  }

  // Re-indexes frames from `start`. An incomplete or checksum-failing final
  // frame is a torn write and is cut off; damage before the tail is fatal.
  void Replay(std::uint64_t start) {
    const std::uint64_t end = log_->size();
    if (start > end) {
      index_ = Index{};
      start = kHeaderSize;
    }
    const std::string tail = log_->Read(start, end - start);
    std::size_t pos = 0;
    while (pos < tail.size()) {
      const std::uint64_t frame_at = start + pos;
      if (tail.size() - pos < kFrameOverhead) {
        log_->Truncate(frame_at);
        break;
      }
      const auto kind = static_cast<Kind>(static_cast<unsigned char>(tail[pos]));
      const std::uint32_t len = GetU32(tail.data() + pos + 1);
      const std::size_t frame_len = kFrameOverhead + len;
      if (tail.size() - pos < frame_len) {
        log_->Truncate(frame_at);
        break;
      }
      const std::string_view body(tail.data() + pos, 5 + len);
      if (Crc(body) != GetU32(tail.data() + pos + 5 + len)) {
        if (pos + frame_len == tail.size()) {
          log_->Truncate(frame_at);
          break;
        }
        throw Error(ErrorCode::kStorageCorrupt,
                    "checksum mismatch at log offset " + std::to_string(frame_at));
      }
      try {
        Apply(kind, json::parse(body.substr(5)), {frame_at + 5, len});
      } catch (const json::exception& e) {
        throw Error(ErrorCode::kStorageCorrupt,
                    "bad frame at log offset " + std::to_string(frame_at) + ": " + e.what());
      }
      pos += frame_len;
    }
  }

  std::optional<std::pair<Index, std::uint64_t>> LoadSnapshot() const {
    if (index_path_.empty()) return std::nullopt;
    std::ifstream in(index_path_, std::ios::binary);
    if (!in) return std::nullopt;
    const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    // header, covered offset, crc, body
    if (bytes.size() < kHeaderSize + 12 || bytes.compare(0, 8, kIndexMagic.data(), 8) != 0 ||
        GetU32(bytes.data() + 8) != kFormatVersion) {
      return std::nullopt;
    }
    const std::uint64_t covered = GetU64(bytes.data() + kHeaderSize);
    const std::uint32_t crc = GetU32(bytes.data() + kHeaderSize + 8);
    const std::string_view body(bytes.data() + kHeaderSize + 12, bytes.size() - kHeaderSize - 12);
    if (Crc(body) != crc || covered > log_->size()) return std::nullopt;
    try {
      return std::make_pair(IndexFromJson(json::parse(body)), covered);
    } catch (const json::exception&) {
      return std::nullopt;
    }
  }

  void WriteSnapshot() {
    appends_since_snapshot_ = 0;
    if (index_path_.empty()) return;
    const std::string body = IndexToJson(index_).dump();
    std::string bytes = Header(kIndexMagic);
    PutU64(bytes, log_->size());
    PutU32(bytes, Crc(body));
    bytes += body;
    const auto tmp = index_path_.string() + ".tmp";
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
      if (!out) throw Error(ErrorCode::kIoError, "cannot write " + tmp);
    }
    std::error_code ec;
    std::filesystem::rename(tmp, index_path_, ec);
    if (ec) throw Error(ErrorCode::kIoError, "cannot replace index snapshot: " + ec.message());
  }

  EmbeddedOptions options_;
  std::filesystem::path index_path_;
  std::unique_ptr<LogSink> log_;
  mutable std::shared_mutex mu_;
  Index index_;
  std::size_t appends_since_snapshot_ = 0;
};

}  // namespace

std::unique_ptr<Store> OpenEmbeddedStore(const std::filesystem::path& dir,
                                         const EmbeddedOptions& options) {
  return std::make_unique<EmbeddedStore>(dir, options);
}

}  // namespace sentinel::store
