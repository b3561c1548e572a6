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

#include "sentinel/imagery/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "sentinel/error.hpp"

namespace sentinel::imagery {

using nlohmann::json;

std::string_view SourceName(ImageSource source) {
  switch (source) {
    case ImageSource::kLandsat8: return "landsat8";
    case ImageSource::kGoes16: return "goes16";
    case ImageSource::kOther: return "other";
  }
  return "other";
}

std::optional<ImageSource> SourceFromName(std::string_view name) {
  if (name == "landsat8") return ImageSource::kLandsat8;
  if (name == "goes16") return ImageSource::kGoes16;
  if (name == "other") return ImageSource::kOther;
  return std::nullopt;
}

std::string_view SplitName(Split split) {
  switch (split) {
    case Split::kTrain: return "train";
    case Split::kVal: return "val";
    case Split::kTest: return "test";
  }
  return "test";
}

std::optional<Split> SplitFromName(std::string_view name) {
  if (name == "train") return Split::kTrain;
  if (name == "val") return Split::kVal;
  if (name == "test") return Split::kTest;
  return std::nullopt;
}

Annotation Annotation::Make(ClassLabel label, NormalizedBox box) {
  const bool finite = std::isfinite(box.cx) && std::isfinite(box.cy) &&
                      std::isfinite(box.w) && std::isfinite(box.h);
  if (!finite || box.cx < 0 || box.cx > 1 || box.cy < 0 || box.cy > 1 ||
      box.w <= 0 || box.w > 1 || box.h <= 0 || box.h > 1) {
    std::ostringstream msg;
    msg << "annotation box out of range (" << box.cx << ", " << box.cy << ", "
        << box.w << ", " << box.h << ")";
    throw Error(ErrorCode::kInvalidArgument, msg.str());
  }
  const double x0 = std::max(0.0, box.cx - box.w / 2);
  const double x1 = std::min(1.0, box.cx + box.w / 2);
  const double y0 = std::max(0.0, box.cy - box.h / 2);
  const double y1 = std::min(1.0, box.cy + box.h / 2);
  if (x1 <= x0 || y1 <= y0) {
    throw Error(ErrorCode::kInvalidArgument, "annotation box empty after clipping");
  }
  // Only rewrite when clipping changed something so exact inputs survive.
  if (x0 != box.cx - box.w / 2 || x1 != box.cx + box.w / 2 ||
      y0 != box.cy - box.h / 2 || y1 != box.cy + box.h / 2) {
    box = {(x0 + x1) / 2, (y0 + y1) / 2, x1 - x0, y1 - y0};
  }
  return Annotation{label, box};
}

const ManifestEntry* DatasetManifest::Find(std::string_view id) const {
  for (const auto& e : entries) {
    if (e.image.id == id) return &e;
  }
  return nullptr;
}

std::vector<const ManifestEntry*> DatasetManifest::InSplit(Split split) const {
  std::vector<const ManifestEntry*> out;
  for (const auto& e : entries) {
    auto it = split_of.find(e.image.id);
    if (it != split_of.end() && it->second == split) out.push_back(&e);
  }
  return out;
}

SplitCounts DatasetManifest::Counts() const {
  SplitCounts c;
  for (const auto& [id, split] : split_of) {
    switch (split) {
      case Split::kTrain: ++c.train; break;
      case Split::kVal: ++c.val; break;
      case Split::kTest: ++c.test; break;
    }
  }
  return c;
}

SplitCounts ComputeSplitCounts(std::size_t n) {
  SplitCounts c;
  c.train = n * 70 / 100;
  c.val = n * 15 / 100;
  c.test = n - c.train - c.val;
  return c;
}

namespace {

// Unbiased draw from [0, bound) by rejection; std::uniform_int_distribution
// is not specified bit-for-bit across standard libraries.
std::uint64_t BoundedDraw(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t v;
  do {
    v = rng();
  } while (v >= limit);
  return v % bound;
}

}  // namespace

DatasetManifest AssignSplits(DatasetManifest manifest, std::uint64_t seed) {
  if (manifest.entries.empty()) {
    throw Error(ErrorCode::kEmptyManifest, "cannot split an empty manifest");
  }
  std::vector<std::string> ids;
  ids.reserve(manifest.entries.size());
  for (const auto& e : manifest.entries) ids.push_back(e.image.id);
  std::sort(ids.begin(), ids.end());
  if (auto dup = std::adjacent_find(ids.begin(), ids.end()); dup != ids.end()) {
    throw Error(ErrorCode::kDuplicateId, "duplicate image id '" + *dup + "'");
  }

  std::mt19937_64 rng(seed);
  for (std::size_t i = ids.size() - 1; i > 0; --i) {
    std::swap(ids[i], ids[BoundedDraw(rng, i + 1)]);
  }

  const SplitCounts counts = ComputeSplitCounts(ids.size());
  manifest.split_of.clear();
  for (std::size_t i = 0; i < ids.size(); ++i) {
    Split s = Split::kTest;
    if (i < counts.train) {
      s = Split::kTrain;
    } else if (i < counts.train + counts.val) {
      s = Split::kVal;
    }
    manifest.split_of.emplace(ids[i], s);
  }
  manifest.split_seed = seed;
  manifest.ratios = SplitRatios{};
  return manifest;
}

std::vector<Annotation> ParseAnnotations(std::string_view text) {
  std::vector<Annotation> out;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::istringstream fields(line);
    int class_id = -1;
    NormalizedBox box;
    std::string extra;
    if (!(fields >> class_id >> box.cx >> box.cy >> box.w >> box.h) ||
        (fields >> extra)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "annotation line " + std::to_string(line_no) + " is malformed");
    }
    auto label = ClassFromId(class_id);
    if (!label) {
      throw Error(ErrorCode::kInvalidArgument,
                  "unknown class id " + std::to_string(class_id) + " on line " +
                      std::to_string(line_no));
    }
    out.push_back(Annotation::Make(*label, box));
  }
  return out;
}

std::string FormatAnnotations(const std::vector<Annotation>& annotations) {
  std::string out;
  char buf[128];
  for (const auto& a : annotations) {
    std::snprintf(buf, sizeof(buf), "%d %.6f %.6f %.6f %.6f\n",
                  ClassId(a.class_label), a.bbox.cx, a.bbox.cy, a.bbox.w,
                  a.bbox.h);
    out += buf;
  }
  return out;
}

std::vector<Annotation> ReadAnnotationFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::kUnreadableFile, "cannot open " + path.string());
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ParseAnnotations(ss.str());
}

void WriteAnnotationFile(const std::filesystem::path& path,
                         const std::vector<Annotation>& annotations) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  out << FormatAnnotations(annotations);
}

void to_json(json& j, const ImageRecord& r) {
  j = json{{"id", r.id},
           {"source", SourceName(r.source)},
           {"acquired_at", FormatIso8601(r.acquired_at)},
           {"width", r.width_px},
           {"height", r.height_px},
           {"pixel_ref", r.pixel_ref},
           {"region_tag", r.region_tag ? json(*r.region_tag) : json(nullptr)}};
}

void from_json(const json& j, ImageRecord& r) {
  r.id = j.at("id").get<std::string>();
  auto source = SourceFromName(j.value("source", std::string("other")));
  if (!source) throw Error(ErrorCode::kManifestInvalid, "unknown image source");
  r.source = *source;
  r.acquired_at = ParseTimestamp(j.at("acquired_at").get<std::string>());
  r.width_px = j.at("width").get<int>();
  r.height_px = j.at("height").get<int>();
  r.pixel_ref = j.value("pixel_ref", std::string());
  if (auto it = j.find("region_tag"); it != j.end() && !it->is_null()) {
    r.region_tag = it->get<std::string>();
  } else {
    r.region_tag.reset();
  }
  if (r.id.empty()) throw Error(ErrorCode::kManifestInvalid, "empty image id");
  if (r.width_px <= 0 || r.height_px <= 0) {
    throw Error(ErrorCode::kZeroDimension, "image '" + r.id + "' has zero size");
  }
}

void to_json(json& j, const Annotation& a) {
  j = json{{"class_id", ClassId(a.class_label)},
           {"class", ClassName(a.class_label)},
           {"bbox", {a.bbox.cx, a.bbox.cy, a.bbox.w, a.bbox.h}}};
}

void from_json(const json& j, Annotation& a) {
  std::optional<ClassLabel> label;
  if (j.contains("class")) {
    label = ClassFromName(j.at("class").get<std::string>());
  } else if (j.contains("class_id")) {
    label = ClassFromId(j.at("class_id").get<int>());
  }
  if (!label) throw Error(ErrorCode::kManifestInvalid, "annotation without a known class");
  const auto& b = j.at("bbox");
  if (!b.is_array() || b.size() != 4) {
    throw Error(ErrorCode::kManifestInvalid, "bbox must be [cx, cy, w, h]");
  }
  a = Annotation::Make(*label, {b[0].get<double>(), b[1].get<double>(),
                                b[2].get<double>(), b[3].get<double>()});
}

void to_json(json& j, const DatasetManifest& m) {
  json images = json::array();
  for (const auto& e : m.entries) {
    json img = e.image;
    img["annotations"] = e.annotations;
    images.push_back(std::move(img));
  }
  json splits = json::object();
  for (const auto& [id, s] : m.split_of) splits[id] = SplitName(s);
  j = json{{"images", std::move(images)},
           {"split_seed", m.split_seed},
           {"ratios", {m.ratios.train, m.ratios.val, m.ratios.test}},
           {"splits", std::move(splits)}};
}

void from_json(const json& j, DatasetManifest& m) {
  m = DatasetManifest{};
  std::set<std::string> seen;
  for (const auto& img : j.at("images")) {
    ManifestEntry e;
    e.image = img.get<ImageRecord>();
    if (auto it = img.find("annotations"); it != img.end()) {
      e.annotations = it->get<std::vector<Annotation>>();
    }
    if (!seen.insert(e.image.id).second) {
      throw Error(ErrorCode::kManifestInvalid, "duplicate image id '" + e.image.id + "'");
    }
    m.entries.push_back(std::move(e));
  }
  m.split_seed = j.value("split_seed", std::uint64_t{0});
  if (auto it = j.find("ratios"); it != j.end() && it->is_array() && it->size() == 3) {
    m.ratios = {(*it)[0].get<double>(), (*it)[1].get<double>(), (*it)[2].get<double>()};
  }
  if (auto it = j.find("splits"); it != j.end()) {
    for (const auto& [id, name] : it->items()) {
      auto s = SplitFromName(name.get<std::string>());
      if (!s) throw Error(ErrorCode::kManifestInvalid, "unknown split for '" + id + "'");
      if (!seen.contains(id)) {
        throw Error(ErrorCode::kManifestInvalid, "split references unknown image '" + id + "'");
      }
      m.split_of.emplace(id, *s);
    }
  }
}

DatasetManifest LoadManifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kUnreadableFile, "cannot open " + path.string());
  try {
    return json::parse(in).get<DatasetManifest>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kManifestInvalid, path.string() + ": " + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kManifestInvalid) throw;
    throw Error(ErrorCode::kManifestInvalid, path.string() + ": " + e.what());
  }
}

void SaveManifest(const DatasetManifest& manifest,
                  const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  out << json(manifest).dump(2) << '\n';
}

}  // namespace sentinel::imagery
