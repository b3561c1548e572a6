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

#include "sentinel/imagery/ingest.hpp"

#include <algorithm>
#include <fstream>

#include <nlohmann/json.hpp>

#include "sentinel/error.hpp"
#include "sentinel/imagery/raster.hpp"
#include "sentinel/imagery/transform.hpp"

namespace sentinel::imagery {

namespace fs = std::filesystem;

namespace {

bool IsRasterExtension(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext == ".png" || ext == ".jpg" || ext == ".jpeg" || ext == ".tif" ||
         ext == ".tiff";
}

void ApplySidecar(const fs::path& sidecar, ImageRecord& record) {
  std::ifstream in(sidecar);
  if (!in) return;
  const auto meta = nlohmann::json::parse(in);
  if (auto it = meta.find("source"); it != meta.end()) {
    auto s = SourceFromName(it->get<std::string>());
    if (!s) throw Error(ErrorCode::kManifestInvalid, sidecar.string() + ": unknown source");
    record.source = *s;
  }
  if (auto it = meta.find("acquired_at"); it != meta.end()) {
    record.acquired_at = ParseTimestamp(it->get<std::string>());
  }
  if (auto it = meta.find("region_tag"); it != meta.end() && !it->is_null()) {
    record.region_tag = it->get<std::string>();
  }
  if (auto it = meta.find("id"); it != meta.end()) record.id = it->get<std::string>();
}

}  // namespace

IngestOutcome IngestDirectory(const fs::path& dir, const IngestOptions& options) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) {
    throw Error(ErrorCode::kUnreadableFile, dir.string() + " is not a directory");
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && IsRasterExtension(entry.path())) {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());

  if (options.standardized_dir) fs::create_directories(*options.standardized_dir);

  IngestOutcome outcome;
  for (const auto& path : files) {
    LoadedImage loaded;
    try {
      loaded = LoadImage(path);
    } catch (const Error& e) {
      outcome.skipped.push_back({path, e.what()});
      continue;
    }
    ManifestEntry entry;
    entry.image = loaded.record;
    entry.image.source = options.default_source;
    entry.image.pixel_ref = fs::absolute(path).string();

    const fs::path stem = path.stem();
    ApplySidecar(path.parent_path() / (stem.string() + ".meta.json"), entry.image);
    for (const auto& label_path : {path.parent_path() / (stem.string() + ".txt"),
                                   dir / "labels" / (stem.string() + ".txt")}) {
      if (fs::exists(label_path)) {
        entry.annotations = ReadAnnotationFile(label_path);
        break;
      }
    }

    if (options.standardized_dir) {
      const Image standard = ResizeBilinear(loaded.pixels);
      const fs::path out = *options.standardized_dir / (entry.image.id + ".png");
      WriteFileBytes(out, EncodePng(standard));
      entry.image.pixel_ref = fs::absolute(out).string();
      entry.image.width_px = standard.width;
      entry.image.height_px = standard.height;
    }

    if (outcome.manifest.Find(entry.image.id) != nullptr) {
      outcome.skipped.push_back({path, "duplicate image id '" + entry.image.id + "'"});
      continue;
    }
    outcome.manifest.entries.push_back(std::move(entry));
  }

  if (outcome.manifest.entries.empty()) {
    throw Error(ErrorCode::kEmptyManifest, "no decodable rasters in " + dir.string());
  }
  outcome.manifest = AssignSplits(std::move(outcome.manifest), options.split_seed);
  return outcome;
}

}  // namespace sentinel::imagery
