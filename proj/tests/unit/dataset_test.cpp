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

#include <set>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "sentinel/error.hpp"
#include "sentinel/imagery/dataset.hpp"
#include "sentinel/imagery/ingest.hpp"
#include "sentinel/imagery/raster.hpp"
#include "support/checks.hpp"
#include "support/support.hpp"

namespace sentinel::imagery {
namespace {

namespace fs = std::filesystem;

DatasetManifest Synthetic(int n) {
  DatasetManifest m;
  for (int i = 0; i < n; ++i) {
    ManifestEntry e;
    e.image.id = "im" + std::to_string(i);
    e.image.width_px = e.image.height_px = 8;
    m.entries.push_back(e);
  }
  return m;
}

TEST(SplitCounts, FloorRule) {
  EXPECT_EQ(ComputeSplitCounts(3771), (SplitCounts{2639, 565, 567}));
  EXPECT_EQ(ComputeSplitCounts(1), (SplitCounts{0, 0, 1}));
  EXPECT_EQ(ComputeSplitCounts(10), (SplitCounts{7, 1, 2}));
  EXPECT_EQ(ComputeSplitCounts(100), (SplitCounts{70, 15, 15}));
}

TEST(AssignSplits, DeterministicPerSeed) {
  const auto r = testing::CheckSplitDeterminism();
  EXPECT_TRUE(r.pass) << r.detail;
}

TEST(AssignSplits, IndependentOfEntryOrder) {
  auto m = Synthetic(50);
  auto reversed = m;
  std::reverse(reversed.entries.begin(), reversed.entries.end());
  EXPECT_EQ(AssignSplits(m, 9).split_of, AssignSplits(reversed, 9).split_of);
}

TEST(AssignSplits, EmptyAndDuplicateRejected) {
  try {
    AssignSplits({}, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyManifest);
  }
  auto m = Synthetic(3);
  m.entries[2].image.id = m.entries[0].image.id;
  try {
    AssignSplits(m, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDuplicateId);
  }
}

TEST(Annotation, ValidatesAndClips) {
  const auto a = Annotation::Make(ClassLabel::kSmoke, {0.95, 0.5, 0.2, 0.2});
  EXPECT_NEAR(a.bbox.cx, 0.925, 1e-12);
  EXPECT_NEAR(a.bbox.w, 0.15, 1e-12);
  EXPECT_THROW(Annotation::Make(ClassLabel::kSmoke, {1.2, 0.5, 0.1, 0.1}), Error);
  EXPECT_THROW(Annotation::Make(ClassLabel::kSmoke, {0.5, 0.5, 0, 0.1}), Error);
  const NormalizedBox exact{0.25, 0.75, 0.5, 0.5};
  EXPECT_EQ(Annotation::Make(ClassLabel::kWildfire, exact).bbox, exact);
}

TEST(Annotation, ParseAndFormat) {
  const auto anns = ParseAnnotations("0 0.5 0.5 0.25 0.25\r\n\n1 0.1 0.2 0.1 0.2\n");
  ASSERT_EQ(anns.size(), 2u);
  EXPECT_EQ(anns[1].class_label, ClassLabel::kSmoke);
  EXPECT_EQ(FormatAnnotations(anns),
            "0 0.500000 0.500000 0.250000 0.250000\n1 0.100000 0.200000 0.100000 0.200000\n");
  EXPECT_THROW(ParseAnnotations("2 0.5 0.5 0.1 0.1"), Error);
  EXPECT_THROW(ParseAnnotations("0 0.5 0.5 0.1"), Error);
  EXPECT_THROW(ParseAnnotations("0 0.5 0.5 0.1 0.1 9"), Error);
}

TEST(Manifest, JsonRoundTrip) {
  auto m = AssignSplits(Synthetic(20), 4);
  m.entries[0].annotations = {Annotation::Make(ClassLabel::kWildfire, {0.5, 0.5, 0.5, 0.5})};
  m.entries[0].image.region_tag = "ridge";
  m.entries[0].image.acquired_at = ParseIso8601("2024-05-01T10:00:00Z");
  testing::TempDir dir;
  SaveManifest(m, dir / "m.json");
  EXPECT_EQ(LoadManifest(dir / "m.json"), m);
  EXPECT_EQ(m.InSplit(Split::kTrain).size() + m.InSplit(Split::kVal).size() +
                m.InSplit(Split::kTest).size(),
            20u);
}

TEST(Manifest, SchemaErrors) {
  testing::TempDir dir;
  testing::WriteText(dir / "bad.json", R"({"entries": [{"image": {"id": ""}}]})");
  try {
    LoadManifest(dir / "bad.json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kManifestInvalid);
  }
  testing::WriteText(dir / "junk.json", "{not json");
  EXPECT_THROW(LoadManifest(dir / "junk.json"), Error);
  try {
    LoadManifest(dir / "absent.json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnreadableFile);
  }
}

TEST(Ingest, ReadsLabelsSidecarsAndSkipsJunk) {
  testing::TempDir dir;
  WriteFileBytes(dir / "a.png", testing::SyntheticPng(40, 30, 1));
  WriteFileBytes(dir / "b.png", testing::SyntheticPng(50, 20, 2));
  testing::WriteText(dir / "junk.jpg", "not an image");
  testing::WriteText(dir / "a.txt", "0 0.5 0.5 0.5 0.5\n");
  fs::create_directories(dir / "labels");
  testing::WriteText(dir / "labels" / "b.txt", "1 0.5 0.5 0.2 0.2\n");
  testing::WriteText(dir / "b.meta.json",
                     R"({"source": "goes16", "acquired_at": "2025-01-02T03:04:05Z",
                         "region_tag": "coast"})");

  IngestOptions opts;
  opts.standardized_dir = dir / "std";
  const auto out = IngestDirectory(dir.path(), opts);
  ASSERT_EQ(out.manifest.entries.size(), 2u);
  ASSERT_EQ(out.skipped.size(), 1u);
  EXPECT_EQ(out.skipped[0].path.filename(), "junk.jpg");

  const auto* b = out.manifest.Find("b");
  ASSERT_NE(b, nullptr);
  EXPECT_EQ(b->image.source, ImageSource::kGoes16);
  EXPECT_EQ(b->image.region_tag, "coast");
  EXPECT_EQ(FormatIso8601(b->image.acquired_at), "2025-01-02T03:04:05Z");
  EXPECT_EQ(b->annotations.size(), 1u);
  EXPECT_EQ(b->image.width_px, 416);
  const auto pixels = DecodeImage(ReadFileBytes(b->image.pixel_ref));
  EXPECT_EQ(pixels.width, 416);
  EXPECT_EQ(pixels.height, 416);
  EXPECT_EQ(out.manifest.split_of.size(), 2u);
}

TEST(Ingest, EmptyDirectoryFails) {
  testing::TempDir dir;
  try {
    IngestDirectory(dir.path());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyManifest);
  }
}

}  // namespace
}  // namespace sentinel::imagery
