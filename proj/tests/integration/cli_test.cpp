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

#include <array>
#include <cstdio>
#include <string>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "support/support.hpp"

#ifdef SENTINEL_CLI_PATH

namespace sentinel {
namespace {

using nlohmann::json;

struct Run {
  int status = -1;
  std::string output;
};

Run Cli(const std::string& args) {
  const std::string cmd = std::string(SENTINEL_CLI_PATH) + " " + args + " 2>&1";
  Run r;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.output.append(buf.data(), n);
  const int raw = ::pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

TEST(Cli, HelpListsCommands) {
  const auto r = Cli("--help");
  EXPECT_EQ(r.status, 0);
  for (const char* cmd : {"ingest", "detect", "evaluate", "assess", "judge", "serve"}) {
    EXPECT_NE(r.output.find(cmd), std::string::npos) << cmd;
  }
}

TEST(Cli, UnknownFlagFails) { EXPECT_NE(Cli("evaluate --bogus").status, 0); }

TEST(Cli, IngestDetectEvaluate) {
  testing::TempDir dir;
  const auto images = dir / "images";
  json script = {{"model_id", "cli-mock"}, {"images", json::object()}};
  for (int i = 0; i < 10; ++i) {
    const std::string id = "scene" + std::to_string(i);
    const auto png = testing::SyntheticPng(416, 416, 300 + i);
    testing::WriteText(images / (id + ".png"), std::string(png.begin(), png.end()));
    testing::WriteText(images / "labels" / (id + ".txt"), "0 0.25 0.25 0.5 0.5\n");
    script["images"][id] =
        json::array({{{"box", {0, 0, 208, 208}}, {"class", "wildfire"}, {"confidence", 0.9}}});
  }
  testing::WriteText(images / "notes.txt", "not an image");
  testing::WriteText(dir / "mock.json", script.dump());

  const auto manifest = (dir / "manifest.json").string();
  auto r = Cli("ingest " + images.string() + " --out " + manifest + " --seed 5");
  ASSERT_EQ(r.status, 0) << r.output;
  EXPECT_NE(r.output.find("10 images (train 7, val 1, test 2)"), std::string::npos) << r.output;

  const auto results = (dir / "results.json").string();
  r = Cli("detect --manifest " + manifest + " --backend mock:" + (dir / "mock.json").string() +
          " --out " + results);
  ASSERT_EQ(r.status, 0) << r.output;
  EXPECT_NE(r.output.find("10 images, 10 detections"), std::string::npos) << r.output;

  const auto report = (dir / "metrics.json").string();
  r = Cli("evaluate --manifest " + manifest + " --results " + results + " --json " + report);
  ASSERT_EQ(r.status, 0) << r.output;
  EXPECT_NE(r.output.find("cli-mock"), std::string::npos) << r.output;
  const auto j = json::parse(testing::ReadText(report));
  EXPECT_EQ(j.at("counts").at("images"), 2);
  EXPECT_DOUBLE_EQ(j.at("f1_pct").get<double>(), 100.0);
}

TEST(Cli, ErrorsExitNonZero) {
  testing::TempDir dir;
  testing::WriteText(dir / "bad.json", "{");
  const auto r = Cli("evaluate --manifest " + (dir / "bad.json").string() + " --results x.json");
  EXPECT_EQ(r.status, 1);
  EXPECT_NE(r.output.find("error: ManifestInvalid"), std::string::npos) << r.output;
}

}  // namespace
}  // namespace sentinel

#endif  // SENTINEL_CLI_PATH
