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

#include <vector>

#include <gtest/gtest.h>
#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include "oracles/oracles.hpp"
#include "sentinel/error.hpp"
#include "sentinel/imagery/raster.hpp"
#include "support/support.hpp"

namespace sentinel::imagery {
namespace {

std::vector<std::uint8_t> CvEncode(const cv::Mat& mat, const char* ext) {
  std::vector<std::uint8_t> out;
  EXPECT_TRUE(cv::imencode(ext, mat, out));
  return out;
}

ErrorCode DecodeError(const std::vector<std::uint8_t>& bytes) {
  try {
    DecodeImage(bytes);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kInvalidArgument;
}

TEST(Sniff, MagicBytesOnly) {
  EXPECT_EQ(SniffFormat(std::vector<std::uint8_t>{0x89, 'P', 'N', 'G', 0x0D, 0x0A, 0x1A, 0x0A}),
            RasterFormat::kPng);
  EXPECT_EQ(SniffFormat(std::vector<std::uint8_t>{0xFF, 0xD8, 0xFF, 0xE0}), RasterFormat::kJpeg);
  EXPECT_EQ(SniffFormat(std::vector<std::uint8_t>{'I', 'I', 0x2A, 0}), RasterFormat::kTiff);
  EXPECT_EQ(SniffFormat(std::vector<std::uint8_t>{'M', 'M', 0, 0x2A}), RasterFormat::kTiff);
  EXPECT_FALSE(SniffFormat(std::vector<std::uint8_t>{'G', 'I', 'F', '8'}));
  EXPECT_FALSE(SniffFormat({}));
}

TEST(Png, LosslessRoundTripWithHeaderOracle) {
  for (int channels : {1, 3}) {
    const Image img = testing::SyntheticImage(37, 23, 3, channels);
    const auto bytes = EncodePng(img);
    const auto header = oracle::ReadImageHeader(bytes);
    ASSERT_TRUE(header);
    EXPECT_EQ(header->format, "png");
    EXPECT_EQ(header->width, 37);
    EXPECT_EQ(header->height, 23);
    EXPECT_EQ(header->channels, channels);
    EXPECT_EQ(DecodeImage(bytes), img);
  }
}

TEST(Png, ChannelOrderIsRgb) {
  Image img(2, 1, 3);
  img.at(0, 0, 0) = 255;  // red
  img.at(1, 0, 2) = 255;  // blue
  const auto bytes = EncodePng(img);
  // OpenCV stores BGR; read back through OpenCV directly.
  const cv::Mat m = cv::imdecode(bytes, cv::IMREAD_COLOR);
  EXPECT_EQ(m.at<cv::Vec3b>(0, 0)[2], 255);
  EXPECT_EQ(m.at<cv::Vec3b>(0, 1)[0], 255);
  EXPECT_EQ(DecodeImage(bytes), img);
}

TEST(Jpeg, DecodesWithHeaderOracle) {
  const Image img = testing::SyntheticImage(64, 48, 4);
  const auto bytes = EncodeJpeg(img, 95);
  const auto header = oracle::ReadImageHeader(bytes);
  ASSERT_TRUE(header);
  EXPECT_EQ(header->format, "jpeg");
  EXPECT_EQ(header->width, 64);
  EXPECT_EQ(header->height, 48);
  EXPECT_EQ(header->channels, 3);
  const Image back = DecodeImage(bytes);
  EXPECT_EQ(back.width, 64);
  EXPECT_EQ(back.height, 48);
  EXPECT_EQ(back.channels, 3);
}

TEST(Decode, SixteenBitScaledAndAlphaDropped) {
  cv::Mat deep(2, 2, CV_16UC1, cv::Scalar(257 * 100));
  deep.at<std::uint16_t>(0, 0) = 65535;
  const Image gray = DecodeImage(CvEncode(deep, ".png"));
  EXPECT_EQ(gray.channels, 1);
  EXPECT_EQ(gray.at(0, 0, 0), 255);
  EXPECT_EQ(gray.at(1, 1, 0), 100);

  cv::Mat rgba(1, 1, CV_8UC4, cv::Scalar(10, 20, 30, 0));
  const Image rgb = DecodeImage(CvEncode(rgba, ".png"));
  EXPECT_EQ(rgb.channels, 3);
  EXPECT_EQ(rgb.at(0, 0, 0), 30);
  EXPECT_EQ(rgb.at(0, 0, 2), 10);
}

TEST(Decode, Tiff) {
  cv::Mat m(5, 7, CV_8UC3, cv::Scalar(1, 2, 3));
  const auto bytes = CvEncode(m, ".tiff");
  EXPECT_EQ(SniffFormat(bytes), RasterFormat::kTiff);
  const Image img = DecodeImage(bytes);
  EXPECT_EQ(img.width, 7);
  EXPECT_EQ(img.at(0, 0, 0), 3);
}

TEST(Decode, Errors) {
  EXPECT_EQ(DecodeError({}), ErrorCode::kUnreadableFile);
  EXPECT_EQ(DecodeError({'h', 'e', 'l', 'l', 'o'}), ErrorCode::kUnsupportedFormat);
  auto truncated = EncodePng(testing::SyntheticImage(8, 8, 1));
  truncated.resize(20);
  EXPECT_EQ(DecodeError(truncated), ErrorCode::kUnsupportedFormat);
}

TEST(LoadImage, RecordFromFile) {
  testing::TempDir dir;
  WriteFileBytes(dir / "scene_01.png", EncodePng(testing::SyntheticImage(9, 4, 2)));
  const auto loaded = LoadImage(dir / "scene_01.png");
  EXPECT_EQ(loaded.record.id, "scene_01");
  EXPECT_EQ(loaded.record.width_px, 9);
  EXPECT_EQ(loaded.record.height_px, 4);
  EXPECT_GT(ToEpochMillis(loaded.record.acquired_at), 0);
  EXPECT_THROW(LoadImage(dir / "missing.png"), Error);
}

}  // namespace
}  // namespace sentinel::imagery
