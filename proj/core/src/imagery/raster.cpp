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

#include "sentinel/imagery/raster.hpp"

#include <chrono>
#include <cstring>
#include <fstream>

#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "sentinel/error.hpp"

namespace sentinel::imagery {

namespace {

bool StartsWith(std::span<const std::uint8_t> bytes,
                std::initializer_list<std::uint8_t> magic) {
  if (bytes.size() < magic.size()) return false;
  return std::equal(magic.begin(), magic.end(), bytes.begin());
}

cv::Mat ToMat(const Image& image) {
  const int type = image.channels == 1 ? CV_8UC1 : CV_8UC3;
  cv::Mat rgb(image.height, image.width, type,
              const_cast<std::uint8_t*>(image.pixels.data()));
  if (image.channels == 1) return rgb.clone();
  cv::Mat bgr;
  cv::cvtColor(rgb, bgr, cv::COLOR_RGB2BGR);
  return bgr;
}

std::vector<std::uint8_t> Encode(const Image& image, const std::string& ext,
                                 const std::vector<int>& params) {
  if (image.empty()) throw Error(ErrorCode::kZeroDimension, "cannot encode an empty image");
  if (image.channels != 1 && image.channels != 3) {
    throw Error(ErrorCode::kInvalidArgument, "only 1 or 3 channel images can be encoded");
  }
  std::vector<std::uint8_t> out;
  if (!cv::imencode(ext, ToMat(image), out, params)) {
    throw Error(ErrorCode::kIoError, "encoding " + ext + " failed");
  }
  return out;
}

}  // namespace

std::string_view FormatExtension(RasterFormat format) {
  switch (format) {
    case RasterFormat::kPng: return ".png";
    case RasterFormat::kJpeg: return ".jpg";
    case RasterFormat::kTiff: return ".tif";
  }
  return ".bin";
}

std::optional<RasterFormat> SniffFormat(std::span<const std::uint8_t> bytes) {
  if (StartsWith(bytes, {0x89, 'P', 'N', 'G', 0x0D, 0x0A, 0x1A, 0x0A})) {
    return RasterFormat::kPng;
  }
  if (StartsWith(bytes, {0xFF, 0xD8, 0xFF})) return RasterFormat::kJpeg;
  if (StartsWith(bytes, {'I', 'I', 0x2A, 0x00}) ||
      StartsWith(bytes, {'M', 'M', 0x00, 0x2A})) {
    return RasterFormat::kTiff;
  }
  return std::nullopt;
}

Image DecodeImage(std::span<const std::uint8_t> bytes) {
  if (bytes.empty()) throw Error(ErrorCode::kUnreadableFile, "raster payload is empty");
  if (!SniffFormat(bytes)) {
    throw Error(ErrorCode::kUnsupportedFormat, "not a PNG, JPEG or TIFF raster");
  }
  const cv::Mat encoded(1, static_cast<int>(bytes.size()), CV_8UC1,
                        const_cast<std::uint8_t*>(bytes.data()));
  cv::Mat mat = cv::imdecode(encoded, cv::IMREAD_UNCHANGED);
  if (mat.empty()) {
    throw Error(ErrorCode::kUnsupportedFormat, "raster could not be decoded");
  }
  if (mat.cols <= 0 || mat.rows <= 0) {
    throw Error(ErrorCode::kZeroDimension, "decoded raster has zero size");
  }
  if (mat.depth() == CV_16U) {
    mat.convertTo(mat, CV_8U, 1.0 / 257.0);
  } else if (mat.depth() != CV_8U) {
    throw Error(ErrorCode::kUnsupportedFormat, "only 8 and 16 bit rasters are supported");
  }

  cv::Mat out;
  switch (mat.channels()) {
    case 1: out = mat; break;
    case 3: cv::cvtColor(mat, out, cv::COLOR_BGR2RGB); break;
    case 4: cv::cvtColor(mat, out, cv::COLOR_BGRA2RGB); break;
    default:
      throw Error(ErrorCode::kUnsupportedFormat,
                  "unsupported channel count " + std::to_string(mat.channels()));
  }
  if (!out.isContinuous()) out = out.clone();

  Image image(out.cols, out.rows, out.channels());
  std::memcpy(image.pixels.data(), out.data, image.pixels.size());
  return image;
}

std::vector<std::uint8_t> EncodePng(const Image& image) {
  return Encode(image, ".png", {cv::IMWRITE_PNG_COMPRESSION, 6});
}

std::vector<std::uint8_t> EncodeJpeg(const Image& image, int quality) {
  return Encode(image, ".jpg", {cv::IMWRITE_JPEG_QUALITY, quality});
}

std::vector<std::uint8_t> ReadFileBytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kUnreadableFile, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return bytes;
}

void WriteFileBytes(const std::filesystem::path& path,
                    std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kIoError, "short write to " + path.string());
}

LoadedImage LoadImage(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) {
    throw Error(ErrorCode::kUnreadableFile, "no such file " + path.string());
  }
  const auto bytes = ReadFileBytes(path);
  if (bytes.empty()) {
    throw Error(ErrorCode::kUnreadableFile, path.string() + " is empty");
  }

  LoadedImage loaded;
  loaded.pixels = DecodeImage(bytes);
  loaded.record.id = path.stem().string();
  loaded.record.source = ImageSource::kOther;
  loaded.record.width_px = loaded.pixels.width;
  loaded.record.height_px = loaded.pixels.height;
  loaded.record.pixel_ref = path.string();

  const auto mtime = std::filesystem::last_write_time(path, ec);
  if (!ec) {
    const auto sys = std::chrono::file_clock::to_sys(mtime);
    loaded.record.acquired_at = std::chrono::floor<std::chrono::milliseconds>(sys);
  }
  return loaded;
}

}  // namespace sentinel::imagery
