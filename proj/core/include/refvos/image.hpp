// Copyright 2026 The refvos Authors.
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

#include <cstdint>
#include <filesystem>
#include <vector>

namespace refvos {

// 8-bit interleaved image, 1 (gray) or 3 (RGB) channels.
struct Image {
  int width = 0;
  int height = 0;
  int channels = 1;
  std::vector<std::uint8_t> data;

  Image() = default;
  Image(int w, int h, int c);

  std::uint8_t& at(int x, int y, int c = 0) {
    return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }
  std::uint8_t at(int x, int y, int c = 0) const {
    return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }

  friend bool operator==(const Image&, const Image&) = default;
};

// Single-channel float image used by feature tracking.
struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<float> data;

  GrayImage() = default;
  GrayImage(int w, int h) : width(w), height(h), data(std::size_t(w) * h, 0.f) {}

  float& at(int x, int y) { return data[std::size_t(y) * width + x]; }
  float at(int x, int y) const { return data[std::size_t(y) * width + x]; }
  // Bilinear sample with border clamping.
  float sample(double x, double y) const;
};

// Luma 0.299R + 0.587G + 0.114B for color input; gray passes through.
GrayImage to_gray(const Image& img);

// Throws IoError on failure.
Image read_png(const std::filesystem::path& path);
void write_png(const std::filesystem::path& path, const Image& img);

}  // namespace refvos
