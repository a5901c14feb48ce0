// Copyright 2026 The pickcell Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "common/types.hpp"

namespace pickcell {

struct Image16 {
  int width = 0;
  int height = 0;
  std::vector<std::uint16_t> pixels;
};

struct ImageRgb {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  // interleaved RGB

  void put(int u, int v, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    if (u < 0 || v < 0 || u >= width || v >= height) return;
    const auto i = (static_cast<std::size_t>(v) * width + u) * 3;
    pixels[i] = r, pixels[i + 1] = g, pixels[i + 2] = b;
  }
};

std::vector<std::uint8_t> encode_png_gray16(const Image16& img);
std::vector<std::uint8_t> encode_png_rgb(const ImageRgb& img);
Image16 decode_png_gray16(std::span<const std::uint8_t> bytes);

/// Millimeter depth image, 0 marks a hole.
Image16 depth_to_mm(const DepthFrame& depth);

void write_file(const std::string& path, std::span<const std::uint8_t> bytes);

}  // namespace pickcell
