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

#include "common/png_io.hpp"

#include <png.h>

#include <cmath>
#include <cstring>
#include <fstream>

#include "common/error.hpp"

namespace pickcell {
namespace {

void append_data(png_structp png, png_bytep data, png_size_t len) {
  auto* out = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(png));
  out->insert(out->end(), data, data + len);
}

void flush_noop(png_structp) {}

struct ReadCursor {
  std::span<const std::uint8_t> bytes;
  std::size_t pos = 0;
};

void read_data(png_structp png, png_bytep data, png_size_t len) {
  auto* cur = static_cast<ReadCursor*>(png_get_io_ptr(png));
  if (cur->pos + len > cur->bytes.size()) png_error(png, "truncated png");
  std::memcpy(data, cur->bytes.data() + cur->pos, len);
  cur->pos += len;
}

std::vector<std::uint8_t> encode(int width, int height, int bit_depth, int color_type,
                                 const std::vector<png_bytep>& rows) {
  std::vector<std::uint8_t> out;
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) fail(ErrorCode::Internal, "png_create_write_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info || setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    fail(ErrorCode::Internal, "png encoding failed");
  }
  png_set_write_fn(png, &out, append_data, flush_noop);
  png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), bit_depth,
               color_type, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  if (bit_depth == 16) png_set_swap(png);  // rows are host-order uint16
  png_write_image(png, const_cast<png_bytepp>(rows.data()));
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return out;
}

}  // namespace

std::vector<std::uint8_t> encode_png_gray16(const Image16& img) {
  std::vector<std::uint16_t> buf = img.pixels;
  std::vector<png_bytep> rows(static_cast<std::size_t>(img.height));
  for (int v = 0; v < img.height; ++v)
    rows[v] = reinterpret_cast<png_bytep>(buf.data() + static_cast<std::size_t>(v) * img.width);
  return encode(img.width, img.height, 16, PNG_COLOR_TYPE_GRAY, rows);
}

std::vector<std::uint8_t> encode_png_rgb(const ImageRgb& img) {
  std::vector<std::uint8_t> buf = img.pixels;
  std::vector<png_bytep> rows(static_cast<std::size_t>(img.height));
  for (int v = 0; v < img.height; ++v) rows[v] = buf.data() + static_cast<std::size_t>(v) * img.width * 3;
  return encode(img.width, img.height, 8, PNG_COLOR_TYPE_RGB, rows);
}

Image16 decode_png_gray16(std::span<const std::uint8_t> bytes) {
  ReadCursor cur{bytes, 0};
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) fail(ErrorCode::Internal, "png_create_read_struct failed");
  png_infop info = png_create_info_struct(png);
  Image16 img;
  if (!info || setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    fail(ErrorCode::ParseError, "png decoding failed");
  }
  png_set_read_fn(png, &cur, read_data);
  png_read_info(png, info);
  if (png_get_bit_depth(png, info) != 16 || png_get_color_type(png, info) != PNG_COLOR_TYPE_GRAY)
    png_error(png, "expected 16-bit grayscale");
  png_set_swap(png);
  img.width = static_cast<int>(png_get_image_width(png, info));
  img.height = static_cast<int>(png_get_image_height(png, info));
  img.pixels.resize(static_cast<std::size_t>(img.width) * img.height);
  std::vector<png_bytep> rows(static_cast<std::size_t>(img.height));
  for (int v = 0; v < img.height; ++v)
    rows[v] = reinterpret_cast<png_bytep>(img.pixels.data() + static_cast<std::size_t>(v) * img.width);
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return img;
}

Image16 depth_to_mm(const DepthFrame& depth) {
  Image16 img{depth.width(), depth.height(),
              std::vector<std::uint16_t>(static_cast<std::size_t>(depth.width()) * depth.height(), 0)};
  for (int v = 0; v < depth.height(); ++v)
    for (int u = 0; u < depth.width(); ++u) {
      if (!depth.valid(u, v)) continue;
      const double mm = std::round(depth.value(u, v) * 1000.0);
      img.pixels[static_cast<std::size_t>(v) * depth.width() + u] =
          static_cast<std::uint16_t>(std::clamp(mm, 1.0, 65535.0));
    }
  return img;
}

void write_file(const std::string& path, std::span<const std::uint8_t> bytes) {
  std::ofstream f(path, std::ios::binary);
  if (!f) fail(ErrorCode::IoError, "cannot open '" + path + "' for writing");
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!f) fail(ErrorCode::IoError, "write to '" + path + "' failed");
}

}  // namespace pickcell
