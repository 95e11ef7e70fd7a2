// Copyright 2026 The vfr Authors
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

#include "vfr/raster/png.hpp"

#include <png.h>

#include <csetjmp>
#include <cstring>
#include <fstream>

#include "vfr/encoding.hpp"
#include "vfr/error.hpp"

namespace vfr::raster {

namespace {

void write_to_vector(png_structp png, png_bytep data, png_size_t length) {
  auto* out = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(png));
  out->insert(out->end(), data, data + length);
}

void flush_noop(png_structp) {}

struct ReadCursor {
  const std::uint8_t* data;
  std::size_t size;
  std::size_t pos;
};

void read_from_span(png_structp png, png_bytep out, png_size_t length) {
  auto* cur = static_cast<ReadCursor*>(png_get_io_ptr(png));
  if (cur->pos + length > cur->size) png_error(png, "truncated PNG stream");
  std::memcpy(out, cur->data + cur->pos, length);
  cur->pos += length;
}

void warning_noop(png_structp, png_const_charp) {}

}  // namespace

std::vector<std::uint8_t> encode_png(const RasterImage& img, int compression_level) {
  std::vector<std::uint8_t> out;
  std::vector<png_byte> rowbuf(static_cast<std::size_t>(img.width()) * 3);

  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, warning_noop);
  if (png == nullptr) throw InternalError("png_create_write_struct failed");
  png_infop info = png_create_info_struct(png);
  if (info == nullptr) {
    png_destroy_write_struct(&png, nullptr);
    throw InternalError("png_create_info_struct failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw InternalError("PNG encoding failed");
  }
  png_set_write_fn(png, &out, write_to_vector, flush_noop);
  png_set_IHDR(png, info, static_cast<png_uint_32>(img.width()), static_cast<png_uint_32>(img.height()), 8,
               PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_set_compression_level(png, compression_level);
  // A fixed filter keeps the byte stream independent of libpng's heuristics.
  png_set_filter(png, PNG_FILTER_TYPE_BASE, PNG_FILTER_SUB);
  png_write_info(png, info);
  for (int y = 0; y < img.height(); ++y) {
    const auto src = img.row(y);
    for (int x = 0; x < img.width(); ++x) {
      const Rgba c = Rgba::unpack(src[static_cast<std::size_t>(x)]);
      rowbuf[3 * static_cast<std::size_t>(x) + 0] = c.r;
      rowbuf[3 * static_cast<std::size_t>(x) + 1] = c.g;
      rowbuf[3 * static_cast<std::size_t>(x) + 2] = c.b;
    }
    png_write_row(png, rowbuf.data());
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return out;
}

RasterImage decode_png(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 8 || png_sig_cmp(bytes.data(), 0, 8) != 0) {
    throw ParseError("data is not a PNG stream");
  }
  ReadCursor cursor{bytes.data(), bytes.size(), 0};
  std::vector<png_byte> rowbuf;
  RasterImage img;

  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, warning_noop);
  if (png == nullptr) throw InternalError("png_create_read_struct failed");
  png_infop info = png_create_info_struct(png);
  if (info == nullptr) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw InternalError("png_create_info_struct failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw ParseError("malformed PNG stream");
  }
  png_set_read_fn(png, &cursor, read_from_span);
  png_read_info(png, info);
  const auto width = static_cast<int>(png_get_image_width(png, info));
  const auto height = static_cast<int>(png_get_image_height(png, info));
  const int color_type = png_get_color_type(png, info);
  const int bit_depth = png_get_bit_depth(png, info);
  if (bit_depth == 16) png_set_strip_16(png);
  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color_type == PNG_COLOR_TYPE_GRAY || color_type == PNG_COLOR_TYPE_GRAY_ALPHA) {
    if (bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    png_set_gray_to_rgb(png);
  }
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  if ((color_type & PNG_COLOR_MASK_ALPHA) == 0 && !png_get_valid(png, info, PNG_INFO_tRNS)) {
    png_set_filler(png, 0xff, PNG_FILLER_AFTER);
  }
  png_read_update_info(png, info);
  rowbuf.resize(png_get_rowbytes(png, info));
  img = RasterImage(width, height);
  for (int y = 0; y < height; ++y) {
    png_read_row(png, rowbuf.data(), nullptr);
    for (int x = 0; x < width; ++x) {
      const png_byte* p = rowbuf.data() + 4 * static_cast<std::size_t>(x);
      img.set(x, y, Rgba{p[0], p[1], p[2], p[3]});
    }
  }
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return img;
}

void write_png(const std::filesystem::path& path, const RasterImage& img) {
  const auto bytes = encode_png(img);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing " + path.string());
}

std::string pixel_digest(const RasterImage& img) {
  std::vector<std::uint8_t> bytes;
  const std::string head = std::to_string(img.width()) + "x" + std::to_string(img.height()) + "\n";
  bytes.reserve(head.size() + img.pixels().size() * 4);
  bytes.insert(bytes.end(), head.begin(), head.end());
  for (const auto v : img.pixels()) {
    const auto c = Rgba::unpack(v);
    bytes.insert(bytes.end(), {c.r, c.g, c.b, c.a});
  }
  return sha256_hex(bytes);
}

}  // namespace vfr::raster
