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

#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace vfr::raster {

struct Rgba {
  std::uint8_t r{0}, g{0}, b{0}, a{255};

  /// Packed so that the in-memory byte order is R, G, B, A.
  constexpr std::uint32_t pack() const noexcept {
    return static_cast<std::uint32_t>(r) | (static_cast<std::uint32_t>(g) << 8) |
           (static_cast<std::uint32_t>(b) << 16) | (static_cast<std::uint32_t>(a) << 24);
  }
  static constexpr Rgba unpack(std::uint32_t v) noexcept {
    return {static_cast<std::uint8_t>(v), static_cast<std::uint8_t>(v >> 8),
            static_cast<std::uint8_t>(v >> 16), static_cast<std::uint8_t>(v >> 24)};
  }
  friend constexpr bool operator==(const Rgba&, const Rgba&) = default;
};

/// Fixed scene palette. Prompt text names these colors, so they must stay
/// visually unambiguous.
namespace palette {
inline constexpr Rgba kWhite{255, 255, 255};
inline constexpr Rgba kGreen{0, 190, 0};
inline constexpr Rgba kBlue{0, 60, 255};
inline constexpr Rgba kGray{128, 128, 128};
inline constexpr Rgba kDarkGray{70, 70, 70};
inline constexpr Rgba kRed{230, 0, 0};
inline constexpr Rgba kYellow{245, 200, 0};
inline constexpr Rgba kOrange{255, 140, 0};
inline constexpr Rgba kTeal{0, 150, 160};
inline constexpr Rgba kLightGray{210, 210, 210};
inline constexpr Rgba kLegoWhite{240, 240, 240};
}  // namespace palette

/// Half-open pixel rectangle [x0, x1) x [y0, y1).
struct PixelRect {
  int x0{0}, y0{0}, x1{0}, y1{0};

  int width() const noexcept { return x1 > x0 ? x1 - x0 : 0; }
  int height() const noexcept { return y1 > y0 ? y1 - y0 : 0; }
  bool empty() const noexcept { return width() == 0 || height() == 0; }
  long long area() const noexcept { return static_cast<long long>(width()) * height(); }
  bool contains(int x, int y) const noexcept { return x >= x0 && x < x1 && y >= y0 && y < y1; }
  PixelRect intersect(const PixelRect& o) const noexcept;
  PixelRect dilate(int by) const noexcept { return {x0 - by, y0 - by, x1 + by, y1 + by}; }
  friend bool operator==(const PixelRect&, const PixelRect&) = default;
};

class RasterImage {
 public:
  RasterImage() = default;
  RasterImage(int width, int height, Rgba background = palette::kWhite);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  PixelRect bounds() const noexcept { return {0, 0, width_, height_}; }
  bool empty() const noexcept { return pixels_.empty(); }

  Rgba at(int x, int y) const { return Rgba::unpack(pixels_[index(x, y)]); }
  void set(int x, int y, Rgba c) { pixels_[index(x, y)] = c.pack(); }

  std::span<std::uint32_t> row(int y) {
    return {pixels_.data() + static_cast<std::size_t>(y) * width_, static_cast<std::size_t>(width_)};
  }
  std::span<const std::uint32_t> row(int y) const {
    return {pixels_.data() + static_cast<std::size_t>(y) * width_, static_cast<std::size_t>(width_)};
  }
  std::span<const std::uint32_t> pixels() const noexcept { return pixels_; }
  std::span<std::uint32_t> pixels() noexcept { return pixels_; }

  friend bool operator==(const RasterImage&, const RasterImage&) = default;

 private:
  std::size_t index(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * width_ + static_cast<std::size_t>(x);
  }

  int width_{0};
  int height_{0};
  std::vector<std::uint32_t> pixels_;
};

/// One byte per pixel, nonzero = covered.
struct Mask {
  int width{0};
  int height{0};
  std::vector<std::uint8_t> bits;

  Mask(int w, int h) : width(w), height(h), bits(static_cast<std::size_t>(w) * h, 0) {}
};

// Drawing primitives. All are clipped to the image and fully deterministic.

void fill_rect(RasterImage& img, const PixelRect& rect, Rgba color);

/// Border of thickness `stroke` drawn inside `rect`.
void outline_rect(RasterImage& img, const PixelRect& rect, Rgba color, int stroke);

/// Pixels whose centers fall inside the rectangle of half sizes (half_w,
/// half_h) centered at (cx, cy) and rotated by angle_deg (clockwise on screen).
void fill_rotated_rect(RasterImage& img, double cx, double cy, double half_w, double half_h,
                       double angle_deg, Rgba color);

/// Rotated rectangle outline; pixels within `stroke` of the boundary, inside.
void outline_rotated_rect(RasterImage& img, double cx, double cy, double half_w, double half_h,
                          double angle_deg, Rgba color, int stroke);

void fill_mask(Mask& mask, const PixelRect& rect);

/// Number of positions whose pixels differ (dispatches to the active kernel).
std::size_t count_diff(const RasterImage& a, const RasterImage& b);
std::size_t count_color(const RasterImage& img, Rgba color);

}  // namespace vfr::raster
