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

#include "vfr/raster/image.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "vfr/raster/kernels.hpp"

namespace vfr::raster {

PixelRect PixelRect::intersect(const PixelRect& o) const noexcept {
  PixelRect r{std::max(x0, o.x0), std::max(y0, o.y0), std::min(x1, o.x1), std::min(y1, o.y1)};
  if (r.x1 < r.x0) r.x1 = r.x0;
  if (r.y1 < r.y0) r.y1 = r.y0;
  return r;
}

RasterImage::RasterImage(int width, int height, Rgba background)
    : width_(width), height_(height) {
  if (width <= 0 || height <= 0) throw std::invalid_argument("image dimensions must be positive");
  pixels_.resize(static_cast<std::size_t>(width) * height);
  kernels::active().fill(pixels_, background.pack());
}

void fill_rect(RasterImage& img, const PixelRect& rect, Rgba color) {
  const PixelRect r = rect.intersect(img.bounds());
  if (r.empty()) return;
  const auto& k = kernels::active();
  const std::uint32_t v = color.pack();
  for (int y = r.y0; y < r.y1; ++y) {
    k.fill(img.row(y).subspan(static_cast<std::size_t>(r.x0), static_cast<std::size_t>(r.width())), v);
  }
}

void outline_rect(RasterImage& img, const PixelRect& rect, Rgba color, int stroke) {
  if (rect.empty() || stroke <= 0) return;
  const int s = std::min({stroke, (rect.width() + 1) / 2, (rect.height() + 1) / 2});
  fill_rect(img, {rect.x0, rect.y0, rect.x1, rect.y0 + s}, color);
  fill_rect(img, {rect.x0, rect.y1 - s, rect.x1, rect.y1}, color);
  fill_rect(img, {rect.x0, rect.y0 + s, rect.x0 + s, rect.y1 - s}, color);
  fill_rect(img, {rect.x1 - s, rect.y0 + s, rect.x1, rect.y1 - s}, color);
}

namespace {

template <typename Pred>
void scan_rotated(RasterImage& img, double cx, double cy, double half_w, double half_h,
                  double angle_deg, Rgba color, Pred inside) {
  const double a = angle_deg * std::numbers::pi / 180.0;
  const double c = std::cos(a);
  const double s = std::sin(a);
  const double ext_x = std::abs(half_w * c) + std::abs(half_h * s);
  const double ext_y = std::abs(half_w * s) + std::abs(half_h * c);
  const int x0 = std::max(0, static_cast<int>(std::floor(cx - ext_x)));
  const int x1 = std::min(img.width(), static_cast<int>(std::ceil(cx + ext_x)) + 1);
  const int y0 = std::max(0, static_cast<int>(std::floor(cy - ext_y)));
  const int y1 = std::min(img.height(), static_cast<int>(std::ceil(cy + ext_y)) + 1);
  for (int y = y0; y < y1; ++y) {
    for (int x = x0; x < x1; ++x) {
      const double dx = (x + 0.5) - cx;
      const double dy = (y + 0.5) - cy;
      // Rotate the sample into the rectangle frame.
      const double lx = dx * c + dy * s;
      const double ly = -dx * s + dy * c;
      if (inside(lx, ly)) img.set(x, y, color);
    }
  }
}

}  // namespace

void fill_rotated_rect(RasterImage& img, double cx, double cy, double half_w, double half_h,
                       double angle_deg, Rgba color) {
  scan_rotated(img, cx, cy, half_w, half_h, angle_deg, color, [&](double lx, double ly) {
    return std::abs(lx) <= half_w && std::abs(ly) <= half_h;
  });
}

void outline_rotated_rect(RasterImage& img, double cx, double cy, double half_w, double half_h,
                          double angle_deg, Rgba color, int stroke) {
  const double s = static_cast<double>(stroke);
  scan_rotated(img, cx, cy, half_w, half_h, angle_deg, color, [&](double lx, double ly) {
    const double ax = std::abs(lx);
    const double ay = std::abs(ly);
    return ax <= half_w && ay <= half_h && (ax > half_w - s || ay > half_h - s);
  });
}

void fill_mask(Mask& mask, const PixelRect& rect) {
  const PixelRect r = rect.intersect({0, 0, mask.width, mask.height});
  for (int y = r.y0; y < r.y1; ++y) {
    auto* row = mask.bits.data() + static_cast<std::size_t>(y) * mask.width;
    std::fill(row + r.x0, row + r.x1, std::uint8_t{1});
  }
}

std::size_t count_diff(const RasterImage& a, const RasterImage& b) {
  if (a.width() != b.width() || a.height() != b.height()) {
    throw std::invalid_argument("count_diff: image sizes differ");
  }
  return kernels::active().count_diff(a.pixels(), b.pixels());
}

std::size_t count_color(const RasterImage& img, Rgba color) {
  return kernels::active().count_equal(img.pixels(), color.pack());
}

}  // namespace vfr::raster
