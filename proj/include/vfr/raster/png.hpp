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
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "vfr/raster/image.hpp"

namespace vfr::raster {

/// Encodes as 8-bit RGB (alpha is dropped; scene images are opaque). Output is
/// a pure function of the pixels and the compression level.
std::vector<std::uint8_t> encode_png(const RasterImage& img, int compression_level = 6);

/// Decodes any 8-bit PNG libpng understands. Throws ParseError on malformed data.
RasterImage decode_png(std::span<const std::uint8_t> bytes);

void write_png(const std::filesystem::path& path, const RasterImage& img);

/// SHA-256 over the dimensions and RGBA bytes. Survives a PNG round trip for
/// opaque images.
std::string pixel_digest(const RasterImage& img);

}  // namespace vfr::raster
