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

// Data-parallel raster inner loops. Every kernel has a scalar reference
// implementation; SIMD variants are chosen at runtime and must agree with the
// reference bit for bit.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace vfr::raster::kernels {

enum class Isa { Scalar, Avx2, Neon };

std::string_view isa_name(Isa isa) noexcept;

struct KernelTable {
  Isa isa;
  /// Writes `value` into every element.
  void (*fill)(std::span<std::uint32_t> px, std::uint32_t value);
  /// Number of elements equal to `value`.
  std::size_t (*count_equal)(std::span<const std::uint32_t> px, std::uint32_t value);
  /// Number of positions where `a` and `b` differ. Spans must have equal size.
  std::size_t (*count_diff)(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b);
  /// Number of nonzero bytes.
  std::size_t (*count_nonzero)(std::span<const std::uint8_t> mask);
  /// Number of positions where both masks are nonzero.
  std::size_t (*count_both)(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b);
  /// Number of positions where either mask is nonzero.
  std::size_t (*count_either)(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b);
};

const KernelTable& scalar_kernels() noexcept;

/// Returns nullptr when the variant was not compiled in or the CPU lacks it.
const KernelTable* avx2_kernels() noexcept;
const KernelTable* neon_kernels() noexcept;

/// Best table for this CPU. Setting VFR_SIMD=scalar in the environment forces
/// the reference path.
const KernelTable& active() noexcept;

/// Overrides the dispatch choice (tests and benchmarks). Passing nullptr
/// restores automatic selection.
void force(const KernelTable* table) noexcept;

}  // namespace vfr::raster::kernels
