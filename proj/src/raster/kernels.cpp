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

#include "vfr/raster/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>

namespace vfr::raster::kernels {

namespace {

void fill_scalar(std::span<std::uint32_t> px, std::uint32_t value) {
  for (auto& p : px) p = value;
}

std::size_t count_equal_scalar(std::span<const std::uint32_t> px, std::uint32_t value) {
  std::size_t n = 0;
  for (auto p : px) n += (p == value);
  return n;
}

std::size_t count_diff_scalar(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < a.size(); ++i) n += (a[i] != b[i]);
  return n;
}

std::size_t count_nonzero_scalar(std::span<const std::uint8_t> mask) {
  std::size_t n = 0;
  for (auto m : mask) n += (m != 0);
  return n;
}

std::size_t count_both_scalar(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < a.size(); ++i) n += (a[i] != 0 && b[i] != 0);
  return n;
}

std::size_t count_either_scalar(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < a.size(); ++i) n += (a[i] != 0 || b[i] != 0);
  return n;
}

constexpr KernelTable kScalar{Isa::Scalar,         fill_scalar,       count_equal_scalar,
                              count_diff_scalar,   count_nonzero_scalar, count_both_scalar,
                              count_either_scalar};

std::atomic<const KernelTable*> g_forced{nullptr};

const KernelTable& detect() noexcept {
  if (const char* env = std::getenv("VFR_SIMD"); env != nullptr && std::strcmp(env, "scalar") == 0) {
    return kScalar;
  }
  if (const auto* t = avx2_kernels()) return *t;
  if (const auto* t = neon_kernels()) return *t;
  return kScalar;
}

}  // namespace

// Defined in kernels_avx2.cpp / kernels_neon.cpp when those variants are built.
const KernelTable* avx2_table_if_built() noexcept;
const KernelTable* neon_table_if_built() noexcept;

std::string_view isa_name(Isa isa) noexcept {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
    case Isa::Neon: return "neon";
  }
  return "unknown";
}

const KernelTable& scalar_kernels() noexcept { return kScalar; }

const KernelTable* avx2_kernels() noexcept {
#if defined(__x86_64__) || defined(__i386__)
  static const bool supported = __builtin_cpu_supports("avx2");
  return supported ? avx2_table_if_built() : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable* neon_kernels() noexcept { return neon_table_if_built(); }

const KernelTable& active() noexcept {
  if (const auto* forced = g_forced.load(std::memory_order_acquire)) return *forced;
  static const KernelTable& chosen = detect();
  return chosen;
}

void force(const KernelTable* table) noexcept { g_forced.store(table, std::memory_order_release); }

}  // namespace vfr::raster::kernels
