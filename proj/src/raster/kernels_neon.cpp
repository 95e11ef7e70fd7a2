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

#if defined(__ARM_NEON) && defined(__aarch64__)
#include <arm_neon.h>
#endif

namespace vfr::raster::kernels {

#if defined(__ARM_NEON) && defined(__aarch64__)

namespace {

void fill_neon(std::span<std::uint32_t> px, std::uint32_t value) {
  const uint32x4_t v = vdupq_n_u32(value);
  std::uint32_t* p = px.data();
  const std::size_t n = px.size();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) vst1q_u32(p + i, v);
  for (; i < n; ++i) p[i] = value;
}

std::size_t count_equal_neon(std::span<const std::uint32_t> px, std::uint32_t value) {
  const uint32x4_t v = vdupq_n_u32(value);
  const std::uint32_t* p = px.data();
  const std::size_t n = px.size();
  std::size_t count = 0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const uint32x4_t eq = vceqq_u32(vld1q_u32(p + i), v);
    count += vaddvq_u32(vshrq_n_u32(eq, 31));
  }
  for (; i < n; ++i) count += (p[i] == value);
  return count;
}

std::size_t count_diff_neon(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b) {
  const std::size_t n = a.size();
  std::size_t diff = 0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const uint32x4_t eq = vceqq_u32(vld1q_u32(a.data() + i), vld1q_u32(b.data() + i));
    diff += 4 - vaddvq_u32(vshrq_n_u32(eq, 31));
  }
  for (; i < n; ++i) diff += (a[i] != b[i]);
  return diff;
}

std::size_t count_nonzero_neon(std::span<const std::uint8_t> mask) {
  const std::size_t n = mask.size();
  std::size_t count = 0;
  std::size_t i = 0;
  for (; i + 16 <= n; i += 16) {
    const uint8x16_t nz = vtstq_u8(vld1q_u8(mask.data() + i), vdupq_n_u8(0xff));
    count += vaddvq_u8(vshrq_n_u8(nz, 7));
  }
  for (; i < n; ++i) count += (mask[i] != 0);
  return count;
}

std::size_t count_both_neon(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) {
  const std::size_t n = a.size();
  std::size_t count = 0;
  std::size_t i = 0;
  const uint8x16_t ones = vdupq_n_u8(0xff);
  for (; i + 16 <= n; i += 16) {
    const uint8x16_t na = vtstq_u8(vld1q_u8(a.data() + i), ones);
    const uint8x16_t nb = vtstq_u8(vld1q_u8(b.data() + i), ones);
    count += vaddvq_u8(vshrq_n_u8(vandq_u8(na, nb), 7));
  }
  for (; i < n; ++i) count += (a[i] != 0 && b[i] != 0);
  return count;
}

std::size_t count_either_neon(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) {
  const std::size_t n = a.size();
  std::size_t count = 0;
  std::size_t i = 0;
  const uint8x16_t ones = vdupq_n_u8(0xff);
  for (; i + 16 <= n; i += 16) {
    const uint8x16_t na = vtstq_u8(vld1q_u8(a.data() + i), ones);
    const uint8x16_t nb = vtstq_u8(vld1q_u8(b.data() + i), ones);
    count += vaddvq_u8(vshrq_n_u8(vorrq_u8(na, nb), 7));
  }
  for (; i < n; ++i) count += (a[i] != 0 || b[i] != 0);
  return count;
}

constexpr KernelTable kNeon{Isa::Neon,        fill_neon,          count_equal_neon,
                            count_diff_neon,  count_nonzero_neon, count_both_neon,
                            count_either_neon};

}  // namespace

const KernelTable* neon_table_if_built() noexcept { return &kNeon; }

#else

const KernelTable* neon_table_if_built() noexcept { return nullptr; }

#endif

}  // namespace vfr::raster::kernels
