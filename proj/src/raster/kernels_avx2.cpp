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

#if defined(__AVX2__)
#include <immintrin.h>
#endif

namespace vfr::raster::kernels {

#if defined(__AVX2__)

namespace {

void fill_avx2(std::span<std::uint32_t> px, std::uint32_t value) {
  const __m256i v = _mm256_set1_epi32(static_cast<int>(value));
  std::uint32_t* p = px.data();
  const std::size_t n = px.size();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) _mm256_storeu_si256(reinterpret_cast<__m256i*>(p + i), v);
  for (; i < n; ++i) p[i] = value;
}

std::size_t count_equal_avx2(std::span<const std::uint32_t> px, std::uint32_t value) {
  const __m256i v = _mm256_set1_epi32(static_cast<int>(value));
  const std::uint32_t* p = px.data();
  const std::size_t n = px.size();
  std::size_t count = 0;
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256i x = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(p + i));
    const int m = _mm256_movemask_ps(_mm256_castsi256_ps(_mm256_cmpeq_epi32(x, v)));
    count += static_cast<std::size_t>(__builtin_popcount(static_cast<unsigned>(m)));
  }
  for (; i < n; ++i) count += (p[i] == value);
  return count;
}

std::size_t count_diff_avx2(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b) {
  const std::uint32_t* pa = a.data();
  const std::uint32_t* pb = b.data();
  const std::size_t n = a.size();
  std::size_t same = 0;
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256i x = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(pa + i));
    const __m256i y = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(pb + i));
    const int m = _mm256_movemask_ps(_mm256_castsi256_ps(_mm256_cmpeq_epi32(x, y)));
    same += static_cast<std::size_t>(__builtin_popcount(static_cast<unsigned>(m)));
  }
  std::size_t diff = i - same;
  for (; i < n; ++i) diff += (pa[i] != pb[i]);
  return diff;
}

// Byte masks: 32 lanes per iteration; cmpeq against zero marks empty lanes.
std::size_t count_nonzero_avx2(std::span<const std::uint8_t> mask) {
  const __m256i zero = _mm256_setzero_si256();
  const std::uint8_t* p = mask.data();
  const std::size_t n = mask.size();
  std::size_t zeros = 0;
  std::size_t i = 0;
  for (; i + 32 <= n; i += 32) {
    const __m256i x = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(p + i));
    const unsigned m = static_cast<unsigned>(_mm256_movemask_epi8(_mm256_cmpeq_epi8(x, zero)));
    zeros += static_cast<std::size_t>(__builtin_popcount(m));
  }
  std::size_t count = i - zeros;
  for (; i < n; ++i) count += (p[i] != 0);
  return count;
}

std::size_t count_both_avx2(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) {
  const __m256i zero = _mm256_setzero_si256();
  const std::uint8_t* pa = a.data();
  const std::uint8_t* pb = b.data();
  const std::size_t n = a.size();
  std::size_t count = 0;
  std::size_t i = 0;
  for (; i + 32 <= n; i += 32) {
    const __m256i x = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(pa + i));
    const __m256i y = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(pb + i));
    const unsigned za = static_cast<unsigned>(_mm256_movemask_epi8(_mm256_cmpeq_epi8(x, zero)));
    const unsigned zb = static_cast<unsigned>(_mm256_movemask_epi8(_mm256_cmpeq_epi8(y, zero)));
    count += static_cast<std::size_t>(__builtin_popcount(~(za | zb)));
  }
  for (; i < n; ++i) count += (pa[i] != 0 && pb[i] != 0);
  return count;
}

std::size_t count_either_avx2(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) {
  const __m256i zero = _mm256_setzero_si256();
  const std::uint8_t* pa = a.data();
  const std::uint8_t* pb = b.data();
  const std::size_t n = a.size();
  std::size_t count = 0;
  std::size_t i = 0;
  for (; i + 32 <= n; i += 32) {
    const __m256i x = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(pa + i));
    const __m256i y = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(pb + i));
    const unsigned za = static_cast<unsigned>(_mm256_movemask_epi8(_mm256_cmpeq_epi8(x, zero)));
    const unsigned zb = static_cast<unsigned>(_mm256_movemask_epi8(_mm256_cmpeq_epi8(y, zero)));
    count += static_cast<std::size_t>(__builtin_popcount(~(za & zb)));
  }
  for (; i < n; ++i) count += (pa[i] != 0 || pb[i] != 0);
  return count;
}

constexpr KernelTable kAvx2{Isa::Avx2,        fill_avx2,          count_equal_avx2,
                            count_diff_avx2,  count_nonzero_avx2, count_both_avx2,
                            count_either_avx2};

}  // namespace

const KernelTable* avx2_table_if_built() noexcept { return &kAvx2; }

#else

const KernelTable* avx2_table_if_built() noexcept { return nullptr; }

#endif

}  // namespace vfr::raster::kernels
