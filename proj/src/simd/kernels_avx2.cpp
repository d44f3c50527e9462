// Copyright 2026 The bicache Authors
// SPDX-License-Identifier: Apache-2.0

// Compiled with -mavx2; only reached after a runtime CPUID check.

#include <immintrin.h>

#include "kernels_impl.hpp"

namespace bicache::simd::avx2 {

std::ptrdiff_t find_u32(const std::uint32_t* data, std::size_t n, std::uint32_t key) {
  const __m256i k = _mm256_set1_epi32(static_cast<int>(key));
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256i v = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(data + i));
    const int mask = _mm256_movemask_ps(_mm256_castsi256_ps(_mm256_cmpeq_epi32(v, k)));
    if (mask != 0) return static_cast<std::ptrdiff_t>(i + __builtin_ctz(static_cast<unsigned>(mask)));
  }
  for (; i < n; ++i) {
    if (data[i] == key) return static_cast<std::ptrdiff_t>(i);
  }
  return kNotFound;
}

std::size_t argmin_u64(const std::uint64_t* data, std::size_t n) {
  if (n < 8) return scalar::argmin_u64(data, n);
  // Unsigned compare via sign-bias; lanes track value and index separately so
  // ties resolve to the lowest index, matching the scalar reference.
  const __m256i bias = _mm256_set1_epi64x(static_cast<long long>(0x8000000000000000ULL));
  __m256i best = _mm256_xor_si256(_mm256_loadu_si256(reinterpret_cast<const __m256i*>(data)), bias);
  __m256i best_idx = _mm256_setr_epi64x(0, 1, 2, 3);
  __m256i idx = best_idx;
  const __m256i step = _mm256_set1_epi64x(4);
  std::size_t i = 4;
  for (; i + 4 <= n; i += 4) {
    idx = _mm256_add_epi64(idx, step);
    const __m256i v = _mm256_xor_si256(_mm256_loadu_si256(reinterpret_cast<const __m256i*>(data + i)), bias);
    const __m256i lt = _mm256_cmpgt_epi64(best, v);
    best = _mm256_blendv_epi8(best, v, lt);
    best_idx = _mm256_blendv_epi8(best_idx, idx, lt);
  }
  alignas(32) std::uint64_t vals[4];
  alignas(32) std::uint64_t idxs[4];
  _mm256_store_si256(reinterpret_cast<__m256i*>(vals), _mm256_xor_si256(best, bias));
  _mm256_store_si256(reinterpret_cast<__m256i*>(idxs), best_idx);
  std::size_t arg = idxs[0];
  std::uint64_t val = vals[0];
  for (int l = 1; l < 4; ++l) {
    if (vals[l] < val || (vals[l] == val && idxs[l] < arg)) {
      val = vals[l];
      arg = idxs[l];
    }
  }
  for (; i < n; ++i) {
    if (data[i] < val) {
      val = data[i];
      arg = i;
    }
  }
  return arg;
}

void sector_bases(const std::uint32_t* addrs, std::size_t n, std::uint32_t* out) {
  const __m256i m = _mm256_set1_epi32(~63);
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256i v = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(addrs + i));
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(out + i), _mm256_and_si256(v, m));
  }
  for (; i < n; ++i) out[i] = addrs[i] & ~std::uint32_t{63};
}

std::size_t first_mismatch_u64(const std::uint64_t* a, const std::uint64_t* b, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256i va = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a + i));
    const __m256i vb = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b + i));
    const int eq = _mm256_movemask_pd(_mm256_castsi256_pd(_mm256_cmpeq_epi64(va, vb)));
    if (eq != 0xF) return i + __builtin_ctz(static_cast<unsigned>(~eq & 0xF));
  }
  for (; i < n; ++i) {
    if (a[i] != b[i]) return i;
  }
  return n;
}

}  // namespace bicache::simd::avx2
