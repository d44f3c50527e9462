// Copyright 2026 The bicache Authors
// SPDX-License-Identifier: Apache-2.0

#include "kernels_impl.hpp"

#if defined(__aarch64__)
#include <arm_neon.h>

namespace bicache::simd::neon {

std::ptrdiff_t find_u32(const std::uint32_t* data, std::size_t n, std::uint32_t key) {
  const uint32x4_t k = vdupq_n_u32(key);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const uint32x4_t eq = vceqq_u32(vld1q_u32(data + i), k);
    if (vmaxvq_u32(eq) != 0) {
      for (std::size_t j = i; j < i + 4; ++j) {
        if (data[j] == key) return static_cast<std::ptrdiff_t>(j);
      }
    }
  }
  for (; i < n; ++i) {
    if (data[i] == key) return static_cast<std::ptrdiff_t>(i);
  }
  return kNotFound;
}

std::size_t argmin_u64(const std::uint64_t* data, std::size_t n) {
  if (n < 4) return scalar::argmin_u64(data, n);
  uint64x2_t best = vld1q_u64(data);
  uint64x2_t best_idx = {0, 1};
  uint64x2_t idx = best_idx;
  const uint64x2_t step = vdupq_n_u64(2);
  std::size_t i = 2;
  for (; i + 2 <= n; i += 2) {
    idx = vaddq_u64(idx, step);
    const uint64x2_t v = vld1q_u64(data + i);
    const uint64x2_t lt = vcltq_u64(v, best);
    best = vbslq_u64(lt, v, best);
    best_idx = vbslq_u64(lt, idx, best_idx);
  }
  std::uint64_t v0 = vgetq_lane_u64(best, 0), v1 = vgetq_lane_u64(best, 1);
  std::size_t i0 = vgetq_lane_u64(best_idx, 0), i1 = vgetq_lane_u64(best_idx, 1);
  std::uint64_t val = v0;
  std::size_t arg = i0;
  if (v1 < val || (v1 == val && i1 < arg)) {
    val = v1;
    arg = i1;
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
  const uint32x4_t m = vdupq_n_u32(~std::uint32_t{63});
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) vst1q_u32(out + i, vandq_u32(vld1q_u32(addrs + i), m));
  for (; i < n; ++i) out[i] = addrs[i] & ~std::uint32_t{63};
}

std::size_t first_mismatch_u64(const std::uint64_t* a, const std::uint64_t* b, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const uint64x2_t eq = vceqq_u64(vld1q_u64(a + i), vld1q_u64(b + i));
    if (vgetq_lane_u64(eq, 0) == 0) return i;
    if (vgetq_lane_u64(eq, 1) == 0) return i + 1;
  }
  for (; i < n; ++i) {
    if (a[i] != b[i]) return i;
  }
  return n;
}

}  // namespace bicache::simd::neon

#endif
