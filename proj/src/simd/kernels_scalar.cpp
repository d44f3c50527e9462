// Copyright 2026 The bicache Authors
// SPDX-License-Identifier: Apache-2.0

#include "bicache/simd/kernels.hpp"

namespace bicache::simd::scalar {

std::ptrdiff_t find_u32(const std::uint32_t* data, std::size_t n, std::uint32_t key) {
  for (std::size_t i = 0; i < n; ++i) {
    if (data[i] == key) return static_cast<std::ptrdiff_t>(i);
  }
  return kNotFound;
}

std::size_t argmin_u64(const std::uint64_t* data, std::size_t n) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < n; ++i) {
    if (data[i] < data[best]) best = i;
  }
  return best;
}

void sector_bases(const std::uint32_t* addrs, std::size_t n, std::uint32_t* out) {
  for (std::size_t i = 0; i < n; ++i) out[i] = addrs[i] & ~std::uint32_t{63};
}

std::size_t first_mismatch_u64(const std::uint64_t* a, const std::uint64_t* b, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    if (a[i] != b[i]) return i;
  }
  return n;
}

}  // namespace bicache::simd::scalar
