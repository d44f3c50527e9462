// Copyright 2026 The bicache Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "bicache/simd/kernels.hpp"

namespace bicache::simd {

#if defined(BICACHE_HAVE_AVX2)
namespace avx2 {
std::ptrdiff_t find_u32(const std::uint32_t* data, std::size_t n, std::uint32_t key);
std::size_t argmin_u64(const std::uint64_t* data, std::size_t n);
void sector_bases(const std::uint32_t* addrs, std::size_t n, std::uint32_t* out);
std::size_t first_mismatch_u64(const std::uint64_t* a, const std::uint64_t* b, std::size_t n);
}  // namespace avx2
#endif

#if defined(__aarch64__)
namespace neon {
std::ptrdiff_t find_u32(const std::uint32_t* data, std::size_t n, std::uint32_t key);
std::size_t argmin_u64(const std::uint64_t* data, std::size_t n);
void sector_bases(const std::uint32_t* addrs, std::size_t n, std::uint32_t* out);
std::size_t first_mismatch_u64(const std::uint64_t* a, const std::uint64_t* b, std::size_t n);
}  // namespace neon
#endif

}  // namespace bicache::simd
