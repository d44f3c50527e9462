// Copyright 2026 The bicache Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Data-parallel inner loops of the simulator.
//
// Each kernel has a scalar reference implementation and, where the target
// supports it, an AVX2 (x86-64) or NEON (AArch64) variant. The variant is
// picked once at startup from the CPU's feature flags; `BICACHE_SIMD=scalar`
// in the environment forces the reference path. Every variant must return
// results identical to the scalar one, which tests/unit/simd_test.cpp checks.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace bicache::simd {

enum class Isa { scalar, avx2, neon };

std::string_view to_string(Isa isa);

inline constexpr std::ptrdiff_t kNotFound = -1;

struct KernelTable {
  /// Index of the first element equal to `key`, or kNotFound.
  std::ptrdiff_t (*find_u32)(const std::uint32_t* data, std::size_t n, std::uint32_t key);
  /// Index of the first minimum. Requires n > 0.
  std::size_t (*argmin_u64)(const std::uint64_t* data, std::size_t n);
  /// out[i] = addrs[i] with the low six bits cleared.
  void (*sector_bases)(const std::uint32_t* addrs, std::size_t n, std::uint32_t* out);
  /// Index of the first position where a and b differ, or n when equal.
  std::size_t (*first_mismatch_u64)(const std::uint64_t* a, const std::uint64_t* b, std::size_t n);
};

namespace scalar {
std::ptrdiff_t find_u32(const std::uint32_t* data, std::size_t n, std::uint32_t key);
std::size_t argmin_u64(const std::uint64_t* data, std::size_t n);
void sector_bases(const std::uint32_t* addrs, std::size_t n, std::uint32_t* out);
std::size_t first_mismatch_u64(const std::uint64_t* a, const std::uint64_t* b, std::size_t n);
}  // namespace scalar

/// True when `isa` was compiled in and the running CPU supports it.
bool isa_available(Isa isa);

/// Table for a specific ISA; falls back to scalar when unavailable.
const KernelTable& kernels_for(Isa isa);

/// Table selected at startup.
const KernelTable& kernels();
Isa active_isa();

inline std::ptrdiff_t find_u32(std::span<const std::uint32_t> data, std::uint32_t key) {
  return kernels().find_u32(data.data(), data.size(), key);
}
inline std::size_t argmin_u64(std::span<const std::uint64_t> data) {
  return kernels().argmin_u64(data.data(), data.size());
}
inline void sector_bases(std::span<const std::uint32_t> addrs, std::span<std::uint32_t> out) {
  kernels().sector_bases(addrs.data(), addrs.size(), out.data());
}
inline std::size_t first_mismatch_u64(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b) {
  return kernels().first_mismatch_u64(a.data(), b.data(), a.size() < b.size() ? a.size() : b.size());
}

}  // namespace bicache::simd
