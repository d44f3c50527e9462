// Copyright 2026 The bicache Authors
// SPDX-License-Identifier: Apache-2.0

#include <cstdlib>
#include <string_view>

#include "kernels_impl.hpp"

namespace bicache::simd {

namespace {

constexpr KernelTable kScalarTable{
    &scalar::find_u32,
    &scalar::argmin_u64,
    &scalar::sector_bases,
    &scalar::first_mismatch_u64,
};

#if defined(BICACHE_HAVE_AVX2)
constexpr KernelTable kAvx2Table{
    &avx2::find_u32,
    &avx2::argmin_u64,
    &avx2::sector_bases,
    &avx2::first_mismatch_u64,
};
#endif

#if defined(__aarch64__)
constexpr KernelTable kNeonTable{
    &neon::find_u32,
    &neon::argmin_u64,
    &neon::sector_bases,
    &neon::first_mismatch_u64,
};
#endif

Isa detect() {
  if (const char* env = std::getenv("BICACHE_SIMD"); env != nullptr && std::string_view(env) == "scalar")
    return Isa::scalar;
  if (isa_available(Isa::avx2)) return Isa::avx2;
  if (isa_available(Isa::neon)) return Isa::neon;
  return Isa::scalar;
}

}  // namespace

std::string_view to_string(Isa isa) {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
    case Isa::neon: return "neon";
  }
  return "?";
}

bool isa_available(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2:
#if defined(BICACHE_HAVE_AVX2)
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
    case Isa::neon:
#if defined(__aarch64__)
      return true;  // Advanced SIMD is mandatory on AArch64.
#else
      return false;
#endif
  }
  return false;
}

const KernelTable& kernels_for(Isa isa) {
  if (!isa_available(isa)) return kScalarTable;
  switch (isa) {
#if defined(BICACHE_HAVE_AVX2)
    case Isa::avx2: return kAvx2Table;
#endif
#if defined(__aarch64__)
    case Isa::neon: return kNeonTable;
#endif
    default: return kScalarTable;
  }
}

Isa active_isa() {
  static const Isa isa = detect();
  return isa;
}

const KernelTable& kernels() {
  static const KernelTable& table = kernels_for(active_isa());
  return table;
}

}  // namespace bicache::simd
