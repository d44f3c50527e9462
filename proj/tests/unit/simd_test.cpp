// Copyright 2026 The bicache Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <random>
#include <vector>

#include "bicache/simd/kernels.hpp"

using namespace bicache;

namespace {

std::vector<simd::Isa> variants() {
  std::vector<simd::Isa> out;
  for (const simd::Isa isa : {simd::Isa::avx2, simd::Isa::neon})
    if (simd::isa_available(isa)) out.push_back(isa);
  return out;
}

}  // namespace

TEST_CASE("every compiled variant agrees with the scalar reference") {
  const auto& ref = simd::kernels_for(simd::Isa::scalar);
  std::mt19937_64 rng(53);
  for (const simd::Isa isa : variants()) {
    CAPTURE(simd::to_string(isa));
    const auto& k = simd::kernels_for(isa);
    for (int trial = 0; trial < 3000; ++trial) {
      const std::size_t n = rng() % 80;
      std::vector<std::uint32_t> u(n);
      for (auto& v : u) v = static_cast<std::uint32_t>(rng() % 16);
      const std::uint32_t key = static_cast<std::uint32_t>(rng() % 18);
      REQUIRE(k.find_u32(u.data(), n, key) == ref.find_u32(u.data(), n, key));

      std::vector<std::uint64_t> w(n == 0 ? 1 : n);
      for (auto& v : w) v = rng() % 8 == 0 ? ~std::uint64_t{0} : rng() % 50;
      REQUIRE(k.argmin_u64(w.data(), w.size()) == ref.argmin_u64(w.data(), w.size()));

      std::vector<std::uint32_t> addrs(n), a(n), b(n);
      for (auto& v : addrs) v = static_cast<std::uint32_t>(rng());
      k.sector_bases(addrs.data(), n, a.data());
      ref.sector_bases(addrs.data(), n, b.data());
      REQUIRE(a == b);

      std::vector<std::uint64_t> x(n), y(n);
      for (std::size_t i = 0; i < n; ++i) x[i] = y[i] = rng();
      if (n && rng() % 2) y[rng() % n] ^= 1;
      REQUIRE(k.first_mismatch_u64(x.data(), y.data(), n) == ref.first_mismatch_u64(x.data(), y.data(), n));
    }
  }
}

TEST_CASE("scalar reference behaviour") {
  const std::uint32_t u[] = {5, 7, 7, 9};
  CHECK(simd::scalar::find_u32(u, 4, 7) == 1);
  CHECK(simd::scalar::find_u32(u, 4, 8) == simd::kNotFound);
  const std::uint64_t w[] = {4, 2, 9, 2};
  CHECK(simd::scalar::argmin_u64(w, 4) == 1);
  const std::uint32_t addrs[] = {0x1234567F, 0x40};
  std::uint32_t out[2];
  simd::scalar::sector_bases(addrs, 2, out);
  CHECK(out[0] == 0x12345640);
  CHECK(out[1] == 0x40);
  const std::uint64_t p[] = {1, 2, 3}, q[] = {1, 2, 4};
  CHECK(simd::scalar::first_mismatch_u64(p, q, 3) == 2);
  CHECK(simd::scalar::first_mismatch_u64(p, p, 3) == 3);
}

TEST_CASE("dispatch picks an available ISA") {
  CHECK(simd::isa_available(simd::active_isa()));
  CHECK(simd::isa_available(simd::Isa::scalar));
}
