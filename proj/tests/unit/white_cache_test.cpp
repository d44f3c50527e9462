// Copyright 2026 The bicache Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <random>

#include "bicache/simulator.hpp"

using namespace bicache;

namespace {

SimConfig wc() {
  SimConfig c;
  c.hierarchy = HierarchyKind::white;
  return c;
}

SectorAccess at(std::uint32_t addr, Origin o, Intent i = Intent::read, bool full = false) {
  return SectorAccess{PhysAddr(addr).sector_base(), i, o, full};
}

}  // namespace

TEST_CASE("cold access is a miss with one demand read") {
  Simulator sim(wc());
  const auto c = sim.access(at(0x1000, Origin::scalar));
  CHECK(c.kind == AccessKind::miss);
  CHECK(c.latency() == 1 + 39 + 1);
  CHECK(sim.memory().counters().demand_reads == 1);
}

TEST_CASE("vector then scalar access to one sector hits") {
  Simulator sim(wc());
  sim.access(at(0x1000, Origin::vector));
  const auto c = sim.access(at(0x1000, Origin::scalar));
  CHECK(c.kind == AccessKind::native_hit);
  CHECK(c.latency() == 1);
}

TEST_CASE("stride-1 vector load over 16 sectors misses 16 times") {
  Simulator sim(wc());
  int misses = 0;
  for (std::uint32_t s = 0; s < 16; ++s) misses += sim.access(at(0x20000 + s * 64, Origin::vector)).kind == AccessKind::miss;
  CHECK(misses == 16);
}

TEST_CASE("white cache never reports a cross hit and matches the oracle") {
  SimOptions opts;
  opts.debug_checks = true;
  Simulator sim(wc(), opts);
  std::mt19937 rng(43);
  for (int i = 0; i < 100000; ++i) {
    const std::uint32_t addr = 0x100000 + (rng() % 8192) * 64;
    const Intent in = rng() % 3 == 0 ? Intent::write : Intent::read;
    const auto c = sim.access(at(addr, rng() % 2 ? Origin::scalar : Origin::vector, in, in == Intent::write && rng() % 2));
    REQUIRE(c.kind != AccessKind::cross_hit);
  }
  CHECK(sim.hierarchy().stats().cross_hits == 0);
  CHECK_NOTHROW(sim.finish());
}

TEST_CASE("write buffer drain starts at full occupancy") {
  Simulator sim(wc());
  // Five dirty tags per set over nine sets: eight victims fill the buffer, the ninth miss drains.
  for (std::uint32_t set = 0; set < 9; ++set) {
    for (std::uint32_t t = 0; t < 5; ++t) sim.access(at(recompose(SetIndex{t + 1, set, 0}, 512).value, Origin::scalar, Intent::write));
  }
  CHECK(sim.memory().counters().write_backs >= 1);
  CHECK_NOTHROW(sim.finish());
}
