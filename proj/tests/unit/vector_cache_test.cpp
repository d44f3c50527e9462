// Copyright 2026 The bicache Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <stdexcept>

#include <list>
#include <map>
#include <random>
#include <set>

#include "bicache/vector_cache.hpp"

using namespace bicache;

namespace {

PhysAddr sector_of(std::uint32_t tag, std::uint32_t sector) { return recompose(VectorIndex{tag, sector, 0}); }

// Fills every line with a regular line; tags 100.. in allocation order, dirty when asked.
void fill(VectorCache& vc, bool dirty) {
  for (std::uint32_t t = 0; t < vc.num_lines(); ++t) {
    const auto a = vc.allocate(100 + t);
    REQUIRE_FALSE(a.stalled);
    vc.install_sector(a.line, 0, dirty, 0);
  }
}

std::multiset<std::pair<std::uint32_t, int>> tags_and_modes(const VectorCache& vc) {
  std::multiset<std::pair<std::uint32_t, int>> out;
  for (std::uint32_t i = 0; i < vc.num_lines(); ++i) {
    const auto& l = vc.line(static_cast<int>(i));
    out.emplace(l.tag, static_cast<int>(l.mode));
  }
  return out;
}

}  // namespace

TEST_CASE("lookup kinds") {
  VectorCache vc(64, 16, 8);
  CHECK(vc.lookup(sector_of(5, 0), Intent::read).kind == VectorCache::Lookup::miss);
  const auto a = vc.allocate(5);
  vc.install_sector(a.line, 0, false, 0);
  CHECK(vc.lookup(sector_of(5, 0), Intent::read).kind == VectorCache::Lookup::sector_hit);
  CHECK(vc.lookup(sector_of(5, 5), Intent::read).kind == VectorCache::Lookup::line_hit_sector_miss);
  vc.lookup(sector_of(5, 0), Intent::write);
  CHECK(vc.line(a.line).dirty_mask == 1u);
}

TEST_CASE("allocation takes a free line before evicting") {
  VectorCache vc(64, 16, 8);
  for (std::uint32_t t = 0; t < 63; ++t) vc.allocate(t);
  const auto a = vc.allocate(63);
  CHECK_FALSE(a.stalled);
  CHECK(a.victims.empty());
}

TEST_CASE("dirty LRU victim is flagged WB in place and the next clean LRU line is reused") {
  VectorCache vc(64, 16, 8);
  fill(vc, false);
  vc.set_dirty(vc.find(100), 0);
  const int flagged_slot = vc.find(100);
  const auto a = vc.allocate(999);
  REQUIRE_FALSE(a.stalled);
  REQUIRE(a.victims.size() == 2);
  CHECK(a.victims[0].tag == 100);
  CHECK(a.victims[0].flagged);
  CHECK(a.victims[1].tag == 101);
  CHECK_FALSE(a.victims[1].flagged);
  CHECK(vc.wb_count() == 1);
  CHECK(vc.find(100) == flagged_slot);
  CHECK(vc.line(flagged_slot).mode == VectorCache::Mode::wb);
  std::uint32_t regular = 0;
  for (std::uint32_t i = 0; i < 64; ++i) regular += vc.line(static_cast<int>(i)).mode == VectorCache::Mode::regular;
  CHECK(regular == 63);
}

TEST_CASE("all-dirty cache flags up to the buffer capacity, then stalls") {
  VectorCache vc(64, 16, 8);
  fill(vc, true);
  const auto s = vc.allocate(2000);
  CHECK(s.stalled);
  CHECK(s.line < 0);
  CHECK(s.victims.size() == 8);
  CHECK(vc.wb_count() == 8);
  const int oldest = vc.wb_oldest();
  REQUIRE(oldest >= 0);
  CHECK(vc.line(oldest).tag == 100);
  vc.free_line(oldest);
  const auto ok = vc.allocate(2000);
  CHECK_FALSE(ok.stalled);
  CHECK(ok.line == oldest);
}

TEST_CASE("restore keeps the masks and makes the line MRU") {
  VectorCache vc(4, 16, 2);
  for (std::uint32_t t = 0; t < 4; ++t) {
    const auto a = vc.allocate(t);
    for (std::uint32_t s = 0; s < 5; ++s) vc.install_sector(a.line, s, t == 0, 1);
  }
  vc.allocate(10);
  const int l = vc.find(0);
  REQUIRE(vc.line(l).mode == VectorCache::Mode::wb);
  CHECK(vc.lookup(sector_of(0, 2), Intent::read).kind == VectorCache::Lookup::wb_hit);
  CHECK(vc.lookup(sector_of(0, 9), Intent::read).kind == VectorCache::Lookup::line_hit_sector_miss);
  vc.restore(l);
  CHECK(vc.line(l).mode == VectorCache::Mode::regular);
  CHECK(vc.line(l).dirty_mask == 0x1Fu);  // all five dirty sectors survive
  CHECK(vc.line(l).valid_mask == 0x1Fu);
  CHECK(vc.lru_rank(0) == 0u);
  CHECK(vc.wb_count() == 0);
  CHECK_THROWS_AS(vc.restore(l), std::logic_error);
}

TEST_CASE("installing a sector twice is idempotent on the valid mask") {
  VectorCache vc(4, 16, 2);
  const auto a = vc.allocate(1);
  vc.install_sector(a.line, 3, false, 0);
  vc.install_sector(a.line, 3, false, 0);
  CHECK(vc.line(a.line).valid_mask == 0x8u);
  CHECK_THROWS_AS(vc.install_sector(-1, 0, false, 0), std::logic_error);
}

TEST_CASE("write buffer lines are ordered FIFO") {
  VectorCache vc(4, 16, 3);
  for (std::uint32_t t = 0; t < 4; ++t) vc.install_sector(vc.allocate(t).line, 0, t < 2, 0);
  const auto a = vc.allocate(10);  // flags 0 then 1, reuses clean 2
  REQUIRE(a.victims.size() == 3);
  CHECK(vc.line(vc.wb_oldest()).tag == 0);
  vc.set_draining(vc.wb_oldest());
  CHECK(vc.line(vc.wb_oldest_idle()).tag == 1);
}

TEST_CASE("prefetch fill rules") {
  VectorCache vc(2, 16, 1);
  const auto a = vc.allocate(7);
  vc.install_sector(a.line, 3, false, 0);
  CHECK(vc.prefetch_fill(7, 4, 0) == VectorCache::Fill::filled);
  CHECK(vc.prefetch_fill(7, 4, 0) == VectorCache::Fill::rejected);
  CHECK(vc.prefetch_fill(7, 3, 0) == VectorCache::Fill::rejected);
  CHECK(vc.prefetch_fill(8, 0, 0) == VectorCache::Fill::rejected);
  CHECK(vc.line(a.line).dirty_mask == 0u);
  const auto r = vc.lookup(sector_of(7, 4), Intent::read);
  CHECK(r.was_prefetched);
  CHECK_FALSE(vc.lookup(sector_of(7, 4), Intent::read).was_prefetched);
}

TEST_CASE("prefetch fill into a WB line is rejected") {
  VectorCache vc(1, 16, 1);
  vc.install_sector(vc.allocate(1).line, 0, true, 0);
  vc.allocate(2);
  CHECK(vc.prefetch_fill(1, 1, 0) == VectorCache::Fill::rejected);
}

TEST_CASE("prefetch fill never changes resident tags or LRU order") {
  std::mt19937 rng(23);
  VectorCache vc(64, 16, 8);
  for (int i = 0; i < 20000; ++i) {
    const std::uint32_t tag = rng() % 96;
    const std::uint32_t sector = rng() % 16;
    if (rng() % 2) {
      const auto before = tags_and_modes(vc);
      std::map<std::uint32_t, std::optional<std::uint32_t>> ranks;
      for (std::uint32_t t = 0; t < 96; ++t) ranks[t] = vc.lru_rank(t);
      const int li = vc.find(tag);
      const std::uint32_t valid_before = li >= 0 ? vc.line(li).valid_mask : 0;
      vc.prefetch_fill(tag, sector, 0);
      REQUIRE(tags_and_modes(vc) == before);
      for (std::uint32_t t = 0; t < 96; ++t) REQUIRE(vc.lru_rank(t) == ranks[t]);
      if (li >= 0) REQUIRE((vc.line(li).valid_mask & valid_before) == valid_before);
      continue;
    }
    const auto r = vc.lookup(sector_of(tag, sector), Intent::write);
    if (r.kind == VectorCache::Lookup::wb_hit || (r.kind == VectorCache::Lookup::line_hit_sector_miss &&
                                                  vc.line(r.line).mode == VectorCache::Mode::wb)) {
      vc.restore(r.line);
    }
    int line = vc.find(tag);
    if (line < 0) {
      auto a = vc.allocate(tag);
      while (a.stalled) {
        vc.free_line(vc.wb_oldest());
        a = vc.allocate(tag);
      }
      line = a.line;
    }
    vc.install_sector(line, sector, true, 0);
    vc.touch(line);
    REQUIRE(vc.wb_count() <= 8);
  }
}

TEST_CASE("regular-line LRU matches a reference list") {
  std::mt19937 rng(29);
  VectorCache vc(8, 16, 8);
  std::list<std::uint32_t> lru;  // front = MRU, clean lines only
  for (int i = 0; i < 20000; ++i) {
    const std::uint32_t tag = rng() % 13;
    const auto r = vc.lookup(sector_of(tag, 0), Intent::read);
    auto it = std::find(lru.begin(), lru.end(), tag);
    if (it != lru.end()) {
      REQUIRE(r.kind == VectorCache::Lookup::sector_hit);
      lru.erase(it);
      lru.push_front(tag);
      continue;
    }
    REQUIRE(r.kind == VectorCache::Lookup::miss);
    std::optional<std::uint32_t> expected;
    if (lru.size() == 8) {
      expected = lru.back();
      lru.pop_back();
    }
    const auto a = vc.allocate(tag);
    vc.install_sector(a.line, 0, false, 0);
    REQUIRE(a.victims.size() == (expected ? 1u : 0u));
    if (expected) REQUIRE(a.victims[0].tag == *expected);
    lru.push_front(tag);
  }
}
