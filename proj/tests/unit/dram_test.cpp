// Copyright 2026 The bicache Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <map>
#include <random>
#include <vector>

#include "bicache/dram.hpp"

using namespace bicache;

namespace {

struct Recorder : MemoryClient {
  std::vector<MemoryRequest> reads;
  std::vector<MemoryRequest> writes;
  std::map<Cycle, std::uint32_t> delivered_at;
  void on_read_delivered(const MemoryRequest& r, Cycle now) override {
    reads.push_back(r);
    delivered_at[now] += 1;
  }
  void on_write_completed(const MemoryRequest& r, Cycle) override { writes.push_back(r); }
};

struct Rig {
  SimConfig cfg;
  SectorDirectory dir;
  VersionImage mem{dir};
  EventQueue events;
  Bus bus;
  MemoryController mc;
  Recorder rec;

  explicit Rig(SimConfig c = {}) : cfg(c), mc(cfg, events, bus, mem) { mc.set_client(&rec); }
  void run() {
    while (auto ev = events.advance()) mc.handle(*ev);
  }
};

PhysAddr dram(std::uint32_t row, std::uint32_t bank, std::uint32_t col) {
  return recompose(DramCoord{row, bank, col, 0});
}

}  // namespace

TEST_CASE("service latency by row state") {
  const SimConfig cfg;
  CHECK(service_latency(3u, 3, cfg) == 11);
  CHECK(service_latency(std::nullopt, 3, cfg) == 39);
  CHECK(service_latency(2u, 3, cfg) == 50);
}

TEST_CASE("same bank, same row, arriving together: 39 then 11") {
  Rig r;
  r.mc.submit_read(RequestKind::demand_read, dram(4, 2, 0), FillDest::white_fill, 100);
  r.mc.submit_read(RequestKind::demand_read, dram(4, 2, 1), FillDest::white_fill, 100);
  r.run();
  REQUIRE(r.rec.reads.size() == 2);
  CHECK(r.rec.reads[0].complete_cycle == 139);
  CHECK(r.rec.reads[1].complete_cycle == 150);
  CHECK(r.mc.counters().ras == 1);
  CHECK(r.mc.counters().cas == 2);
  CHECK(r.mc.counters().pre == 0);
}

TEST_CASE("different banks complete in parallel") {
  Rig r;
  r.mc.submit_read(RequestKind::demand_read, dram(4, 0, 0), FillDest::white_fill, 100);
  r.mc.submit_read(RequestKind::demand_read, dram(4, 5, 0), FillDest::white_fill, 100);
  r.run();
  REQUIRE(r.rec.reads.size() == 2);
  CHECK(r.rec.reads[0].complete_cycle == 139);
  CHECK(r.rec.reads[1].complete_cycle == 139);
  // One memory-to-cache bus slot each: deliveries at 140 and 141.
  CHECK(r.rec.delivered_at.at(140) == 1);
  CHECK(r.rec.delivered_at.at(141) == 1);
}

TEST_CASE("row conflict costs precharge, activate and access") {
  Rig r;
  r.mc.submit_read(RequestKind::demand_read, dram(4, 1, 0), FillDest::white_fill, 0);
  r.mc.submit_read(RequestKind::demand_read, dram(5, 1, 0), FillDest::white_fill, 0);
  r.run();
  CHECK(r.rec.reads[0].complete_cycle == 39);
  CHECK(r.rec.reads[1].complete_cycle == 89);
  CHECK(r.mc.counters().ras == 2);
  CHECK(r.mc.counters().pre == 1);
}

TEST_CASE("write-back crosses the bus, then a later read waits behind it") {
  Rig r;
  r.mc.submit_write_back(dram(1, 3, 0), 77, DrainOwner{}, 10);
  r.mc.submit_read(RequestKind::demand_read, dram(1, 3, 1), FillDest::white_fill, 11);
  r.run();
  REQUIRE(r.rec.writes.size() == 1);
  CHECK(r.rec.writes[0].complete_cycle == 11 + 39);
  CHECK(r.rec.reads[0].complete_cycle == 50 + 11);
  CHECK(r.mem.read(dram(1, 3, 0)) == 77);
  CHECK(r.mc.counters().ras_by_kind[static_cast<int>(RequestKind::write_back)] == 1);
}

TEST_CASE("reads return the memory version at bank completion") {
  Rig r;
  r.mem.write(dram(0, 0, 9), 5);
  r.mc.submit_read(RequestKind::demand_read, dram(0, 0, 9), FillDest::white_fill, 0);
  r.run();
  CHECK(r.rec.reads[0].version == 5);
}

TEST_CASE("banks serve requests in arrival order") {
  std::mt19937 rng(31);
  Rig r;
  std::map<std::uint32_t, std::vector<Cycle>> arrivals;  // bank -> arrival of each served read, in order
  for (int i = 0; i < 2000; ++i) {
    const std::uint32_t bank = rng() % 8;
    r.mc.submit_read(RequestKind::demand_read, dram(rng() % 4, bank, rng() % 256), FillDest::white_fill,
                     rng() % 5000);
  }
  r.run();
  REQUIRE(r.rec.reads.size() == 2000);
  std::map<std::uint32_t, std::vector<std::pair<Cycle, Cycle>>> per_bank;
  for (const auto& q : r.rec.reads)
    per_bank[decompose_dram(q.sector).bank].emplace_back(q.complete_cycle, q.arrival_cycle);
  for (auto& [bank, v] : per_bank) {
    std::sort(v.begin(), v.end());
    for (std::size_t i = 1; i < v.size(); ++i) REQUIRE(v[i - 1].second <= v[i].second);
  }
  CHECK(r.mc.counters().ras == r.mc.counters().ras_by_kind[0] + r.mc.counters().ras_by_kind[1] +
                                    r.mc.counters().ras_by_kind[2]);
}

TEST_CASE("prefetch follows a vector fill while the bank is idle") {
  SimConfig cfg;
  cfg.prefetch = PrefetchMode::on;
  Rig r(cfg);
  const PhysAddr s3 = recompose(VectorIndex{0x123, 3, 0});
  r.mc.submit_read(RequestKind::demand_read, s3, FillDest::vector_line_fill, 0);
  // Run the demand to bank completion only.
  while (auto ev = r.events.advance()) {
    r.mc.handle(*ev);
    if (ev->kind == EventKind::bank_complete) break;
  }
  const auto pf = r.mc.inflight_prefetch(recompose(VectorIndex{0x123, 4, 0}));
  REQUIRE(pf);
  r.run();
  CHECK(r.mc.counters().prefetches_issued >= 1);
  // The prefetch hits the open row.
  bool saw = false;
  for (const auto& q : r.rec.reads) {
    if (q.kind == RequestKind::prefetch_read && q.sector == recompose(VectorIndex{0x123, 4, 0})) {
      CHECK(q.complete_cycle == 39 + 11);
      saw = true;
    }
  }
  CHECK(saw);
}

TEST_CASE("no prefetch past the last sector of a line") {
  SimConfig cfg;
  cfg.prefetch = PrefetchMode::on;
  Rig r(cfg);
  r.mc.submit_read(RequestKind::demand_read, recompose(VectorIndex{0x40, 15, 0}), FillDest::vector_line_fill, 0);
  r.run();
  CHECK(r.mc.counters().prefetches_issued == 0);
}

TEST_CASE("scalar and white fills never trigger prefetch") {
  SimConfig cfg;
  cfg.prefetch = PrefetchMode::on;
  Rig r(cfg);
  r.mc.submit_read(RequestKind::demand_read, recompose(VectorIndex{0x40, 2, 0}), FillDest::scalar_fill, 0);
  r.mc.submit_read(RequestKind::demand_read, recompose(VectorIndex{0x80, 2, 0}), FillDest::white_fill, 0);
  r.run();
  CHECK(r.mc.counters().prefetches_issued == 0);
}

TEST_CASE("prefetch off creates no prefetch requests") {
  Rig r;
  for (std::uint32_t s = 0; s < 16; ++s)
    r.mc.submit_read(RequestKind::demand_read, recompose(VectorIndex{0x55, s, 0}), FillDest::vector_line_fill,
                     s * 100);
  r.run();
  CHECK(r.mc.counters().prefetches_issued == 0);
  CHECK(r.mc.counters().ras_by_kind[static_cast<int>(RequestKind::prefetch_read)] == 0);
}

TEST_CASE("a demand arriving during a prefetch queues behind it") {
  SimConfig cfg;
  cfg.prefetch = PrefetchMode::on;
  Rig r(cfg);
  const PhysAddr s0 = recompose(VectorIndex{0x200, 0, 0});
  r.mc.submit_read(RequestKind::demand_read, s0, FillDest::vector_line_fill, 0);
  while (auto ev = r.events.advance()) {
    r.mc.handle(*ev);
    if (ev->kind == EventKind::bank_complete) break;
  }
  REQUIRE(r.mc.inflight_prefetch(recompose(VectorIndex{0x200, 1, 0})));
  const PhysAddr other = recompose(VectorIndex{0x200, 9, 0});
  r.mc.submit_read(RequestKind::demand_read, other, FillDest::scalar_fill, r.events.now());
  r.run();
  Cycle pf_done = 0, demand_done = 0;
  for (const auto& q : r.rec.reads) {
    if (q.kind == RequestKind::prefetch_read && q.sector == recompose(VectorIndex{0x200, 1, 0})) pf_done = q.complete_cycle;
    if (q.sector == other) demand_done = q.complete_cycle;
  }
  CHECK(pf_done == 50);
  CHECK(demand_done == 61);
}
