// Copyright 2026 The bicache Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <stdexcept>

#include <algorithm>
#include <random>
#include <tuple>
#include <vector>

#include "bicache/event_queue.hpp"

using namespace bicache;

TEST_CASE("events dequeue by cycle") {
  EventQueue q;
  q.schedule(5, EventKind::bank_arrival, 5);
  q.schedule(3, EventKind::bank_arrival, 3);
  CHECK(q.advance()->target == 3);
  CHECK(q.now() == 3);
  CHECK(q.advance()->target == 5);
  CHECK_FALSE(q.advance().has_value());
}

TEST_CASE("same-cycle events fire in insertion order") {
  EventQueue q;
  q.schedule(0, EventKind::bank_arrival, 1);
  q.schedule(0, EventKind::bank_complete, 2);
  q.schedule(q.now(), EventKind::bus_deliver, 3);
  CHECK(q.advance()->target == 1);
  CHECK(q.advance()->target == 2);
  CHECK(q.advance()->target == 3);
}

TEST_CASE("clock jumps to the event") {
  EventQueue q;
  q.schedule(7, EventKind::bank_arrival);
  q.advance();
  CHECK(q.now() == 7);
  CHECK_THROWS_AS(q.schedule(6, EventKind::bank_arrival), std::logic_error);
  CHECK_THROWS_AS(q.advance_clock(6), std::logic_error);
}

TEST_CASE("advance_until respects the limit") {
  EventQueue q;
  q.schedule(10, EventKind::bank_arrival);
  CHECK_FALSE(q.advance_until(9).has_value());
  CHECK(q.now() == 0);
  CHECK(q.advance_until(10).has_value());
}

TEST_CASE("random events come out in full-sort order") {
  std::mt19937_64 rng(3);
  EventQueue q;
  std::vector<std::tuple<Cycle, std::uint32_t>> oracle;
  for (std::uint32_t i = 0; i < 10000; ++i) {
    const Cycle c = rng() % 500;
    q.schedule(c, EventKind::bank_arrival, i);
    oracle.emplace_back(c, i);
  }
  std::stable_sort(oracle.begin(), oracle.end(),
                   [](const auto& a, const auto& b) { return std::get<0>(a) < std::get<0>(b); });
  for (const auto& [c, id] : oracle) {
    const auto ev = q.advance();
    REQUIRE(ev);
    REQUIRE(ev->fire_cycle == c);
    REQUIRE(ev->target == id);
  }
  CHECK(q.empty());
}

TEST_CASE("clock never decreases over interleaved schedule and advance") {
  std::mt19937_64 rng(5);
  EventQueue q;
  Cycle last = 0;
  for (int i = 0; i < 20000; ++i) {
    if (rng() % 3) {
      q.schedule(q.now() + rng() % 50, EventKind::bank_arrival);
    } else if (auto ev = q.advance()) {
      REQUIRE(ev->fire_cycle >= last);
      REQUIRE(q.now() == ev->fire_cycle);
      last = ev->fire_cycle;
    }
  }
}

TEST_CASE("bus grants one sector per cycle per direction") {
  Bus b;
  CHECK(b.acquire(BusDirection::to_cache, 10) == 10);
  CHECK(b.busy_until(BusDirection::to_cache) == 11);
  CHECK(b.acquire(BusDirection::to_cache, 10) == 11);
  CHECK(b.acquire(BusDirection::to_memory, 10) == 10);
  CHECK(b.transfers(BusDirection::to_cache) == 2);
  CHECK(b.transfers(BusDirection::to_memory) == 1);
}
