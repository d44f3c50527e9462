// Copyright 2026 The bicache Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <queue>
#include <vector>

#include "bicache/config.hpp"

namespace bicache {

enum class EventKind : std::uint8_t {
  bank_arrival,   // a request reaches its bank queue
  bank_complete,  // a bank finishes the request in service
  bus_deliver,    // read data lands in the cache after its bus slot
};

struct Event {
  Cycle fire_cycle = 0;
  std::uint64_t seq = 0;
  EventKind kind = EventKind::bank_arrival;
  std::uint32_t target = 0;   // bank or request id, depending on kind
  std::uint64_t payload = 0;
};

/// Simulation clock and pending-event set. Events with the same cycle fire in
/// insertion order; the clock never moves backwards.
class EventQueue {
 public:
  Cycle now() const { return now_; }
  bool empty() const { return heap_.empty(); }
  std::size_t size() const { return heap_.size(); }

  /// Throws std::logic_error when `fire_cycle` is earlier than now().
  void schedule(Cycle fire_cycle, EventKind kind, std::uint32_t target = 0, std::uint64_t payload = 0);

  /// Pops the next event and moves the clock to it; nullopt when nothing is pending.
  std::optional<Event> advance();

  /// Next event only if it fires at or before `limit`.
  std::optional<Event> advance_until(Cycle limit);

  /// Moves the clock forward with no event. Throws if `c` < now().
  void advance_clock(Cycle c);

  std::optional<Cycle> next_cycle() const;

 private:
  struct Later {
    bool operator()(const Event& a, const Event& b) const {
      return a.fire_cycle != b.fire_cycle ? a.fire_cycle > b.fire_cycle : a.seq > b.seq;
    }
  };
  std::priority_queue<Event, std::vector<Event>, Later> heap_;
  Cycle now_ = 0;
  std::uint64_t next_seq_ = 0;
};

enum class BusDirection : std::uint8_t { to_memory = 0, to_cache = 1 };

/// The bi-directional cache<->memory bus. Each direction moves one sector per cycle.
class Bus {
 public:
  /// Reserves the first free slot at or after `earliest`; returns the grant cycle.
  Cycle acquire(BusDirection dir, Cycle earliest);
  Cycle busy_until(BusDirection dir) const { return busy_until_[static_cast<int>(dir)]; }
  std::uint64_t transfers(BusDirection dir) const { return transfers_[static_cast<int>(dir)]; }

 private:
  std::array<Cycle, 2> busy_until_{0, 0};
  std::array<std::uint64_t, 2> transfers_{0, 0};
};

}  // namespace bicache
