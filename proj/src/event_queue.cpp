// Copyright 2026 The bicache Authors
// SPDX-License-Identifier: Apache-2.0

#include "bicache/event_queue.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace bicache {

void EventQueue::schedule(Cycle fire_cycle, EventKind kind, std::uint32_t target, std::uint64_t payload) {
  if (fire_cycle < now_) {
    throw std::logic_error("event scheduled in the past: cycle " + std::to_string(fire_cycle) + " < now " +
                           std::to_string(now_));
  }
  heap_.push(Event{fire_cycle, next_seq_++, kind, target, payload});
}

std::optional<Event> EventQueue::advance() {
  if (heap_.empty()) return std::nullopt;
  Event ev = heap_.top();
  heap_.pop();
  now_ = ev.fire_cycle;
  return ev;
}

std::optional<Event> EventQueue::advance_until(Cycle limit) {
  if (heap_.empty() || heap_.top().fire_cycle > limit) return std::nullopt;
  return advance();
}

void EventQueue::advance_clock(Cycle c) {
  if (c < now_) throw std::logic_error("clock moved backwards");
  if (!heap_.empty() && heap_.top().fire_cycle < c)
    throw std::logic_error("clock skipped over a pending event");
  now_ = c;
}

std::optional<Cycle> EventQueue::next_cycle() const {
  if (heap_.empty()) return std::nullopt;
  return heap_.top().fire_cycle;
}

Cycle Bus::acquire(BusDirection dir, Cycle earliest) {
  const int d = static_cast<int>(dir);
  const Cycle grant = std::max(earliest, busy_until_[d]);
  busy_until_[d] = grant + 1;
  ++transfers_[d];
  return grant;
}

}  // namespace bicache
