// Copyright 2026 The bicache Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "bicache/address.hpp"

namespace bicache {

inline constexpr std::uint32_t kInvalidTag = 0xFFFFFFFFu;

enum class Intent : std::uint8_t { read, write };

/// A dirty sector evicted from a cache line, carrying its data version.
struct EvictedSector {
  PhysAddr sector;
  bool dirty = false;
  std::uint64_t version = 0;
};

/// FIFO write buffer with whole-sector entries, disjoint from the cache array.
/// Used by both the Scalar Cache and the white cache.
class WriteBuffer {
 public:
  struct Entry {
    PhysAddr sector;
    std::uint64_t version = 0;
    std::uint64_t id = 0;  // insertion sequence; oldest has the smallest id
    bool draining = false;
  };

  explicit WriteBuffer(std::uint32_t capacity);

  std::uint32_t capacity() const { return capacity_; }
  std::uint32_t size() const { return static_cast<std::uint32_t>(entries_.size()); }
  bool full() const { return size() >= capacity_; }
  bool empty() const { return entries_.empty(); }

  /// Appends at the FIFO tail. Inserting into a full buffer throws std::logic_error.
  const Entry& insert(PhysAddr sector, std::uint64_t version);
  /// Removes and returns the FIFO head. Throws when empty.
  Entry remove_oldest();
  /// Removes a specific entry (restoration or drain completion). Throws if absent.
  Entry remove(PhysAddr sector);

  const Entry* find(PhysAddr sector) const;
  Entry* find(PhysAddr sector);
  Entry* find_id(std::uint64_t id);
  /// Oldest entry whose drain has not started yet.
  Entry* oldest_idle();
  const std::vector<Entry>& entries() const { return entries_; }

 private:
  std::uint32_t capacity_;
  std::vector<Entry> entries_;          // FIFO order
  std::vector<std::uint32_t> sectors_;  // parallel to entries_, for the tag search kernel
  std::uint64_t next_id_ = 1;
};

/// Set-associative cache with one sector per line, true LRU and a disjoint write buffer.
/// Timing lives in the controllers; this class is state only.
class SetAssocCache {
 public:
  enum class Lookup { hit, wb_hit, miss };

  struct Line {
    std::uint32_t tag = 0;
    bool valid = false;
    bool dirty = false;
    std::uint64_t last_use = 0;
    std::uint64_t version = 0;
  };

  SetAssocCache(std::uint32_t sets, std::uint32_t ways, std::uint32_t wb_capacity);

  std::uint32_t sets() const { return sets_; }
  std::uint32_t ways() const { return ways_; }

  /// Native lookup. A hit becomes MRU and is dirtied on write; everything else is untouched.
  Lookup lookup(PhysAddr addr, Intent intent);

  /// Presence check with no side effects (line or write buffer).
  bool contains(PhysAddr addr) const;
  bool line_present(PhysAddr addr) const;

  /// The line that install() would evict for `addr`, if its set is full.
  std::optional<EvictedSector> peek_victim(PhysAddr addr) const;

  /// Places `addr` as MRU. Precondition: not already present in the array.
  std::optional<EvictedSector> install(PhysAddr addr, bool dirty, std::uint64_t version);

  /// Drops `addr` from the array, returning its state; nullopt if absent.
  std::optional<EvictedSector> invalidate(PhysAddr addr);

  Line* find_line(PhysAddr addr);
  const Line* find_line(PhysAddr addr) const;

  /// 0 = MRU .. ways-1 = LRU among the valid lines of the set; nullopt if absent.
  std::optional<std::uint32_t> lru_rank(PhysAddr addr) const;

  WriteBuffer& wb() { return wb_; }
  const WriteBuffer& wb() const { return wb_; }

  /// Takes the buffered copy of `addr` back into the array as a dirty MRU line.
  /// May evict another line, which is returned to the caller.
  std::optional<EvictedSector> wb_restore(PhysAddr addr);

  template <typename Fn>
  void for_each_valid(Fn&& fn) {
    for (std::uint32_t s = 0; s < sets_; ++s) {
      for (std::uint32_t w = 0; w < ways_; ++w) {
        Line& l = lines_[s * ways_ + w];
        if (l.valid) fn(recompose(SetIndex{l.tag, s, 0}, sets_), l);
      }
    }
  }

 private:
  std::uint32_t way_of(std::uint32_t set, std::uint32_t tag) const;  // ways_ if absent

  std::uint32_t sets_;
  std::uint32_t ways_;
  std::vector<Line> lines_;
  std::vector<std::uint32_t> tags_;  // kInvalidTag for empty ways
  WriteBuffer wb_;
  std::uint64_t clock_ = 0;
};

}  // namespace bicache
