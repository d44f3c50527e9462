// Copyright 2026 The bicache Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "bicache/address.hpp"
#include "bicache/set_assoc_cache.hpp"

namespace bicache {

/// Fully associative cache of long sectored lines. The write buffer is embedded:
/// an evicted dirty line is flagged WB in place and keeps its slot until it
/// drains or is referenced again.
class VectorCache {
 public:
  enum class Lookup { sector_hit, line_hit_sector_miss, wb_hit, miss };
  enum class Mode : std::uint8_t { invalid, regular, wb };
  enum class Fill { filled, rejected };

  struct Line {
    std::uint32_t tag = kInvalidTag;
    Mode mode = Mode::invalid;
    std::uint32_t valid_mask = 0;
    std::uint32_t dirty_mask = 0;
    std::uint32_t prefetched_mask = 0;  // filled by prefetch, not yet referenced
    std::uint64_t last_use = 0;
    std::uint64_t wb_order = 0;
    bool draining = false;
  };

  struct LookupResult {
    Lookup kind = Lookup::miss;
    int line = -1;
    std::uint32_t sector = 0;
    bool was_prefetched = false;  // first reference to a prefetched sector
  };

  struct Victim {
    std::uint32_t tag = 0;
    std::uint32_t dirty_mask = 0;
    bool flagged = false;  // true: became a WB line; false: dropped clean
  };

  struct Allocation {
    bool stalled = false;
    int line = -1;
    std::vector<Victim> victims;
  };

  VectorCache(std::uint32_t lines, std::uint32_t sectors_per_line, std::uint32_t wb_capacity);

  std::uint32_t num_lines() const { return static_cast<std::uint32_t>(lines_.size()); }
  std::uint32_t sectors_per_line() const { return spl_; }
  std::uint32_t wb_capacity() const { return wb_capacity_; }
  std::uint32_t wb_count() const { return wb_count_; }
  std::uint32_t full_mask() const { return spl_ == 32 ? 0xFFFFFFFFu : (1u << spl_) - 1; }

  VectorIndex index(PhysAddr a) const { return decompose_vector(a, spl_); }
  PhysAddr sector_addr(std::uint32_t tag, std::uint32_t sector) const {
    return recompose(VectorIndex{tag, sector, 0}, spl_);
  }

  /// Native lookup. A sector hit on a regular line becomes MRU and is dirtied on write.
  /// A tag match on a WB line reports wb_hit when the sector is valid and
  /// line_hit_sector_miss otherwise; neither changes state.
  LookupResult lookup(PhysAddr addr, Intent intent);

  /// Line index holding `tag` in any mode, or -1.
  int find(std::uint32_t tag) const;

  /// Valid in a regular or WB line.
  bool sector_valid(PhysAddr addr) const;

  /// Finds a slot for `tag`. Clean LRU victims are dropped, dirty ones are flagged WB
  /// while the buffer has room; otherwise the allocation stalls with no slot.
  /// Throws if `tag` is already present.
  Allocation allocate(std::uint32_t tag);

  /// Marks `sector` valid (and dirty on writes). Throws unless `line` is a regular line.
  void install_sector(int line, std::uint32_t sector, bool dirty, std::uint64_t version);

  /// Flips a WB line back to regular, MRU, with its masks intact.
  void restore(int line);

  /// Oldest WB line, or -1.
  int wb_oldest() const;
  /// Oldest WB line whose drain has not started, or -1.
  int wb_oldest_idle() const;

  /// Memory-side fill: only into an existing regular line whose sector is invalid.
  /// Sets the sector valid and clean without touching LRU state.
  Fill prefetch_fill(std::uint32_t tag, std::uint32_t sector, std::uint64_t version);

  /// Releases a drained WB line.
  void free_line(int line);

  /// Clears a dirty bit after its data has been written back.
  void mark_clean(int line, std::uint32_t sector);

  void touch(int line);
  void set_dirty(int line, std::uint32_t sector);
  void set_draining(int line) { lines_[static_cast<std::size_t>(line)].draining = true; }

  const Line& line(int i) const { return lines_[static_cast<std::size_t>(i)]; }
  std::uint64_t version(int line, std::uint32_t sector) const {
    return versions_[static_cast<std::size_t>(line) * spl_ + sector];
  }
  void set_version(int line, std::uint32_t sector, std::uint64_t v) {
    versions_[static_cast<std::size_t>(line) * spl_ + sector] = v;
  }

  /// 0 = MRU among regular lines; nullopt when `tag` is not a regular line.
  std::optional<std::uint32_t> lru_rank(std::uint32_t tag) const;

 private:
  void set_mode(int line, Mode m);

  std::uint32_t spl_;
  std::uint32_t wb_capacity_;
  std::uint32_t wb_count_ = 0;
  std::vector<Line> lines_;
  std::vector<std::uint32_t> tags_;      // kInvalidTag for free lines
  std::vector<std::uint64_t> lru_keys_;  // last_use for regular lines, UINT64_MAX otherwise
  std::vector<std::uint64_t> versions_;
  std::uint64_t clock_ = 0;
  std::uint64_t wb_seq_ = 0;
};

}  // namespace bicache
