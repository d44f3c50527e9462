// Copyright 2026 The bicache Authors
// SPDX-License-Identifier: Apache-2.0

#include "bicache/vector_cache.hpp"

#include <limits>
#include <stdexcept>

#include "bicache/simd/kernels.hpp"

namespace bicache {

namespace {
constexpr std::uint64_t kNotRegular = std::numeric_limits<std::uint64_t>::max();
}

VectorCache::VectorCache(std::uint32_t lines, std::uint32_t sectors_per_line, std::uint32_t wb_capacity)
    : spl_(sectors_per_line), wb_capacity_(wb_capacity), lines_(lines), tags_(lines, kInvalidTag),
      lru_keys_(lines, kNotRegular), versions_(std::size_t{lines} * sectors_per_line, 0) {}

int VectorCache::find(std::uint32_t tag) const {
  return static_cast<int>(simd::find_u32(tags_, tag));
}

void VectorCache::set_mode(int i, Mode m) {
  Line& l = lines_[static_cast<std::size_t>(i)];
  if (l.mode == Mode::wb) --wb_count_;
  if (m == Mode::wb) ++wb_count_;
  l.mode = m;
  lru_keys_[static_cast<std::size_t>(i)] = m == Mode::regular ? l.last_use : kNotRegular;
}

void VectorCache::touch(int i) {
  Line& l = lines_[static_cast<std::size_t>(i)];
  l.last_use = ++clock_;
  if (l.mode == Mode::regular) lru_keys_[static_cast<std::size_t>(i)] = l.last_use;
}

VectorCache::LookupResult VectorCache::lookup(PhysAddr addr, Intent intent) {
  const auto idx = index(addr);
  LookupResult r;
  r.sector = idx.sector;
  r.line = find(idx.tag);
  if (r.line < 0) return r;
  Line& l = lines_[static_cast<std::size_t>(r.line)];
  const std::uint32_t bit = 1u << idx.sector;
  const bool valid = (l.valid_mask & bit) != 0;
  if (l.mode == Mode::wb) {
    r.kind = valid ? Lookup::wb_hit : Lookup::line_hit_sector_miss;
    return r;
  }
  if (!valid) {
    r.kind = Lookup::line_hit_sector_miss;
    return r;
  }
  r.kind = Lookup::sector_hit;
  touch(r.line);
  if (intent == Intent::write) l.dirty_mask |= bit;
  if (l.prefetched_mask & bit) {
    r.was_prefetched = true;
    l.prefetched_mask &= ~bit;
  }
  return r;
}

bool VectorCache::sector_valid(PhysAddr addr) const {
  const auto idx = index(addr);
  const int i = find(idx.tag);
  return i >= 0 && (lines_[static_cast<std::size_t>(i)].valid_mask & (1u << idx.sector)) != 0;
}

VectorCache::Allocation VectorCache::allocate(std::uint32_t tag) {
  if (find(tag) >= 0) throw std::logic_error("vector cache allocate of a resident tag");
  Allocation a;
  for (;;) {
    const auto free_slot = simd::find_u32(tags_, kInvalidTag);
    if (free_slot != simd::kNotFound) {
      a.line = static_cast<int>(free_slot);
      break;
    }
    const int v = static_cast<int>(simd::argmin_u64(lru_keys_));
    Line& victim = lines_[static_cast<std::size_t>(v)];
    if (victim.mode != Mode::regular) {
      // Every line is a WB line; only a drain can make room.
      a.stalled = true;
      return a;
    }
    if (victim.dirty_mask == 0) {
      a.victims.push_back(Victim{victim.tag, 0, false});
      a.line = v;
      break;
    }
    if (wb_count_ >= wb_capacity_) {
      a.stalled = true;
      return a;
    }
    a.victims.push_back(Victim{victim.tag, victim.dirty_mask, true});
    victim.prefetched_mask = 0;
    victim.wb_order = ++wb_seq_;
    victim.draining = false;
    set_mode(v, Mode::wb);
  }
  Line& l = lines_[static_cast<std::size_t>(a.line)];
  l = Line{};
  l.tag = tag;
  l.last_use = ++clock_;
  tags_[static_cast<std::size_t>(a.line)] = tag;
  set_mode(a.line, Mode::regular);
  return a;
}

void VectorCache::install_sector(int i, std::uint32_t sector, bool dirty, std::uint64_t version) {
  if (i < 0 || lines_[static_cast<std::size_t>(i)].mode != Mode::regular)
    throw std::logic_error("install_sector into a line that is not a regular line");
  Line& l = lines_[static_cast<std::size_t>(i)];
  const std::uint32_t bit = 1u << sector;
  l.valid_mask |= bit;
  if (dirty) l.dirty_mask |= bit;
  l.prefetched_mask &= ~bit;
  set_version(i, sector, version);
}

void VectorCache::restore(int i) {
  if (lines_[static_cast<std::size_t>(i)].mode != Mode::wb)
    throw std::logic_error("restore of a line that is not flagged WB");
  lines_[static_cast<std::size_t>(i)].draining = false;
  lines_[static_cast<std::size_t>(i)].last_use = ++clock_;
  set_mode(i, Mode::regular);
}

int VectorCache::wb_oldest() const {
  int best = -1;
  for (std::size_t i = 0; i < lines_.size(); ++i) {
    if (lines_[i].mode == Mode::wb && (best < 0 || lines_[i].wb_order < lines_[static_cast<std::size_t>(best)].wb_order))
      best = static_cast<int>(i);
  }
  return best;
}

int VectorCache::wb_oldest_idle() const {
  int best = -1;
  for (std::size_t i = 0; i < lines_.size(); ++i) {
    const Line& l = lines_[i];
    if (l.mode == Mode::wb && !l.draining &&
        (best < 0 || l.wb_order < lines_[static_cast<std::size_t>(best)].wb_order))
      best = static_cast<int>(i);
  }
  return best;
}

VectorCache::Fill VectorCache::prefetch_fill(std::uint32_t tag, std::uint32_t sector, std::uint64_t version) {
  const int i = find(tag);
  if (i < 0) return Fill::rejected;
  Line& l = lines_[static_cast<std::size_t>(i)];
  const std::uint32_t bit = 1u << sector;
  if (l.mode != Mode::regular || (l.valid_mask & bit) != 0) return Fill::rejected;
  l.valid_mask |= bit;
  l.prefetched_mask |= bit;
  set_version(i, sector, version);
  return Fill::filled;
}

void VectorCache::free_line(int i) {
  set_mode(i, Mode::invalid);
  lines_[static_cast<std::size_t>(i)] = Line{};
  tags_[static_cast<std::size_t>(i)] = kInvalidTag;
  lru_keys_[static_cast<std::size_t>(i)] = kNotRegular;
}

void VectorCache::mark_clean(int i, std::uint32_t sector) {
  lines_[static_cast<std::size_t>(i)].dirty_mask &= ~(1u << sector);
}

void VectorCache::set_dirty(int i, std::uint32_t sector) {
  lines_[static_cast<std::size_t>(i)].dirty_mask |= 1u << sector;
}

std::optional<std::uint32_t> VectorCache::lru_rank(std::uint32_t tag) const {
  const int i = find(tag);
  if (i < 0 || lines_[static_cast<std::size_t>(i)].mode != Mode::regular) return std::nullopt;
  const std::uint64_t mine = lines_[static_cast<std::size_t>(i)].last_use;
  std::uint32_t rank = 0;
  for (const auto& l : lines_) {
    if (l.mode == Mode::regular && l.last_use > mine) ++rank;
  }
  return rank;
}

}  // namespace bicache
