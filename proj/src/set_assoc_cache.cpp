// Copyright 2026 The bicache Authors
// SPDX-License-Identifier: Apache-2.0

#include "bicache/set_assoc_cache.hpp"

#include <stdexcept>

#include "bicache/simd/kernels.hpp"

namespace bicache {

WriteBuffer::WriteBuffer(std::uint32_t capacity) : capacity_(capacity) {
  entries_.reserve(capacity);
  sectors_.reserve(capacity);
}

const WriteBuffer::Entry& WriteBuffer::insert(PhysAddr sector, std::uint64_t version) {
  if (full()) throw std::logic_error("write buffer insert while full");
  entries_.push_back(Entry{sector.sector_base(), version, next_id_++, false});
  sectors_.push_back(sector.sector_base().value);
  return entries_.back();
}

WriteBuffer::Entry WriteBuffer::remove_oldest() {
  if (entries_.empty()) throw std::logic_error("write buffer remove_oldest while empty");
  Entry e = entries_.front();
  entries_.erase(entries_.begin());
  sectors_.erase(sectors_.begin());
  return e;
}

WriteBuffer::Entry WriteBuffer::remove(PhysAddr sector) {
  const auto i = simd::find_u32(sectors_, sector.sector_base().value);
  if (i == simd::kNotFound) throw std::logic_error("write buffer remove of absent sector");
  Entry e = entries_[static_cast<std::size_t>(i)];
  entries_.erase(entries_.begin() + i);
  sectors_.erase(sectors_.begin() + i);
  return e;
}

const WriteBuffer::Entry* WriteBuffer::find(PhysAddr sector) const {
  const auto i = simd::find_u32(sectors_, sector.sector_base().value);
  return i == simd::kNotFound ? nullptr : &entries_[static_cast<std::size_t>(i)];
}

WriteBuffer::Entry* WriteBuffer::find(PhysAddr sector) {
  const auto i = simd::find_u32(sectors_, sector.sector_base().value);
  return i == simd::kNotFound ? nullptr : &entries_[static_cast<std::size_t>(i)];
}

WriteBuffer::Entry* WriteBuffer::find_id(std::uint64_t id) {
  for (auto& e : entries_) {
    if (e.id == id) return &e;
  }
  return nullptr;
}

WriteBuffer::Entry* WriteBuffer::oldest_idle() {
  for (auto& e : entries_) {
    if (!e.draining) return &e;
  }
  return nullptr;
}

SetAssocCache::SetAssocCache(std::uint32_t sets, std::uint32_t ways, std::uint32_t wb_capacity)
    : sets_(sets), ways_(ways), lines_(std::size_t{sets} * ways), tags_(std::size_t{sets} * ways, kInvalidTag),
      wb_(wb_capacity) {}

std::uint32_t SetAssocCache::way_of(std::uint32_t set, std::uint32_t tag) const {
  const auto i = simd::kernels().find_u32(&tags_[std::size_t{set} * ways_], ways_, tag);
  return i == simd::kNotFound ? ways_ : static_cast<std::uint32_t>(i);
}

SetAssocCache::Line* SetAssocCache::find_line(PhysAddr addr) {
  const auto idx = decompose_set_assoc(addr, sets_);
  const auto w = way_of(idx.set, idx.tag);
  return w == ways_ ? nullptr : &lines_[std::size_t{idx.set} * ways_ + w];
}

const SetAssocCache::Line* SetAssocCache::find_line(PhysAddr addr) const {
  const auto idx = decompose_set_assoc(addr, sets_);
  const auto w = way_of(idx.set, idx.tag);
  return w == ways_ ? nullptr : &lines_[std::size_t{idx.set} * ways_ + w];
}

SetAssocCache::Lookup SetAssocCache::lookup(PhysAddr addr, Intent intent) {
  if (Line* l = find_line(addr)) {
    l->last_use = ++clock_;
    if (intent == Intent::write) l->dirty = true;
    return Lookup::hit;
  }
  if (wb_.find(addr) != nullptr) return Lookup::wb_hit;
  return Lookup::miss;
}

bool SetAssocCache::line_present(PhysAddr addr) const { return find_line(addr) != nullptr; }

bool SetAssocCache::contains(PhysAddr addr) const { return line_present(addr) || wb_.find(addr) != nullptr; }

std::optional<EvictedSector> SetAssocCache::peek_victim(PhysAddr addr) const {
  const auto idx = decompose_set_assoc(addr, sets_);
  const std::size_t base = std::size_t{idx.set} * ways_;
  std::uint32_t victim = ways_;
  for (std::uint32_t w = 0; w < ways_; ++w) {
    const Line& l = lines_[base + w];
    if (!l.valid) return std::nullopt;
    if (victim == ways_ || l.last_use < lines_[base + victim].last_use) victim = w;
  }
  const Line& v = lines_[base + victim];
  return EvictedSector{recompose(SetIndex{v.tag, idx.set, 0}, sets_), v.dirty, v.version};
}

std::optional<EvictedSector> SetAssocCache::install(PhysAddr addr, bool dirty, std::uint64_t version) {
  const auto idx = decompose_set_assoc(addr, sets_);
  if (way_of(idx.set, idx.tag) != ways_) throw std::logic_error("install of a sector already in the cache");
  const std::size_t base = std::size_t{idx.set} * ways_;
  std::uint32_t slot = ways_;
  for (std::uint32_t w = 0; w < ways_ && slot == ways_; ++w) {
    if (!lines_[base + w].valid) slot = w;
  }
  std::optional<EvictedSector> evicted;
  if (slot == ways_) {
    slot = 0;
    for (std::uint32_t w = 1; w < ways_; ++w) {
      if (lines_[base + w].last_use < lines_[base + slot].last_use) slot = w;
    }
    const Line& v = lines_[base + slot];
    evicted = EvictedSector{recompose(SetIndex{v.tag, idx.set, 0}, sets_), v.dirty, v.version};
  }
  lines_[base + slot] = Line{idx.tag, true, dirty, ++clock_, version};
  tags_[base + slot] = idx.tag;
  return evicted;
}

std::optional<EvictedSector> SetAssocCache::invalidate(PhysAddr addr) {
  const auto idx = decompose_set_assoc(addr, sets_);
  const auto w = way_of(idx.set, idx.tag);
  if (w == ways_) return std::nullopt;
  const std::size_t i = std::size_t{idx.set} * ways_ + w;
  EvictedSector out{addr.sector_base(), lines_[i].dirty, lines_[i].version};
  lines_[i] = Line{};
  tags_[i] = kInvalidTag;
  return out;
}

std::optional<std::uint32_t> SetAssocCache::lru_rank(PhysAddr addr) const {
  const Line* target = find_line(addr);
  if (target == nullptr) return std::nullopt;
  const auto idx = decompose_set_assoc(addr, sets_);
  std::uint32_t rank = 0;
  for (std::uint32_t w = 0; w < ways_; ++w) {
    const Line& l = lines_[std::size_t{idx.set} * ways_ + w];
    if (l.valid && l.last_use > target->last_use) ++rank;
  }
  return rank;
}

std::optional<EvictedSector> SetAssocCache::wb_restore(PhysAddr addr) {
  const WriteBuffer::Entry e = wb_.remove(addr);
  return install(e.sector, true, e.version);
}

}  // namespace bicache
