// Copyright 2026 The bicache Authors
// SPDX-License-Identifier: Apache-2.0

#include "bicache/hierarchy.hpp"

#include <algorithm>
#include <stdexcept>

namespace bicache {

std::string_view to_string(AccessKind k) {
  switch (k) {
    case AccessKind::native_hit: return "native_hit";
    case AccessKind::wb_restore: return "wb_restore";
    case AccessKind::cross_hit: return "cross_hit";
    case AccessKind::miss: return "miss";
  }
  return "?";
}

Hierarchy::Hierarchy(const SimConfig& cfg, MemoryController& mem, OracleMemory* oracle)
    : cfg_(cfg), mem_(mem), oracle_(oracle) {
  mem_.set_client(this);
}

std::optional<AccessCompletion> Hierarchy::take_completion() {
  auto c = completion_;
  completion_.reset();
  return c;
}

std::uint64_t Hierarchy::apply(const SectorAccess& a, std::uint64_t current, Cycle now) {
  if (a.intent == Intent::write) {
    const std::uint64_t v = ++write_seq_;
    if (oracle_) oracle_->record_write(a.sector_base, v);
    return v;
  }
  if (oracle_ && !divergence_ && !oracle_->check_read(a.sector_base, current)) {
    divergence_ = OracleDivergence{a.sector_base, now, oracle_->expected(a.sector_base), current};
  }
  return current;
}

void Hierarchy::begin(const SectorAccess& a, Cycle now, Cycle min_latency) {
  if (pending_) throw std::logic_error("access issued while another one is outstanding");
  Pending p;
  p.access = a;
  p.start = now;
  p.min_latency = min_latency;
  pending_ = p;
  if (a.origin == Origin::scalar) {
    ++stats_.scalar_accesses;
  } else {
    ++stats_.vector_accesses;
  }
}

void Hierarchy::complete(Cycle when) {
  Pending& p = *pending_;
  const Cycle done = std::max(when, p.start + p.min_latency);
  switch (p.kind) {
    case AccessKind::native_hit: ++stats_.native_hits; break;
    case AccessKind::wb_restore: ++stats_.wb_restores; break;
    case AccessKind::cross_hit: ++stats_.cross_hits; break;
    case AccessKind::miss: ++stats_.misses; break;
  }
  stats_.latency_sum += done - p.start;
  completion_ = AccessCompletion{p.kind, p.start, done};
  pending_.reset();
}

void Hierarchy::record(std::vector<MemoryRequest>* out, std::uint32_t request_id) const {
  if (out) out->push_back(mem_.request(request_id));
}

void Hierarchy::drain_entry(WriteBuffer::Entry& e, DrainOwner::Buffer buffer, Cycle send) {
  e.draining = true;
  ++stats_.drains_started;
  record(spawn_log_, mem_.submit_write_back(e.sector, e.version, DrainOwner{buffer, e.id}, send));
}

bool Hierarchy::install_set_assoc(SetAssocCache& cache, DrainOwner::Buffer buffer, Cycle now) {
  Pending& p = *pending_;
  const PhysAddr addr = p.access.sector_base;
  const auto victim = cache.peek_victim(addr);
  if (victim && victim->dirty && cache.wb().full()) {
    if (p.stage != Stage::await_slot) {
      p.stage = Stage::await_slot;
      p.stall_since = now;
    }
    WriteBuffer::Entry* oldest = cache.wb().find_id(cache.wb().entries().front().id);
    if (!oldest->draining) drain_entry(*oldest, buffer, now);
    return false;
  }
  const auto evicted = cache.install(addr, false, p.version);
  if (evicted && evicted->dirty) cache.wb().insert(evicted->sector, evicted->version);
  SetAssocCache::Line* line = cache.find_line(addr);
  line->version = apply(p.access, line->version, now);
  if (p.access.intent == Intent::write) line->dirty = true;
  if (p.stage == Stage::await_slot) stats_.stall_cycles += now - p.stall_since;
  complete(now);
  return true;
}

std::vector<MemoryRequest> Hierarchy::flush_set_assoc(SetAssocCache& cache, DrainOwner::Buffer buffer, Cycle now) {
  std::vector<MemoryRequest> out;
  auto* saved = spawn_log_;
  spawn_log_ = &out;
  while (WriteBuffer::Entry* e = cache.wb().oldest_idle()) drain_entry(*e, buffer, now);
  cache.for_each_valid([&](PhysAddr addr, SetAssocCache::Line& l) {
    if (!l.dirty) return;
    record(&out, mem_.submit_write_back(addr, l.version, DrainOwner{}, now));
    l.dirty = false;
  });
  spawn_log_ = saved;
  return out;
}

AccessOutcome Hierarchy::finish_access(AccessOutcome out) {
  spawn_log_ = nullptr;
  if (completion_) {
    out.pending = false;
    out.kind = completion_->kind;
    out.latency = completion_->latency();
    completion_.reset();
  } else {
    out.pending = true;
    out.kind = pending_->kind;
  }
  return out;
}

// ---------------------------------------------------------------------------

BicameralHierarchy::BicameralHierarchy(const SimConfig& cfg, MemoryController& mem, OracleMemory* oracle)
    : Hierarchy(cfg, mem, oracle),
      sc_(cfg.sc_sets, cfg.sc_ways, cfg.wb_capacity),
      vc_(cfg.vc_lines, cfg.vc_sectors_per_line, cfg.wb_capacity) {}

bool BicameralHierarchy::exclusive(PhysAddr sector) const {
  return !(sc_.contains(sector) && vc_.sector_valid(sector));
}

AccessOutcome BicameralHierarchy::access(const SectorAccess& a, Cycle now) {
  AccessOutcome out;
  spawn_log_ = &out.requests_spawned;
  if (a.origin == Origin::scalar) {
    scalar_access(a, now);
  } else {
    vector_access(a, now);
  }
  if (debug_checks_ && !pending_ && !exclusive(a.sector_base))
    throw std::logic_error("sector valid in both caches after access");
  return finish_access(std::move(out));
}

void BicameralHierarchy::issue_demand(const SectorAccess& a, FillDest dest, Cycle at, bool allow_merge) {
  if (allow_merge) {
    if (const auto id = mem_.inflight_prefetch(a.sector_base)) {
      mem_.promote(*id, dest);
      ++stats_.pf_merged;
      record(spawn_log_, *id);
      return;
    }
  }
  record(spawn_log_, mem_.submit_read(RequestKind::demand_read, a.sector_base, dest, at));
}

void BicameralHierarchy::scalar_access(const SectorAccess& a, Cycle now) {
  const Cycle native = cfg_.lat_lookup;
  const Cycle cross = cfg_.lat_lookup + cfg_.lat_cross;
  begin(a, now, native);
  Pending& p = *pending_;

  switch (sc_.lookup(a.sector_base, a.intent)) {
    case SetAssocCache::Lookup::hit: {
      SetAssocCache::Line* l = sc_.find_line(a.sector_base);
      l->version = apply(a, l->version, now);
      p.kind = AccessKind::native_hit;
      complete(now);
      return;
    }
    case SetAssocCache::Lookup::wb_hit: {
      // The freed buffer slot always has room for the displaced line.
      const auto evicted = sc_.wb_restore(a.sector_base);
      if (evicted && evicted->dirty) sc_.wb().insert(evicted->sector, evicted->version);
      SetAssocCache::Line* l = sc_.find_line(a.sector_base);
      l->version = apply(a, l->version, now);
      p.kind = AccessKind::wb_restore;
      complete(now);
      return;
    }
    case SetAssocCache::Lookup::miss: break;
  }

  p.min_latency = cross;
  const auto r = vc_.lookup(a.sector_base, a.intent);
  if (r.kind == VectorCache::Lookup::sector_hit) {
    // Served in place; scalar data never pulls a sector out of the Vector Cache.
    if (r.was_prefetched) ++stats_.pf_useful;
    vc_.set_version(r.line, r.sector, apply(a, vc_.version(r.line, r.sector), now));
    p.kind = AccessKind::cross_hit;
    complete(now);
    return;
  }
  if (r.kind == VectorCache::Lookup::wb_hit) {
    vc_.restore(r.line);
    if (a.intent == Intent::write) vc_.set_dirty(r.line, r.sector);
    vc_.set_version(r.line, r.sector, apply(a, vc_.version(r.line, r.sector), now));
    p.kind = AccessKind::wb_restore;
    complete(now);
    return;
  }

  p.kind = AccessKind::miss;
  issue_demand(a, FillDest::scalar_fill, now + cross, false);
  eager_drain_check(now + cross);
}

void BicameralHierarchy::vector_access(const SectorAccess& a, Cycle now) {
  const Cycle native = cfg_.lat_lookup;
  const Cycle cross = cfg_.lat_lookup + cfg_.lat_cross;
  begin(a, now, native);
  Pending& p = *pending_;

  const auto r = vc_.lookup(a.sector_base, a.intent);
  switch (r.kind) {
    case VectorCache::Lookup::sector_hit:
      if (r.was_prefetched) ++stats_.pf_useful;
      vc_.set_version(r.line, r.sector, apply(a, vc_.version(r.line, r.sector), now));
      p.kind = AccessKind::native_hit;
      complete(now);
      return;
    case VectorCache::Lookup::wb_hit:
      vc_.restore(r.line);
      if (a.intent == Intent::write) vc_.set_dirty(r.line, r.sector);
      vc_.set_version(r.line, r.sector, apply(a, vc_.version(r.line, r.sector), now));
      p.kind = AccessKind::wb_restore;
      complete(now);
      return;
    case VectorCache::Lookup::line_hit_sector_miss:
      // A buffered line referenced again comes back before the sector is fetched into it.
      if (vc_.line(r.line).mode == VectorCache::Mode::wb) vc_.restore(r.line);
      break;
    case VectorCache::Lookup::miss: break;
  }

  p.min_latency = cross;
  if (const SetAssocCache::Line* l = sc_.find_line(a.sector_base)) {
    p.version = l->version;
    p.carried_dirty = l->dirty;
    sc_.invalidate(a.sector_base);
  } else if (const WriteBuffer::Entry* e = sc_.wb().find(a.sector_base)) {
    p.version = e->version;
    p.carried_dirty = true;
    sc_.wb().remove(a.sector_base);
  } else {
    p.kind = AccessKind::miss;
    if (a.intent == Intent::write && a.full_sector_write && !cfg_.fetch_on_full_write) {
      p.source = Source::no_fetch;
      eager_drain_check(now + cross);
      finish_vector(now);
      return;
    }
    issue_demand(a, FillDest::vector_line_fill, now + cross, cfg_.prefetch == PrefetchMode::on);
    eager_drain_check(now + cross);
    return;
  }

  p.kind = AccessKind::cross_hit;
  p.source = Source::migrate;
  ++stats_.migrations_sc_to_vc;
  finish_vector(now);
}

bool BicameralHierarchy::finish_vector(Cycle now) {
  Pending& p = *pending_;
  const SectorAccess& a = p.access;
  const auto idx = vc_.index(a.sector_base);
  int line = vc_.find(idx.tag);
  if (line < 0) {
    auto alloc = vc_.allocate(idx.tag);
    if (alloc.stalled) {
      if (p.stage != Stage::await_slot) {
        p.stage = Stage::await_slot;
        p.stall_since = now;
      }
      const int oldest = vc_.wb_oldest();
      if (oldest >= 0 && !vc_.line(oldest).draining) drain_vc_line(oldest, now);
      return false;
    }
    line = alloc.line;
  }

  const std::uint32_t bit = 1u << idx.sector;
  switch (p.source) {
    case Source::fill:
      if ((vc_.line(line).valid_mask & bit) == 0) vc_.install_sector(line, idx.sector, false, p.version);
      break;
    case Source::migrate: vc_.install_sector(line, idx.sector, p.carried_dirty, p.version); break;
    case Source::no_fetch: vc_.install_sector(line, idx.sector, false, 0); break;
  }

  if (cfg_.prefetch == PrefetchMode::ideal && p.source == Source::fill) {
    const std::uint32_t missing = vc_.full_mask() & ~vc_.line(line).valid_mask;
    for (std::uint32_t s = 0; s < vc_.sectors_per_line(); ++s) {
      if ((missing & (1u << s)) == 0) continue;
      const PhysAddr sector = vc_.sector_addr(idx.tag, s);
      if (sc_.contains(sector)) continue;
      vc_.install_sector(line, s, false, mem_.memory().read(sector));
      ++stats_.ideal_fills;
    }
  }

  vc_.touch(line);
  if (a.intent == Intent::write) vc_.set_dirty(line, idx.sector);
  vc_.set_version(line, idx.sector, apply(a, vc_.version(line, idx.sector), now));
  if (p.stage == Stage::await_slot) stats_.stall_cycles += now - p.stall_since;
  complete(now);
  return true;
}

void BicameralHierarchy::drain_vc_line(int line, Cycle send) {
  const VectorCache::Line& l = vc_.line(line);
  vc_.set_draining(line);
  ++stats_.drains_started;
  const std::uint32_t dirty = l.dirty_mask & l.valid_mask;
  std::uint32_t sent = 0;
  for (std::uint32_t s = 0; s < vc_.sectors_per_line(); ++s) {
    if ((dirty & (1u << s)) == 0) continue;
    const DrainOwner owner{DrainOwner::Buffer::vector, l.wb_order};
    record(spawn_log_, mem_.submit_write_back(vc_.sector_addr(l.tag, s), vc_.version(line, s), owner, send));
    ++sent;
  }
  if (sent == 0) {
    vc_.free_line(line);
    return;
  }
  vc_drains_[l.wb_order] = VcDrain{line, sent};
}

void BicameralHierarchy::eager_drain_check(Cycle send) {
  if (sc_.wb().size() >= cfg_.drain_threshold_sc) {
    if (WriteBuffer::Entry* e = sc_.wb().oldest_idle()) drain_entry(*e, DrainOwner::Buffer::scalar, send);
  }
  if (vc_.wb_count() >= cfg_.drain_threshold_vc) {
    const int l = vc_.wb_oldest_idle();
    if (l >= 0) drain_vc_line(l, send);
  }
}

void BicameralHierarchy::resume(Cycle now) {
  if (!pending_ || pending_->stage != Stage::await_slot) return;
  if (pending_->access.origin == Origin::scalar) {
    install_set_assoc(sc_, DrainOwner::Buffer::scalar, now);
  } else {
    finish_vector(now);
  }
}

void BicameralHierarchy::on_write_completed(const MemoryRequest& req, Cycle now) {
  switch (req.owner.buffer) {
    case DrainOwner::Buffer::scalar: {
      WriteBuffer::Entry* e = sc_.wb().find_id(req.owner.id);
      if (e && e->draining) {
        sc_.wb().remove(e->sector);
        resume(now);
      }
      break;
    }
    case DrainOwner::Buffer::vector: {
      auto it = vc_drains_.find(req.owner.id);
      if (it == vc_drains_.end()) break;
      if (--it->second.remaining > 0) break;
      const int line = it->second.line;
      vc_drains_.erase(it);
      // A line restored mid-drain keeps its slot and its dirty data.
      const auto& l = vc_.line(line);
      if (l.mode == VectorCache::Mode::wb && l.wb_order == req.owner.id) {
        vc_.free_line(line);
        resume(now);
      }
      break;
    }
    case DrainOwner::Buffer::none:
    case DrainOwner::Buffer::white: break;
  }
}

void BicameralHierarchy::handle_prefetch_fill(const MemoryRequest& req) {
  const bool racing_demand = pending_ && pending_->access.sector_base.value == req.sector.value;
  // A fill must not duplicate a scalar copy, and must not carry data that a
  // write-back overtook while it was on its way.
  if (racing_demand || sc_.contains(req.sector) || mem_.memory().read(req.sector) != req.version) {
    ++stats_.pf_rejected;
    return;
  }
  const auto idx = vc_.index(req.sector);
  std::vector<VectorCache::Line> before;
  if (debug_checks_) {
    for (std::uint32_t i = 0; i < vc_.num_lines(); ++i) before.push_back(vc_.line(static_cast<int>(i)));
  }
  const VectorCache::Fill fill = vc_.prefetch_fill(idx.tag, idx.sector, req.version);
  if (debug_checks_) {
    for (std::uint32_t i = 0; i < vc_.num_lines(); ++i) {
      const VectorCache::Line& a = before[i];
      const VectorCache::Line& b = vc_.line(static_cast<int>(i));
      if (a.tag != b.tag || a.mode != b.mode || a.last_use != b.last_use || a.dirty_mask != b.dirty_mask ||
          (a.valid_mask & ~b.valid_mask) != 0)
        throw std::logic_error("prefetch fill changed resident lines");
    }
  }
  if (fill == VectorCache::Fill::filled) {
    ++stats_.pf_filled;
  } else {
    ++stats_.pf_rejected;
  }
}

void BicameralHierarchy::on_read_delivered(const MemoryRequest& req, Cycle now) {
  if (req.kind == RequestKind::prefetch_read && !req.promoted) {
    handle_prefetch_fill(req);
    return;
  }
  if (!pending_ || pending_->stage != Stage::await_fill || pending_->access.sector_base.value != req.sector.value)
    throw std::logic_error("demand fill with no matching outstanding access");
  Pending& p = *pending_;
  if (req.promoted) {
    // The prefetch may have read memory before a write-back of this sector landed.
    p.version = mem_.memory().read(req.sector);
    ++stats_.pf_filled;
    ++stats_.pf_useful;
  } else {
    p.version = req.version;
  }
  p.stage = Stage::have_data;
  if (req.dest == FillDest::scalar_fill) {
    install_set_assoc(sc_, DrainOwner::Buffer::scalar, now);
  } else {
    finish_vector(now);
  }
}

std::vector<MemoryRequest> BicameralHierarchy::flush(Cycle now) {
  auto out = flush_set_assoc(sc_, DrainOwner::Buffer::scalar, now);
  auto* saved = spawn_log_;
  spawn_log_ = &out;
  for (int l = vc_.wb_oldest_idle(); l >= 0; l = vc_.wb_oldest_idle()) drain_vc_line(l, now);
  for (std::uint32_t i = 0; i < vc_.num_lines(); ++i) {
    const int line = static_cast<int>(i);
    const auto& l = vc_.line(line);
    if (l.mode != VectorCache::Mode::regular) continue;
    const std::uint32_t dirty = l.dirty_mask & l.valid_mask;
    for (std::uint32_t s = 0; s < vc_.sectors_per_line(); ++s) {
      if ((dirty & (1u << s)) == 0) continue;
      record(&out, mem_.submit_write_back(vc_.sector_addr(l.tag, s), vc_.version(line, s), DrainOwner{}, now));
      vc_.mark_clean(line, s);
    }
  }
  spawn_log_ = saved;
  return out;
}

std::string BicameralHierarchy::check_invariants() const {
  std::string why;
  auto& mut_sc = const_cast<SetAssocCache&>(sc_);
  mut_sc.for_each_valid([&](PhysAddr addr, const SetAssocCache::Line&) {
    if (why.empty() && vc_.sector_valid(addr)) why = "sector valid in both caches";
  });
  for (const auto& e : sc_.wb().entries()) {
    if (!why.empty()) break;
    if (vc_.sector_valid(e.sector)) why = "scalar write-buffer sector also valid in the vector cache";
    if (sc_.line_present(e.sector)) why = "scalar write-buffer sector also present in the scalar cache";
  }
  if (why.empty() && sc_.wb().size() > sc_.wb().capacity()) why = "scalar write buffer over capacity";
  if (why.empty() && vc_.wb_count() > vc_.wb_capacity()) why = "vector write buffer over capacity";
  for (std::uint32_t i = 0; i < vc_.num_lines() && why.empty(); ++i) {
    const auto& l = vc_.line(static_cast<int>(i));
    if ((l.dirty_mask & ~l.valid_mask) != 0) why = "dirty bit on an invalid vector sector";
    if ((l.prefetched_mask & ~l.valid_mask) != 0) why = "prefetched bit on an invalid vector sector";
  }
  return why;
}

// ---------------------------------------------------------------------------

WhiteHierarchy::WhiteHierarchy(const SimConfig& cfg, MemoryController& mem, OracleMemory* oracle)
    : Hierarchy(cfg, mem, oracle), wc_(cfg.wc_sets, cfg.wc_ways, cfg.wb_capacity) {}

AccessOutcome WhiteHierarchy::access(const SectorAccess& a, Cycle now) {
  AccessOutcome out;
  spawn_log_ = &out.requests_spawned;
  begin(a, now, cfg_.lat_lookup);
  Pending& p = *pending_;
  switch (wc_.lookup(a.sector_base, a.intent)) {
    case SetAssocCache::Lookup::hit: {
      SetAssocCache::Line* l = wc_.find_line(a.sector_base);
      l->version = apply(a, l->version, now);
      p.kind = AccessKind::native_hit;
      complete(now);
      break;
    }
    case SetAssocCache::Lookup::wb_hit: {
      const auto evicted = wc_.wb_restore(a.sector_base);
      if (evicted && evicted->dirty) wc_.wb().insert(evicted->sector, evicted->version);
      SetAssocCache::Line* l = wc_.find_line(a.sector_base);
      l->version = apply(a, l->version, now);
      p.kind = AccessKind::wb_restore;
      complete(now);
      break;
    }
    case SetAssocCache::Lookup::miss:
      p.kind = AccessKind::miss;
      record(spawn_log_, mem_.submit_read(RequestKind::demand_read, a.sector_base, FillDest::white_fill,
                                          now + cfg_.lat_lookup));
      eager_drain_check(now + cfg_.lat_lookup);
      break;
  }
  return finish_access(std::move(out));
}

void WhiteHierarchy::eager_drain_check(Cycle send) {
  if (wc_.wb().size() < cfg_.drain_threshold_sc) return;
  if (WriteBuffer::Entry* e = wc_.wb().oldest_idle()) drain_entry(*e, DrainOwner::Buffer::white, send);
}

void WhiteHierarchy::on_read_delivered(const MemoryRequest& req, Cycle now) {
  if (!pending_ || pending_->stage != Stage::await_fill || pending_->access.sector_base.value != req.sector.value)
    throw std::logic_error("demand fill with no matching outstanding access");
  pending_->version = req.version;
  pending_->stage = Stage::have_data;
  install_set_assoc(wc_, DrainOwner::Buffer::white, now);
}

void WhiteHierarchy::on_write_completed(const MemoryRequest& req, Cycle now) {
  if (req.owner.buffer != DrainOwner::Buffer::white) return;
  WriteBuffer::Entry* e = wc_.wb().find_id(req.owner.id);
  if (!e || !e->draining) return;
  wc_.wb().remove(e->sector);
  if (pending_ && pending_->stage == Stage::await_slot) install_set_assoc(wc_, DrainOwner::Buffer::white, now);
}

std::vector<MemoryRequest> WhiteHierarchy::flush(Cycle now) {
  return flush_set_assoc(wc_, DrainOwner::Buffer::white, now);
}

std::string WhiteHierarchy::check_invariants() const {
  for (const auto& e : wc_.wb().entries()) {
    if (wc_.line_present(e.sector)) return "write-buffer sector also present in the cache";
  }
  if (wc_.wb().size() > wc_.wb().capacity()) return "write buffer over capacity";
  return {};
}

}  // namespace bicache
