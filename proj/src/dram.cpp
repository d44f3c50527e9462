// Copyright 2026 The bicache Authors
// SPDX-License-Identifier: Apache-2.0

#include "bicache/dram.hpp"

#include <stdexcept>

namespace bicache {

Cycle service_latency(std::optional<std::uint32_t> open_row, std::uint32_t row, const SimConfig& cfg) {
  if (open_row && *open_row == row) return cfg.lat_cas;
  if (!open_row) return cfg.lat_ras + cfg.lat_cas;
  return cfg.lat_pre + cfg.lat_ras + cfg.lat_cas;
}

MemoryController::MemoryController(const SimConfig& cfg, EventQueue& events, Bus& bus, VersionImage& memory)
    : cfg_(cfg), events_(events), bus_(bus), memory_(&memory), banks_(kNumBanks) {}

std::uint32_t MemoryController::allocate_request() {
  ++live_;
  if (!free_ids_.empty()) {
    const std::uint32_t id = free_ids_.back();
    free_ids_.pop_back();
    requests_[id] = MemoryRequest{};
    requests_[id].id = id;
    return id;
  }
  requests_.push_back(MemoryRequest{});
  requests_.back().id = static_cast<std::uint32_t>(requests_.size() - 1);
  return requests_.back().id;
}

void MemoryController::release_request(std::uint32_t id) {
  --live_;
  free_ids_.push_back(id);
}

std::uint32_t MemoryController::submit_read(RequestKind kind, PhysAddr sector, FillDest dest, Cycle arrival) {
  if (kind == RequestKind::write_back) throw std::logic_error("submit_read with a write-back");
  const std::uint32_t id = allocate_request();
  MemoryRequest& r = requests_[id];
  r.kind = kind;
  r.sector = sector.sector_base();
  r.dest = dest;
  r.issue_cycle = events_.now();
  r.arrival_cycle = arrival;
  if (kind == RequestKind::demand_read) ++counters_.demand_reads;
  events_.schedule(arrival, EventKind::bank_arrival, id);
  return id;
}

std::uint32_t MemoryController::submit_write_back(PhysAddr sector, std::uint64_t version, DrainOwner owner,
                                                  Cycle send) {
  const std::uint32_t id = allocate_request();
  MemoryRequest& r = requests_[id];
  r.kind = RequestKind::write_back;
  r.sector = sector.sector_base();
  r.dest = FillDest::none;
  r.version = version;
  r.owner = owner;
  r.issue_cycle = send;
  r.arrival_cycle = bus_.acquire(BusDirection::to_memory, send) + 1;
  ++counters_.write_backs;
  events_.schedule(r.arrival_cycle, EventKind::bank_arrival, id);
  return id;
}

void MemoryController::start_next(std::uint32_t b, Cycle now) {
  BankState& bank = banks_[b];
  if (bank.in_service || bank.queue.empty()) return;
  const std::uint32_t id = bank.queue.front();
  bank.queue.pop_front();
  const std::uint32_t row = decompose_dram(requests_[id].sector).row;
  if (!bank.open_row || *bank.open_row != row) {
    if (bank.open_row) ++counters_.pre;
    ++counters_.ras;
    ++counters_.ras_by_kind[static_cast<int>(requests_[id].kind)];
  }
  ++counters_.cas;
  bank.in_service = id;
  events_.schedule(now + service_latency(bank.open_row, row, cfg_), EventKind::bank_complete, b);
}

void MemoryController::handle(const Event& ev) {
  const Cycle now = ev.fire_cycle;
  switch (ev.kind) {
    case EventKind::bank_arrival: {
      const std::uint32_t b = decompose_dram(requests_[ev.target].sector).bank;
      banks_[b].queue.push_back(ev.target);
      start_next(b, now);
      break;
    }
    case EventKind::bank_complete: {
      const std::uint32_t b = ev.target;
      BankState& bank = banks_[b];
      const std::uint32_t id = *bank.in_service;
      bank.in_service.reset();
      ++bank.served;
      MemoryRequest& r = requests_[id];
      r.complete_cycle = now;
      const auto coord = decompose_dram(r.sector);
      bank.open_row = coord.row;

      if (r.kind == RequestKind::write_back) {
        memory_->write(r.sector, r.version);
        bank.last_read.reset();
        const MemoryRequest done = r;
        release_request(id);
        start_next(b, now);
        maybe_prefetch(now);
        if (client_) client_->on_write_completed(done, now);
        break;
      }

      r.version = memory_->read(r.sector);
      if (r.dest == FillDest::vector_line_fill) {
        const auto vi = decompose_vector(r.sector, cfg_.vc_sectors_per_line);
        bank.last_read = BankState::LastRead{vi.tag, vi.sector, coord.row};
      } else {
        bank.last_read.reset();
      }
      const Cycle grant = bus_.acquire(BusDirection::to_cache, now);
      events_.schedule(grant + 1, EventKind::bus_deliver, id);
      start_next(b, now);
      maybe_prefetch(now);
      break;
    }
    case EventKind::bus_deliver: {
      const MemoryRequest done = requests_[ev.target];
      if (done.kind == RequestKind::prefetch_read) prefetch_inflight_.erase(done.sector.sector_number());
      release_request(ev.target);
      if (client_) client_->on_read_delivered(done, now);
      break;
    }
  }
}

void MemoryController::maybe_prefetch(Cycle now) {
  if (cfg_.prefetch != PrefetchMode::on) return;
  for (const BankState& bank : banks_) {
    if (!bank.in_service && !bank.queue.empty()) return;  // demand work still pending
  }
  for (std::uint32_t b = 0; b < kNumBanks; ++b) {
    BankState& bank = banks_[b];
    if (bank.in_service || !bank.queue.empty() || !bank.last_read) continue;
    const auto& last = *bank.last_read;
    if (last.sector_idx + 1 >= cfg_.vc_sectors_per_line) continue;
    if (!bank.open_row || *bank.open_row != last.row) continue;
    const PhysAddr next = recompose(VectorIndex{last.vc_tag, last.sector_idx + 1, 0}, cfg_.vc_sectors_per_line);
    const std::uint32_t id = allocate_request();
    MemoryRequest& r = requests_[id];
    r.kind = RequestKind::prefetch_read;
    r.sector = next;
    r.dest = FillDest::vector_line_fill;
    r.issue_cycle = now;
    r.arrival_cycle = now;
    prefetch_inflight_[next.sector_number()] = id;
    ++counters_.prefetches_issued;
    bank.queue.push_back(id);
    start_next(b, now);
    return;
  }
}

std::optional<std::uint32_t> MemoryController::inflight_prefetch(PhysAddr sector) const {
  auto it = prefetch_inflight_.find(sector.sector_number());
  if (it == prefetch_inflight_.end()) return std::nullopt;
  return it->second;
}

void MemoryController::promote(std::uint32_t request_id, FillDest dest) {
  MemoryRequest& r = requests_[request_id];
  if (r.kind != RequestKind::prefetch_read) throw std::logic_error("promote of a non-prefetch request");
  r.promoted = true;
  r.dest = dest;
}

}  // namespace bicache
