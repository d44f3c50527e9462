// Copyright 2026 The bicache Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <unordered_map>
#include <vector>

#include "bicache/address.hpp"
#include "bicache/config.hpp"
#include "bicache/event_queue.hpp"
#include "bicache/memory_image.hpp"

namespace bicache {

enum class RequestKind : std::uint8_t { demand_read, write_back, prefetch_read };
enum class FillDest : std::uint8_t { vector_line_fill, scalar_fill, white_fill, none };

/// Which write-buffer entry a write-back drains.
struct DrainOwner {
  enum class Buffer : std::uint8_t { none, scalar, vector, white };
  Buffer buffer = Buffer::none;
  std::uint64_t id = 0;
};

struct MemoryRequest {
  std::uint32_t id = 0;
  RequestKind kind = RequestKind::demand_read;
  PhysAddr sector;
  FillDest dest = FillDest::none;
  Cycle issue_cycle = 0;
  Cycle arrival_cycle = 0;
  Cycle complete_cycle = 0;  // bank completion
  std::uint64_t version = 0;  // data written (write_back) or read (reads, set at completion)
  DrainOwner owner;
  bool promoted = false;  // prefetch that a demand miss attached to
};

/// Cycles to serve an access to `row` given the bank's open row (open-page policy).
Cycle service_latency(std::optional<std::uint32_t> open_row, std::uint32_t row, const SimConfig& cfg);

/// Receives completed memory operations.
class MemoryClient {
 public:
  virtual ~MemoryClient() = default;
  /// Read data has crossed the bus and is at the cache.
  virtual void on_read_delivered(const MemoryRequest& req, Cycle now) = 0;
  /// A write-back has been absorbed by its bank.
  virtual void on_write_completed(const MemoryRequest& req, Cycle now) = 0;
};

struct BankState {
  std::optional<std::uint32_t> open_row;
  std::deque<std::uint32_t> queue;  // FCFS, head is next to serve
  std::optional<std::uint32_t> in_service;
  struct LastRead {
    std::uint32_t vc_tag = 0;
    std::uint32_t sector_idx = 0;
    std::uint32_t row = 0;
  };
  std::optional<LastRead> last_read;  // only reads that filled a vector line
  std::uint64_t served = 0;
};

struct DramCounters {
  std::uint64_t ras = 0;
  std::uint64_t cas = 0;
  std::uint64_t pre = 0;
  std::uint64_t demand_reads = 0;
  std::uint64_t write_backs = 0;
  std::uint64_t prefetches_issued = 0;
  std::uint64_t ras_by_kind[3] = {0, 0, 0};  // indexed by RequestKind
};

/// Memory controller and eight DRAM banks with one open row each, FCFS per bank.
/// Also hosts the memory-side Vector Cache prefetcher.
class MemoryController {
 public:
  MemoryController(const SimConfig& cfg, EventQueue& events, Bus& bus, VersionImage& memory);

  void set_client(MemoryClient* client) { client_ = client; }

  /// Read request reaching its bank at `arrival` (no bus needed for the command).
  std::uint32_t submit_read(RequestKind kind, PhysAddr sector, FillDest dest, Cycle arrival);

  /// Write-back leaving the cache at `send`: one cache->memory bus slot, then the bank queue.
  std::uint32_t submit_write_back(PhysAddr sector, std::uint64_t version, DrainOwner owner, Cycle send);

  /// Dispatch for bank_arrival, bank_complete and bus_deliver events.
  void handle(const Event& ev);

  /// Prefetch of `sector` issued and not yet delivered.
  std::optional<std::uint32_t> inflight_prefetch(PhysAddr sector) const;
  /// Attaches a demand miss to an in-flight prefetch: it is delivered as a demand fill.
  void promote(std::uint32_t request_id, FillDest dest);

  const MemoryRequest& request(std::uint32_t id) const { return requests_[id]; }
  const BankState& bank(std::uint32_t b) const { return banks_[b]; }
  const DramCounters& counters() const { return counters_; }
  std::size_t in_flight() const { return live_; }
  VersionImage& memory() { return *memory_; }

 private:
  std::uint32_t allocate_request();
  void release_request(std::uint32_t id);
  void start_next(std::uint32_t bank, Cycle now);
  void maybe_prefetch(Cycle now);

  const SimConfig& cfg_;
  EventQueue& events_;
  Bus& bus_;
  VersionImage* memory_;
  MemoryClient* client_ = nullptr;

  std::vector<BankState> banks_;
  std::vector<MemoryRequest> requests_;
  std::vector<std::uint32_t> free_ids_;
  std::unordered_map<std::uint32_t, std::uint32_t> prefetch_inflight_;  // sector number -> request
  std::size_t live_ = 0;
  DramCounters counters_;
};

}  // namespace bicache
