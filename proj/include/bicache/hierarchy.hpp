// Copyright 2026 The bicache Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "bicache/address.hpp"
#include "bicache/config.hpp"
#include "bicache/dram.hpp"
#include "bicache/memory_image.hpp"
#include "bicache/set_assoc_cache.hpp"
#include "bicache/vector_cache.hpp"

namespace bicache {

enum class Origin : std::uint8_t { scalar, vector };
enum class AccessKind : std::uint8_t { native_hit, wb_restore, cross_hit, miss };

std::string_view to_string(AccessKind k);

/// One sector-sized reference, the unit every cache in the hierarchy works on.
struct SectorAccess {
  PhysAddr sector_base;
  Intent intent = Intent::read;
  Origin origin = Origin::scalar;
  bool full_sector_write = false;
};

struct AccessOutcome {
  AccessKind kind = AccessKind::miss;
  bool pending = false;  // completes later through take_completion()
  Cycle latency = 0;     // valid when !pending
  std::vector<MemoryRequest> requests_spawned;
};

struct AccessCompletion {
  AccessKind kind = AccessKind::miss;
  Cycle start = 0;
  Cycle done = 0;
  Cycle latency() const { return done - start; }
};

struct HierarchyStats {
  std::uint64_t scalar_accesses = 0;
  std::uint64_t vector_accesses = 0;
  std::uint64_t native_hits = 0;
  std::uint64_t cross_hits = 0;
  std::uint64_t wb_restores = 0;
  std::uint64_t misses = 0;
  std::uint64_t latency_sum = 0;
  std::uint64_t stall_cycles = 0;  // waiting for a write-buffer slot
  std::uint64_t migrations_sc_to_vc = 0;
  std::uint64_t migrations_vc_to_sc = 0;  // stays zero: migration is one-sided
  std::uint64_t pf_filled = 0;
  std::uint64_t pf_rejected = 0;
  std::uint64_t pf_useful = 0;
  std::uint64_t pf_merged = 0;  // demand misses served by an in-flight prefetch
  std::uint64_t ideal_fills = 0;
  std::uint64_t drains_started = 0;
  std::uint64_t accesses() const { return native_hits + cross_hits + wb_restores + misses; }
};

struct OracleDivergence {
  PhysAddr sector;
  Cycle cycle = 0;
  std::uint64_t expected = 0;
  std::uint64_t actual = 0;
};

/// Common machinery of the two cache organisations: the blocked access, data
/// versions, the oracle hook and write-buffer bookkeeping for drains.
class Hierarchy : public MemoryClient {
 public:
  Hierarchy(const SimConfig& cfg, MemoryController& mem, OracleMemory* oracle);
  ~Hierarchy() override = default;

  /// Runs the lookup pipeline for `a` issued at `now`. Only one access may be in flight.
  virtual AccessOutcome access(const SectorAccess& a, Cycle now) = 0;

  /// Writes back every dirty sector; the caches are clean once the requests complete.
  virtual std::vector<MemoryRequest> flush(Cycle now) = 0;

  /// Structural invariants (exclusivity, buffer bounds). Empty string when they hold.
  virtual std::string check_invariants() const = 0;

  bool pending() const { return pending_.has_value(); }
  std::optional<AccessCompletion> take_completion();

  const HierarchyStats& stats() const { return stats_; }
  const std::optional<OracleDivergence>& divergence() const { return divergence_; }

  void set_debug_checks(bool on) { debug_checks_ = on; }

 protected:
  enum class Source : std::uint8_t { fill, migrate, no_fetch };
  enum class Stage : std::uint8_t { await_fill, have_data, await_slot };

  struct Pending {
    SectorAccess access;
    Cycle start = 0;
    Cycle min_latency = 0;
    AccessKind kind = AccessKind::miss;
    Stage stage = Stage::await_fill;
    Source source = Source::fill;
    std::uint64_t version = 0;  // fetched or migrated data
    bool carried_dirty = false;
    Cycle stall_since = 0;
  };

  /// Read: checks the version against the oracle. Write: returns a fresh version.
  std::uint64_t apply(const SectorAccess& a, std::uint64_t current, Cycle now);

  void begin(const SectorAccess& a, Cycle now, Cycle min_latency);
  void complete(Cycle when);
  /// Fills in pending/latency once the synchronous part of access() is done.
  AccessOutcome finish_access(AccessOutcome out);

  /// Starts the write-back of one disjoint-buffer entry.
  void drain_entry(WriteBuffer::Entry& e, DrainOwner::Buffer buffer, Cycle send);
  /// Installs a fetched sector into a set-associative cache; false if it must wait for a buffer slot.
  bool install_set_assoc(SetAssocCache& cache, DrainOwner::Buffer buffer, Cycle now);
  std::vector<MemoryRequest> flush_set_assoc(SetAssocCache& cache, DrainOwner::Buffer buffer, Cycle now);

  void record(std::vector<MemoryRequest>* out, std::uint32_t request_id) const;

  const SimConfig& cfg_;
  MemoryController& mem_;
  OracleMemory* oracle_;
  HierarchyStats stats_;
  std::optional<Pending> pending_;
  std::optional<AccessCompletion> completion_;
  std::optional<OracleDivergence> divergence_;
  std::vector<MemoryRequest>* spawn_log_ = nullptr;
  std::uint64_t write_seq_ = 0;
  bool debug_checks_ = false;
};

/// Split Scalar Cache / Vector Cache with exclusivity, one-sided migration,
/// per-cache write buffers with eager draining, and the VC prefetch fill path.
class BicameralHierarchy final : public Hierarchy {
 public:
  BicameralHierarchy(const SimConfig& cfg, MemoryController& mem, OracleMemory* oracle);

  AccessOutcome access(const SectorAccess& a, Cycle now) override;
  std::vector<MemoryRequest> flush(Cycle now) override;
  std::string check_invariants() const override;

  void on_read_delivered(const MemoryRequest& req, Cycle now) override;
  void on_write_completed(const MemoryRequest& req, Cycle now) override;

  /// Write-back requests for the oldest idle buffer entries over threshold.
  void eager_drain_check(Cycle send);

  SetAssocCache& scalar_cache() { return sc_; }
  VectorCache& vector_cache() { return vc_; }
  const SetAssocCache& scalar_cache() const { return sc_; }
  const VectorCache& vector_cache() const { return vc_; }

  /// True when `sector` is not valid in both halves at once.
  bool exclusive(PhysAddr sector) const;

 private:
  void scalar_access(const SectorAccess& a, Cycle now);
  void vector_access(const SectorAccess& a, Cycle now);
  void issue_demand(const SectorAccess& a, FillDest dest, Cycle at, bool allow_merge);
  bool finish_vector(Cycle now);
  void resume(Cycle now);
  void drain_vc_line(int line, Cycle send);
  void handle_prefetch_fill(const MemoryRequest& req);

  SetAssocCache sc_;
  VectorCache vc_;
  struct VcDrain {
    int line = -1;
    std::uint32_t remaining = 0;
  };
  std::unordered_map<std::uint64_t, VcDrain> vc_drains_;  // keyed by wb_order
};

/// Conventional unified baseline: one set-associative cache, disjoint write buffer.
class WhiteHierarchy final : public Hierarchy {
 public:
  WhiteHierarchy(const SimConfig& cfg, MemoryController& mem, OracleMemory* oracle);

  AccessOutcome access(const SectorAccess& a, Cycle now) override;
  std::vector<MemoryRequest> flush(Cycle now) override;
  std::string check_invariants() const override;

  void on_read_delivered(const MemoryRequest& req, Cycle now) override;
  void on_write_completed(const MemoryRequest& req, Cycle now) override;

  SetAssocCache& cache() { return wc_; }

 private:
  void eager_drain_check(Cycle send);
  SetAssocCache wc_;
};

}  // namespace bicache
