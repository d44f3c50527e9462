// Copyright 2026 The bicache Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "bicache/config.hpp"
#include "bicache/dram.hpp"
#include "bicache/event_queue.hpp"
#include "bicache/hierarchy.hpp"
#include "bicache/memory_image.hpp"
#include "bicache/trace.hpp"
#include "bicache/workloads.hpp"

namespace bicache {

struct StatsRecord {
  std::string workload;
  std::uint32_t vl_bits = 0;
  HierarchyKind hierarchy = HierarchyKind::bicameral;
  PrefetchMode prefetch = PrefetchMode::off;

  Cycle cycles = 0;
  Cycle compute_cycles = 0;
  std::uint64_t accesses = 0;
  std::uint64_t scalar_accesses = 0;
  std::uint64_t vector_accesses = 0;
  std::uint64_t native_hits = 0;
  std::uint64_t cross_hits = 0;
  std::uint64_t wb_restores = 0;
  std::uint64_t misses = 0;
  double amat = 0.0;
  std::uint64_t ras = 0;
  std::uint64_t cas = 0;
  std::uint64_t pre = 0;
  std::uint64_t ras_demand = 0;
  std::uint64_t ras_writeback = 0;
  std::uint64_t ras_prefetch = 0;
  std::uint64_t writebacks = 0;
  std::uint64_t demand_reads = 0;
  std::uint64_t pf_issued = 0;
  std::uint64_t pf_filled = 0;
  std::uint64_t pf_rejected = 0;
  std::uint64_t pf_useful = 0;
  std::uint64_t stall_cycles = 0;
  std::uint64_t migrations = 0;
  std::uint64_t flush_writebacks = 0;

  bool operator==(const StatsRecord&) const = default;
};

struct SimOptions {
  bool oracle = true;
  /// Checks exclusivity on every access and the full invariants every `invariant_interval` accesses.
  bool debug_checks = false;
  std::uint64_t invariant_interval = 4096;
};

class OracleDivergenceError : public std::runtime_error {
 public:
  explicit OracleDivergenceError(const OracleDivergence& d);
  const OracleDivergence& divergence() const { return d_; }

 private:
  OracleDivergence d_;
};

/// One core, one hierarchy, one memory. The core blocks on every sector
/// access; Compute events advance its clock.
class Simulator {
 public:
  Simulator(const SimConfig& cfg, const SimOptions& opts = {});
  Simulator(const Simulator&) = delete;
  Simulator& operator=(const Simulator&) = delete;

  void execute(const TraceEvent& ev);
  AccessCompletion access(const SectorAccess& a);
  void compute(Cycle c);

  /// Lets outstanding write-backs finish, records the statistics, flushes the
  /// caches and compares memory with the oracle. Throws OracleDivergenceError.
  StatsRecord finish();

  Cycle now() const { return now_; }
  const SimConfig& config() const { return cfg_; }
  Hierarchy& hierarchy() { return *hierarchy_; }
  MemoryController& memory() { return mem_; }
  EventQueue& events() { return events_; }
  OracleMemory* oracle() { return oracle_.get(); }

 private:
  void run_events_until(Cycle c);
  void run_all_events();
  void check_divergence();

  SimConfig cfg_;
  SimOptions opts_;
  SectorDirectory directory_;
  VersionImage memory_image_;
  std::unique_ptr<OracleMemory> oracle_;
  EventQueue events_;
  Bus bus_;
  MemoryController mem_;
  std::unique_ptr<Hierarchy> hierarchy_;
  Cycle now_ = 0;
  Cycle compute_cycles_ = 0;
  std::uint64_t accesses_ = 0;
  bool finished_ = false;
};

/// Generates the workload, drives it through a fresh simulator and returns its statistics.
/// When `trace_out` is set the generated trace is written there as well.
StatsRecord run(const WorkloadSpec& spec, const SimConfig& cfg, const SimOptions& opts = {},
                std::ostream* trace_out = nullptr);

/// base.cycles / test.cycles; throws std::invalid_argument if the records are for different workloads.
double speedup(const StatsRecord& base, const StatsRecord& test);

struct SweepPoint {
  WorkloadSpec spec;
  SimConfig cfg;
};

struct SweepRow {
  SweepPoint point;
  std::optional<StatsRecord> stats;
  std::string error;
  bool diverged = false;
};

/// Cartesian product of the axes. The white cache ignores prefetching, so it
/// contributes one point per workload and vl.
std::vector<SweepPoint> sweep_grid(const std::vector<WorkloadSpec>& workloads, const std::vector<std::uint32_t>& vls,
                                   const std::vector<HierarchyKind>& hierarchies,
                                   const std::vector<PrefetchMode>& prefetch_modes, const SimConfig& base);

/// Runs every point on up to `jobs` threads; results keep the order of `points`.
std::vector<SweepRow> sweep(const std::vector<SweepPoint>& points, unsigned jobs, const SimOptions& opts = {});

void write_csv_header(std::ostream& os);
void write_csv_row(std::ostream& os, const StatsRecord& s);

}  // namespace bicache
