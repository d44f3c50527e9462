// Copyright 2026 The bicache Authors
// SPDX-License-Identifier: Apache-2.0

#include "bicache/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <thread>

namespace bicache {

OracleDivergenceError::OracleDivergenceError(const OracleDivergence& d)
    : std::runtime_error([&] {
        std::ostringstream os;
        os << "memory diverges from the oracle at sector 0x" << std::hex << d.sector.value << std::dec
           << " (cycle " << d.cycle << "): expected version " << d.expected << ", found " << d.actual;
        return os.str();
      }()),
      d_(d) {}

Simulator::Simulator(const SimConfig& cfg, const SimOptions& opts)
    : cfg_(cfg), opts_(opts), memory_image_(directory_),
      oracle_(opts.oracle ? std::make_unique<OracleMemory>(directory_) : nullptr),
      mem_(cfg_, events_, bus_, memory_image_) {
  check_config(cfg_);
  if (cfg_.hierarchy == HierarchyKind::bicameral) {
    hierarchy_ = std::make_unique<BicameralHierarchy>(cfg_, mem_, oracle_.get());
  } else {
    hierarchy_ = std::make_unique<WhiteHierarchy>(cfg_, mem_, oracle_.get());
  }
  hierarchy_->set_debug_checks(opts_.debug_checks);
}

void Simulator::run_events_until(Cycle c) {
  while (auto ev = events_.advance_until(c)) mem_.handle(*ev);
}

void Simulator::run_all_events() {
  while (auto ev = events_.advance()) mem_.handle(*ev);
}

void Simulator::check_divergence() {
  if (const auto& d = hierarchy_->divergence()) throw OracleDivergenceError(*d);
}

AccessCompletion Simulator::access(const SectorAccess& a) {
  run_events_until(now_);
  events_.advance_clock(now_);
  const AccessOutcome out = hierarchy_->access(a, now_);
  AccessCompletion done;
  if (!out.pending) {
    done = AccessCompletion{out.kind, now_, now_ + out.latency};
  } else {
    while (hierarchy_->pending()) {
      auto ev = events_.advance();
      if (!ev) throw std::logic_error("access outstanding with no pending memory event");
      mem_.handle(*ev);
    }
    done = *hierarchy_->take_completion();
  }
  now_ = done.done;
  ++accesses_;
  check_divergence();
  if (opts_.debug_checks && opts_.invariant_interval && accesses_ % opts_.invariant_interval == 0) {
    if (auto why = hierarchy_->check_invariants(); !why.empty()) throw std::logic_error(why);
  }
  return done;
}

void Simulator::compute(Cycle c) {
  now_ += c;
  compute_cycles_ += c;
}

void Simulator::execute(const TraceEvent& ev) {
  if (const auto* c = std::get_if<ComputeEvent>(&ev)) {
    compute(c->latency);
  } else if (const auto* s = std::get_if<ScalarMemEvent>(&ev)) {
    if (s->size > 8) throw std::invalid_argument("scalar access wider than 8 bytes");
    for (const auto& a : split_scalar(*s)) access(a);
  } else {
    const auto& v = std::get<VectorMemEvent>(ev);
    if (v.elem_addrs.size() > vl_elems(cfg_.vl_bits, v.elem_size))
      throw std::invalid_argument("vector instruction has more elements than vl " + std::to_string(cfg_.vl_bits) +
                                  " allows");
    for (const auto& a : coalesce(v)) access(a);
  }
}

StatsRecord Simulator::finish() {
  if (finished_) throw std::logic_error("finish() called twice");
  finished_ = true;
  run_all_events();

  const HierarchyStats& h = hierarchy_->stats();
  const DramCounters& d = mem_.counters();
  StatsRecord r;
  r.vl_bits = cfg_.vl_bits;
  r.hierarchy = cfg_.hierarchy;
  r.prefetch = cfg_.prefetch;
  r.cycles = now_;
  r.compute_cycles = compute_cycles_;
  r.accesses = h.accesses();
  r.scalar_accesses = h.scalar_accesses;
  r.vector_accesses = h.vector_accesses;
  r.native_hits = h.native_hits;
  r.cross_hits = h.cross_hits;
  r.wb_restores = h.wb_restores;
  r.misses = h.misses;
  r.amat = r.accesses ? static_cast<double>(h.latency_sum) / static_cast<double>(r.accesses) : 0.0;
  r.ras = d.ras;
  r.cas = d.cas;
  r.pre = d.pre;
  r.ras_demand = d.ras_by_kind[static_cast<int>(RequestKind::demand_read)];
  r.ras_writeback = d.ras_by_kind[static_cast<int>(RequestKind::write_back)];
  r.ras_prefetch = d.ras_by_kind[static_cast<int>(RequestKind::prefetch_read)];
  r.writebacks = d.write_backs;
  r.demand_reads = d.demand_reads;
  r.pf_issued = d.prefetches_issued;
  r.pf_filled = h.pf_filled;
  r.pf_rejected = h.pf_rejected;
  r.pf_useful = h.pf_useful;
  r.stall_cycles = h.stall_cycles;
  r.migrations = h.migrations_sc_to_vc;

  const Cycle flush_at = std::max(now_, events_.now());
  events_.advance_clock(flush_at);
  r.flush_writebacks = hierarchy_->flush(flush_at).size();
  run_all_events();

  check_divergence();
  if (oracle_) {
    if (const auto m = compare_images(oracle_->image(), memory_image_)) {
      throw OracleDivergenceError(OracleDivergence{m->sector, events_.now(), m->expected, m->actual});
    }
  }
  return r;
}

StatsRecord run(const WorkloadSpec& spec, const SimConfig& cfg, const SimOptions& opts, std::ostream* trace_out) {
  SimConfig c = cfg;
  c.vl_bits = spec.vl_bits;
  Simulator sim(c, opts);
  generate(spec, [&](const TraceEvent& ev) {
    if (trace_out) write_event(*trace_out, ev);
    sim.execute(ev);
  });
  StatsRecord r = sim.finish();
  r.workload = workload_name(spec);
  return r;
}

double speedup(const StatsRecord& base, const StatsRecord& test) {
  if (base.workload != test.workload || base.vl_bits != test.vl_bits)
    throw std::invalid_argument("speedup between different workloads");
  if (test.cycles == 0) return base.cycles == 0 ? 1.0 : 0.0;
  return static_cast<double>(base.cycles) / static_cast<double>(test.cycles);
}

std::vector<SweepPoint> sweep_grid(const std::vector<WorkloadSpec>& workloads, const std::vector<std::uint32_t>& vls,
                                   const std::vector<HierarchyKind>& hierarchies,
                                   const std::vector<PrefetchMode>& prefetch_modes, const SimConfig& base) {
  std::vector<SweepPoint> out;
  for (const auto& w : workloads) {
    for (const std::uint32_t vl : vls) {
      for (const HierarchyKind h : hierarchies) {
        std::vector<PrefetchMode> modes = prefetch_modes;
        if (h == HierarchyKind::white) modes = {PrefetchMode::off};
        for (const PrefetchMode p : modes) {
          SweepPoint pt{w, base};
          pt.spec.vl_bits = vl;
          pt.cfg.vl_bits = vl;
          pt.cfg.hierarchy = h;
          pt.cfg.prefetch = p;
          out.push_back(std::move(pt));
        }
      }
    }
  }
  return out;
}

std::vector<SweepRow> sweep(const std::vector<SweepPoint>& points, unsigned jobs, const SimOptions& opts) {
  std::vector<SweepRow> rows(points.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < points.size(); i = next++) {
      SweepRow& row = rows[i];
      row.point = points[i];
      try {
        row.stats = run(points[i].spec, points[i].cfg, opts);
      } catch (const OracleDivergenceError& e) {
        row.error = e.what();
        row.diverged = true;
      } catch (const std::exception& e) {
        row.error = e.what();
      }
    }
  };
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(points.size())));
  std::vector<std::thread> pool;
  for (unsigned j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return rows;
}

void write_csv_header(std::ostream& os) {
  os << "workload,vl_bits,hierarchy,prefetch,cycles,accesses,native_hits,cross_hits,wb_restores,misses,amat,"
        "ras,cas,pre,writebacks,pf_issued,pf_filled,pf_useful\n";
}

void write_csv_row(std::ostream& os, const StatsRecord& s) {
  char amat[32];
  std::snprintf(amat, sizeof amat, "%.4f", s.amat);
  os << s.workload << ',' << s.vl_bits << ',' << to_string(s.hierarchy) << ',' << to_string(s.prefetch) << ','
     << s.cycles << ',' << s.accesses << ',' << s.native_hits << ',' << s.cross_hits << ',' << s.wb_restores << ','
     << s.misses << ',' << amat << ',' << s.ras << ',' << s.cas << ',' << s.pre << ',' << s.writebacks << ','
     << s.pf_issued << ',' << s.pf_filled << ',' << s.pf_useful << '\n';
}

}  // namespace bicache
