// Copyright 2026 The bicache Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>

#include "bicache/matrix_market.hpp"
#include "bicache/workloads.hpp"

using namespace bicache;

namespace {

struct Footprint {
  std::uint64_t load_bytes = 0;
  std::uint64_t store_bytes = 0;
  std::uint64_t compute = 0;
  std::uint32_t max_elems = 0;
  std::uint64_t scalar_events = 0;
};

Footprint measure(const WorkloadSpec& spec) {
  Footprint f;
  generate(spec, [&](const TraceEvent& ev) {
    if (const auto* c = std::get_if<ComputeEvent>(&ev)) {
      f.compute += c->latency;
    } else if (const auto* s = std::get_if<ScalarMemEvent>(&ev)) {
      (s->op == MemOp::load ? f.load_bytes : f.store_bytes) += s->size;
      ++f.scalar_events;
    } else {
      const auto& v = std::get<VectorMemEvent>(ev);
      (v.op == MemOp::load ? f.load_bytes : f.store_bytes) += std::uint64_t{v.elem_size} * v.elem_addrs.size();
      f.max_elems = std::max<std::uint32_t>(f.max_elems, static_cast<std::uint32_t>(v.elem_addrs.size()));
    }
  });
  return f;
}

WorkloadSpec spec(Kernel k, std::uint32_t vl, std::uint64_t n, std::uint64_t m = 0) {
  WorkloadSpec s;
  s.kernel = k;
  s.vl_bits = vl;
  s.n = n;
  s.m = m;
  return s;
}

std::uint64_t ceil_div(std::uint64_t a, std::uint64_t b) { return (a + b - 1) / b; }

}  // namespace

TEST_CASE("axpy n=16 at vl 512 has two iterations of load, load, fma, store") {
  std::vector<TraceEvent> evs;
  generate(spec(Kernel::axpy, 512, 16), [&](const TraceEvent& e) { evs.push_back(e); });
  REQUIRE(evs.size() == 8);
  for (int it = 0; it < 2; ++it) {
    CHECK(std::get<VectorMemEvent>(evs[it * 4 + 0]).op == MemOp::load);
    CHECK(std::get<VectorMemEvent>(evs[it * 4 + 1]).op == MemOp::load);
    CHECK(std::get<ComputeEvent>(evs[it * 4 + 2]).latency == 6);
    CHECK(std::get<VectorMemEvent>(evs[it * 4 + 3]).op == MemOp::store);
  }
}

TEST_CASE("loaded and stored bytes match the closed-form footprints") {
  for (const std::uint32_t vl : {128u, 512u, 4096u}) {
    CAPTURE(vl);
    const std::uint64_t e = 8, vle = vl / 64;
    {
      const std::uint64_t n = 1000;
      const auto f = measure(spec(Kernel::axpy, vl, n));
      CHECK(f.load_bytes == 2 * n * e);
      CHECK(f.store_bytes == n * e);
      CHECK(f.max_elems <= vle);
    }
    {
      const std::uint64_t n = 40, m = 70;
      const auto f = measure(spec(Kernel::mv, vl, n, m));
      CHECK(f.load_bytes == 2 * n * m * e);
      CHECK(f.store_bytes == n * e);
    }
    {
      const std::uint64_t n = 24;
      const auto f = measure(spec(Kernel::mm, vl, n));
      CHECK(f.load_bytes == n * n * ceil_div(n, vle) * e + n * n * n * e);
      CHECK(f.store_bytes == n * n * e);
    }
    {
      const std::uint64_t n = 30;
      auto s = spec(Kernel::jacobi2d, vl, n);
      s.steps = 3;
      const auto f = measure(s);
      CHECK(f.load_bytes == 3 * 5 * (n - 2) * (n - 2) * e);
      CHECK(f.store_bytes == 3 * (n - 2) * (n - 2) * e);
      CHECK(f.scalar_events == 0);
    }
    {
      const std::uint64_t rows = 12, cols = 100;
      auto s = spec(Kernel::pathfinder, vl, rows, cols);
      s.repeat = 2;
      const auto f = measure(s);
      const std::uint64_t chunks = ceil_div(cols, vle);
      const std::uint64_t per_rep = cols * e + (rows - 1) * (2 * cols * e + 2 * (chunks - 1) * e);
      CHECK(f.load_bytes == 2 * per_rep);
      CHECK(f.store_bytes == 2 * rows * cols * e);
    }
    {
      auto s = spec(Kernel::spmv, vl, 300, 400);
      s.density = 0.02;
      s.seed = 5;
      const CsrMatrix m = random_csr(300, 400, 0.02, 5);
      const auto f = measure(s);
      CHECK(f.load_bytes == 300 * 8 + m.nnz() * (4 + 2 * e));
      CHECK(f.store_bytes == 300 * e);
    }
  }
}

TEST_CASE("one jacobi sweep touches exactly the 5-point stencil footprint") {
  const std::uint64_t n = 256;
  auto s = spec(Kernel::jacobi2d, 512, n);
  s.steps = 1;
  const auto arrays = layout(s);
  REQUIRE(arrays.size() == 2);
  std::map<std::uint32_t, int> loads, stores;
  generate(s, [&](const TraceEvent& ev) {
    if (const auto* v = std::get_if<VectorMemEvent>(&ev)) {
      for (const auto a : v->elem_addrs) (v->op == MemOp::load ? loads : stores)[a] += 1;
    }
  });
  std::map<std::uint32_t, int> want_loads, want_stores;
  auto at = [&](std::uint32_t base, std::uint64_t i, std::uint64_t j) {
    return static_cast<std::uint32_t>(base + (i * n + j) * 8);
  };
  for (std::uint64_t i = 1; i + 1 < n; ++i) {
    for (std::uint64_t j = 1; j + 1 < n; ++j) {
      for (const auto& [di, dj] : {std::pair{0, 0}, {0, -1}, {0, 1}, {-1, 0}, {1, 0}})
        want_loads[at(arrays[0].base, i + di, j + dj)] += 1;
      want_stores[at(arrays[1].base, i, j)] += 1;
    }
  }
  CHECK(loads == want_loads);
  CHECK(stores == want_stores);
}

TEST_CASE("spmv gathers x through col_idx") {
  WorkloadSpec s = spec(Kernel::spmv, 512, 0);
  s.path = BICACHE_TEST_DATA "/duplicates.mtx";
  const auto arrays = layout(s);
  const std::uint32_t x = arrays[3].base;
  std::vector<std::vector<std::uint32_t>> gathers;
  int vector_loads = 0;
  generate(s, [&](const TraceEvent& ev) {
    if (const auto* v = std::get_if<VectorMemEvent>(&ev)) {
      // Every third vector load in a row chunk is the gather: col_idx, val, x.
      if (++vector_loads % 3 == 0) gathers.push_back(v->elem_addrs);
    }
  });
  REQUIRE(gathers.size() == 3);
  CHECK(gathers[0] == std::vector<std::uint32_t>{x + 0 * 8, x + 1 * 8});
  CHECK(gathers[1] == std::vector<std::uint32_t>{x + 0 * 8});
  CHECK(gathers[2] == std::vector<std::uint32_t>{x + 2 * 8});
}

TEST_CASE("arrays never overlap and respect alignment and gap") {
  for (const Kernel k : {Kernel::axpy, Kernel::mv, Kernel::mm, Kernel::jacobi2d, Kernel::pathfinder, Kernel::spmv}) {
    WorkloadSpec s = default_spec(k);
    s.array_gap = 16384;
    const auto arrays = layout(s);
    for (std::size_t i = 0; i < arrays.size(); ++i) {
      CHECK(arrays[i].base % s.array_align == 0);
      if (i > 0) CHECK(arrays[i].base >= arrays[i - 1].base + arrays[i - 1].bytes + s.array_gap);
    }
  }
}

TEST_CASE("default problem sizes") {
  const auto axpy = resolved(default_spec(Kernel::axpy));
  // Two arrays of 1 MB: 2048 KB in total.
  CHECK(axpy.n * axpy.elem_size * 2 == 2048 * 1024);
  CHECK(resolved(default_spec(Kernel::mm)).n == 256);
  CHECK(resolved(default_spec(Kernel::pathfinder)).n == 4096);
  CHECK(resolved(default_spec(Kernel::jacobi2d)).n == 256);
}

TEST_CASE("kernel names") {
  for (const Kernel k : {Kernel::axpy, Kernel::mv, Kernel::mm, Kernel::jacobi2d, Kernel::pathfinder, Kernel::spmv})
    CHECK(parse_kernel(to_string(k)) == k);
  CHECK(parse_kernel("jacobi-2d") == Kernel::jacobi2d);
  CHECK_FALSE(parse_kernel("lavaMD").has_value());
}

TEST_CASE("vector length caps elements per instruction") {
  CHECK(vl_elems(512, 8) == 8);
  CHECK(vl_elems(128, 4) == 4);
  CHECK(vl_elems(4096, 8) == 64);
}
