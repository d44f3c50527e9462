// Copyright 2026 The bicache Authors
// SPDX-License-Identifier: Apache-2.0

#include "bicache/workloads.hpp"

#include <algorithm>
#include <stdexcept>
#include <utility>

#include "bicache/matrix_market.hpp"

namespace bicache {

std::string_view to_string(Kernel k) {
  switch (k) {
    case Kernel::axpy: return "axpy";
    case Kernel::mv: return "mv";
    case Kernel::mm: return "mm";
    case Kernel::jacobi2d: return "jacobi2d";
    case Kernel::pathfinder: return "pathfinder";
    case Kernel::spmv: return "spmv";
    case Kernel::file: return "file";
  }
  return "?";
}

std::optional<Kernel> parse_kernel(std::string_view name) {
  for (Kernel k : {Kernel::axpy, Kernel::mv, Kernel::mm, Kernel::jacobi2d, Kernel::pathfinder, Kernel::spmv}) {
    if (name == to_string(k)) return k;
  }
  if (name == "jacobi-2d") return Kernel::jacobi2d;
  return std::nullopt;
}

std::uint32_t vl_elems(std::uint32_t vl_bits, std::uint32_t elem_size) { return vl_bits / (8 * elem_size); }

WorkloadSpec default_spec(Kernel k, std::uint32_t vl_bits) {
  WorkloadSpec s;
  s.kernel = k;
  s.vl_bits = vl_bits;
  return resolved(s);
}

WorkloadSpec resolved(const WorkloadSpec& spec) {
  WorkloadSpec s = spec;
  switch (s.kernel) {
    case Kernel::axpy:
      // 2048 KB of data across x and y.
      if (s.n == 0) s.n = (2048u * 1024u) / (2 * s.elem_size);
      break;
    case Kernel::mv:
    case Kernel::pathfinder:
    case Kernel::spmv:
      if (s.n == 0) s.n = 4096;
      break;
    case Kernel::mm:
    case Kernel::jacobi2d:
      if (s.n == 0) s.n = 256;
      break;
    case Kernel::file: break;
  }
  if (s.m == 0) s.m = s.n;
  if (s.kernel == Kernel::jacobi2d && s.steps == 0) s.steps = 10;
  if (s.repeat == 0) s.repeat = 1;
  return s;
}

std::string workload_name(const WorkloadSpec& spec) {
  if (spec.kernel == Kernel::file) return spec.path.stem().string();
  if (spec.kernel == Kernel::spmv && !spec.path.empty()) return "spmv-" + spec.path.stem().string();
  return std::string(to_string(spec.kernel));
}

namespace {

struct ArrayDecl {
  const char* name;
  std::uint64_t bytes;
};

std::vector<ArrayRegion> place(const WorkloadSpec& s, const std::vector<ArrayDecl>& decls) {
  std::vector<ArrayRegion> out;
  std::uint64_t next = s.base_addr;
  const std::uint64_t align = std::max<std::uint32_t>(s.array_align, 1);
  for (const auto& d : decls) {
    next = (next + align - 1) / align * align;
    if (next + d.bytes > (std::uint64_t{1} << 32))
      throw std::invalid_argument(std::string("array ") + d.name + " does not fit in the 32-bit address space");
    out.push_back(ArrayRegion{d.name, static_cast<std::uint32_t>(next), d.bytes});
    next += d.bytes + s.array_gap;
  }
  return out;
}

std::vector<ArrayDecl> declare(const WorkloadSpec& s, std::size_t nnz) {
  const std::uint64_t e = s.elem_size;
  switch (s.kernel) {
    case Kernel::axpy: return {{"x", s.n * e}, {"y", s.n * e}};
    case Kernel::mv: return {{"A", s.n * s.m * e}, {"x", s.m * e}, {"y", s.n * e}};
    case Kernel::mm: return {{"A", s.n * s.n * e}, {"B", s.n * s.n * e}, {"C", s.n * s.n * e}};
    case Kernel::jacobi2d: return {{"A", s.n * s.n * e}, {"B", s.n * s.n * e}};
    case Kernel::pathfinder: return {{"wall", s.n * s.m * e}, {"src", s.m * e}, {"dst", s.m * e}};
    case Kernel::spmv:
      return {{"row_ptr", (s.n + 1) * 4}, {"col_idx", nnz * 4}, {"val", nnz * e}, {"x", s.m * e}, {"y", s.n * e}};
    case Kernel::file: return {};
  }
  return {};
}

CsrMatrix spmv_matrix(const WorkloadSpec& s) {
  if (!s.path.empty()) return load_matrix_market(s.path);
  return random_csr(static_cast<std::uint32_t>(s.n), static_cast<std::uint32_t>(s.m), s.density, s.seed);
}

class Emitter {
 public:
  Emitter(const TraceSink& sink, std::uint32_t vle, std::uint32_t elem)
      : sink_(sink), vle_(vle), elem_(elem) {}

  std::uint32_t vle() const { return vle_; }

  void compute(Cycle c) { sink_(ComputeEvent{c}); }
  void sload(std::uint32_t addr, std::uint32_t size) { sink_(ScalarMemEvent{MemOp::load, addr, size}); }
  void sstore(std::uint32_t addr, std::uint32_t size) { sink_(ScalarMemEvent{MemOp::store, addr, size}); }

  /// Unit-stride access of `count` elements starting at `base`.
  void vunit(MemOp op, std::uint32_t base, std::uint32_t count, std::uint32_t elem = 0) {
    const std::uint32_t es = elem ? elem : elem_;
    ev_.op = op;
    ev_.elem_size = es;
    ev_.elem_addrs.resize(count);
    for (std::uint32_t i = 0; i < count; ++i) ev_.elem_addrs[i] = base + i * es;
    sink_(ev_);
  }
  void vload(std::uint32_t base, std::uint32_t count) { vunit(MemOp::load, base, count); }
  void vstore(std::uint32_t base, std::uint32_t count) { vunit(MemOp::store, base, count); }

  void vgather(const std::vector<std::uint32_t>& addrs) {
    ev_.op = MemOp::load;
    ev_.elem_size = elem_;
    ev_.elem_addrs = addrs;
    sink_(ev_);
  }

 private:
  const TraceSink& sink_;
  std::uint32_t vle_;
  std::uint32_t elem_;
  VectorMemEvent ev_;
};

void gen_axpy(const WorkloadSpec& s, const std::vector<ArrayRegion>& a, Emitter& em) {
  const std::uint32_t x = a[0].base, y = a[1].base, e = s.elem_size;
  for (std::uint64_t i = 0; i < s.n; i += em.vle()) {
    const auto cnt = static_cast<std::uint32_t>(std::min<std::uint64_t>(em.vle(), s.n - i));
    const auto off = static_cast<std::uint32_t>(i * e);
    em.vload(x + off, cnt);
    em.vload(y + off, cnt);
    em.compute(op_latency::fma);
    em.vstore(y + off, cnt);
  }
}

void gen_mv(const WorkloadSpec& s, const std::vector<ArrayRegion>& a, Emitter& em) {
  const std::uint32_t A = a[0].base, x = a[1].base, y = a[2].base, e = s.elem_size;
  for (std::uint64_t i = 0; i < s.n; ++i) {
    for (std::uint64_t j = 0; j < s.m; j += em.vle()) {
      const auto cnt = static_cast<std::uint32_t>(std::min<std::uint64_t>(em.vle(), s.m - j));
      em.vload(static_cast<std::uint32_t>(A + (i * s.m + j) * e), cnt);
      em.vload(static_cast<std::uint32_t>(x + j * e), cnt);
      em.compute(op_latency::fma);
    }
    em.compute(op_latency::reduce);
    em.sstore(static_cast<std::uint32_t>(y + i * e), e);
  }
}

void gen_mm(const WorkloadSpec& s, const std::vector<ArrayRegion>& a, Emitter& em) {
  const std::uint32_t A = a[0].base, B = a[1].base, C = a[2].base, e = s.elem_size;
  const std::uint64_t n = s.n;
  for (std::uint64_t i = 0; i < n; ++i) {
    for (std::uint64_t j = 0; j < n; j += em.vle()) {
      const auto cnt = static_cast<std::uint32_t>(std::min<std::uint64_t>(em.vle(), n - j));
      for (std::uint64_t k = 0; k < n; ++k) {
        em.sload(static_cast<std::uint32_t>(A + (i * n + k) * e), e);
        em.vload(static_cast<std::uint32_t>(B + (k * n + j) * e), cnt);
        em.compute(op_latency::fma);
      }
      em.vstore(static_cast<std::uint32_t>(C + (i * n + j) * e), cnt);
    }
  }
}

void gen_jacobi2d(const WorkloadSpec& s, const std::vector<ArrayRegion>& a, Emitter& em) {
  std::uint32_t src = a[0].base, dst = a[1].base;
  const std::uint32_t e = s.elem_size;
  const std::uint64_t n = s.n;
  if (n < 3) return;
  auto at = [&](std::uint32_t base, std::uint64_t i, std::uint64_t j) {
    return static_cast<std::uint32_t>(base + (i * n + j) * e);
  };
  for (std::uint32_t t = 0; t < s.steps; ++t) {
    for (std::uint64_t i = 1; i + 1 < n; ++i) {
      for (std::uint64_t j = 1; j + 1 < n; j += em.vle()) {
        const auto cnt = static_cast<std::uint32_t>(std::min<std::uint64_t>(em.vle(), n - 1 - j));
        em.vload(at(src, i, j), cnt);
        em.vload(at(src, i, j - 1), cnt);
        em.vload(at(src, i, j + 1), cnt);
        em.vload(at(src, i - 1, j), cnt);
        em.vload(at(src, i + 1, j), cnt);
        for (int k = 0; k < 4; ++k) em.compute(op_latency::add);
        em.compute(op_latency::add);  // scale by 0.2
        em.vstore(at(dst, i, j), cnt);
      }
    }
    std::swap(src, dst);
  }
}

void gen_pathfinder(const WorkloadSpec& s, const std::vector<ArrayRegion>& a, Emitter& em) {
  const std::uint32_t wall = a[0].base, e = s.elem_size;
  const std::uint64_t rows = s.n, cols = s.m;
  for (std::uint32_t rep = 0; rep < s.repeat; ++rep) {
    std::uint32_t src = a[1].base, dst = a[2].base;
    for (std::uint64_t j = 0; j < cols; j += em.vle()) {
      const auto cnt = static_cast<std::uint32_t>(std::min<std::uint64_t>(em.vle(), cols - j));
      em.vload(static_cast<std::uint32_t>(wall + j * e), cnt);
      em.vstore(static_cast<std::uint32_t>(src + j * e), cnt);
    }
    for (std::uint64_t r = 1; r < rows; ++r) {
      for (std::uint64_t j = 0; j < cols; j += em.vle()) {
        const auto cnt = static_cast<std::uint32_t>(std::min<std::uint64_t>(em.vle(), cols - j));
        em.vload(static_cast<std::uint32_t>(src + j * e), cnt);
        // Neighbours across the chunk edges come in through scalar loads.
        if (j > 0) em.sload(static_cast<std::uint32_t>(src + (j - 1) * e), e);
        if (j + cnt < cols) em.sload(static_cast<std::uint32_t>(src + (j + cnt) * e), e);
        em.compute(op_latency::slide);
        em.compute(op_latency::slide);
        em.compute(op_latency::min);
        em.compute(op_latency::min);
        em.vload(static_cast<std::uint32_t>(wall + (r * cols + j) * e), cnt);
        em.compute(op_latency::add);
        em.vstore(static_cast<std::uint32_t>(dst + j * e), cnt);
      }
      std::swap(src, dst);
    }
  }
}

void gen_spmv(const WorkloadSpec& s, const CsrMatrix& mat, const std::vector<ArrayRegion>& a, Emitter& em) {
  const std::uint32_t row_ptr = a[0].base, col_idx = a[1].base, val = a[2].base, x = a[3].base, y = a[4].base;
  const std::uint32_t e = s.elem_size;
  std::vector<std::uint32_t> gather;
  for (std::uint32_t rep = 0; rep < s.repeat; ++rep) {
    for (std::uint32_t i = 0; i < mat.rows; ++i) {
      em.sload(row_ptr + i * 4, 4);
      em.sload(row_ptr + (i + 1) * 4, 4);
      for (std::uint32_t k = mat.row_ptr[i]; k < mat.row_ptr[i + 1]; k += em.vle()) {
        const std::uint32_t cnt = std::min(em.vle(), mat.row_ptr[i + 1] - k);
        em.vunit(MemOp::load, col_idx + k * 4, cnt, 4);
        em.vload(val + k * e, cnt);
        em.compute(op_latency::add);  // index scaling
        gather.resize(cnt);
        for (std::uint32_t t = 0; t < cnt; ++t) gather[t] = x + mat.col_idx[k + t] * e;
        em.vgather(gather);
        em.compute(op_latency::fma);
      }
      em.compute(op_latency::reduce);
      em.sstore(y + i * e, e);
    }
  }
}

}  // namespace

std::vector<ArrayRegion> layout(const WorkloadSpec& spec) {
  WorkloadSpec s = resolved(spec);
  std::size_t nnz = 0;
  if (s.kernel == Kernel::spmv) {
    const CsrMatrix mat = spmv_matrix(s);
    s.n = mat.rows;
    s.m = mat.cols;
    nnz = mat.nnz();
  }
  return place(s, declare(s, nnz));
}

void generate(const WorkloadSpec& spec, const TraceSink& sink) {
  const WorkloadSpec s = resolved(spec);
  if (s.kernel == Kernel::file) {
    read_trace_file(s.path, sink);
    return;
  }
  if (s.elem_size != 4 && s.elem_size != 8) throw std::invalid_argument("element size must be 4 or 8 bytes");
  const std::uint32_t vle = vl_elems(s.vl_bits, s.elem_size);
  if (vle == 0) throw std::invalid_argument("vector length shorter than one element");
  Emitter em(sink, vle, s.elem_size);

  if (s.kernel == Kernel::spmv) {
    const CsrMatrix mat = spmv_matrix(s);
    WorkloadSpec dims = s;
    dims.n = mat.rows;
    dims.m = mat.cols;
    gen_spmv(dims, mat, place(dims, declare(dims, mat.nnz())), em);
    return;
  }

  const auto arrays = place(s, declare(s, 0));
  switch (s.kernel) {
    case Kernel::axpy:
      for (std::uint32_t rep = 0; rep < s.repeat; ++rep) gen_axpy(s, arrays, em);
      break;
    case Kernel::mv:
      for (std::uint32_t rep = 0; rep < s.repeat; ++rep) gen_mv(s, arrays, em);
      break;
    case Kernel::mm:
      for (std::uint32_t rep = 0; rep < s.repeat; ++rep) gen_mm(s, arrays, em);
      break;
    case Kernel::jacobi2d:
      for (std::uint32_t rep = 0; rep < s.repeat; ++rep) gen_jacobi2d(s, arrays, em);
      break;
    case Kernel::pathfinder: gen_pathfinder(s, arrays, em); break;
    case Kernel::spmv:
    case Kernel::file: break;
  }
}

}  // namespace bicache
