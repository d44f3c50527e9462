// Copyright 2026 The bicache Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bicache/trace.hpp"

namespace bicache {

enum class Kernel : std::uint8_t { axpy, mv, mm, jacobi2d, pathfinder, spmv, file };

std::string_view to_string(Kernel k);
std::optional<Kernel> parse_kernel(std::string_view name);

/// Compute latencies of the vector instructions the kernels use.
namespace op_latency {
inline constexpr Cycle fma = 6;     // vfmacc.vf / vfmacc.vv
inline constexpr Cycle add = 4;     // vfadd, vfmul, vmv, index shifts
inline constexpr Cycle min = 7;     // vmin
inline constexpr Cycle reduce = 8;  // vfredusum
inline constexpr Cycle slide = 8;   // vslide1up / vslide1down
inline constexpr Cycle scalar = 1;
}  // namespace op_latency

struct WorkloadSpec {
  Kernel kernel = Kernel::axpy;
  std::uint32_t vl_bits = 512;
  std::uint32_t elem_size = 8;
  std::uint64_t n = 0;  // axpy: elements; others: rows (0 = kernel default)
  std::uint64_t m = 0;  // columns (0 = same as n)
  std::uint32_t steps = 0;  // jacobi2d sweeps (0 = default)
  std::uint32_t repeat = 1;  // region-of-interest repetitions
  double density = 0.001;   // synthetic spmv
  std::uint64_t seed = 1;
  std::filesystem::path path;  // trace file (file) or Matrix Market input (spmv)

  // Array placement: arrays are laid out in declaration order starting at
  // base_addr, each aligned to array_align, with array_gap bytes between them.
  std::uint32_t base_addr = 0x10000000;
  std::uint32_t array_align = 4096;
  std::uint32_t array_gap = 0;
};

/// The kernel's default problem size filled into a spec.
WorkloadSpec default_spec(Kernel k, std::uint32_t vl_bits = 512);

/// Spec with zero size fields replaced by the kernel defaults.
WorkloadSpec resolved(const WorkloadSpec& spec);

/// Name used in result rows: the kernel, or the input file stem.
std::string workload_name(const WorkloadSpec& spec);

struct ArrayRegion {
  std::string name;
  std::uint32_t base = 0;
  std::uint64_t bytes = 0;
};

/// Where each array of the kernel lives. Throws std::invalid_argument if the
/// arrays do not fit below 4 GB.
std::vector<ArrayRegion> layout(const WorkloadSpec& spec);

/// Elements per vector instruction.
std::uint32_t vl_elems(std::uint32_t vl_bits, std::uint32_t elem_size);

/// Emits the kernel's trace into `sink`.
void generate(const WorkloadSpec& spec, const TraceSink& sink);

}  // namespace bicache
