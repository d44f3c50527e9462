// Copyright 2026 The bicache Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "bicache/config.hpp"
#include "bicache/hierarchy.hpp"

namespace bicache {

enum class MemOp : std::uint8_t { load, store };

struct ComputeEvent {
  Cycle latency = 0;
  bool operator==(const ComputeEvent&) const = default;
};

struct ScalarMemEvent {
  MemOp op = MemOp::load;
  std::uint32_t addr = 0;
  std::uint32_t size = 8;
  bool operator==(const ScalarMemEvent&) const = default;
};

/// One vector memory instruction; element addresses in issue order (unit-stride,
/// strided, gather and scatter all look the same here).
struct VectorMemEvent {
  MemOp op = MemOp::load;
  std::uint32_t elem_size = 8;
  std::vector<std::uint32_t> elem_addrs;
  bool operator==(const VectorMemEvent&) const = default;
};

using TraceEvent = std::variant<ComputeEvent, ScalarMemEvent, VectorMemEvent>;
using TraceSink = std::function<void(const TraceEvent&)>;

class TraceError : public std::runtime_error {
 public:
  TraceError(std::size_t line, const std::string& what);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Sector accesses of a vector instruction: consecutive elements in the same
/// sector merge, elements straddling a boundary split. A store covering all 64
/// bytes of a sector is marked full_sector_write.
std::vector<SectorAccess> coalesce(const VectorMemEvent& ev);

/// Sector accesses of a scalar load/store (two when it straddles a boundary).
std::vector<SectorAccess> split_scalar(const ScalarMemEvent& ev);

/// Text format, one event per line:
///   C <cycles>
///   SL|SS <hexaddr> <size>
///   VL|VS <elem_size> <hexaddr> ...
/// `#` starts a comment; blank lines are ignored.
void write_event(std::ostream& os, const TraceEvent& ev);
TraceEvent parse_event_line(std::string_view line, std::size_t line_no);

void read_trace(std::istream& is, const TraceSink& sink);
void read_trace_file(const std::filesystem::path& path, const TraceSink& sink);
std::vector<TraceEvent> load_trace_file(const std::filesystem::path& path);

/// Writes every event it receives; use as a TraceSink.
class TraceWriter {
 public:
  explicit TraceWriter(std::ostream& os) : os_(&os) {}
  void operator()(const TraceEvent& ev) const { write_event(*os_, ev); }

 private:
  std::ostream* os_;
};

}  // namespace bicache
