// Copyright 2026 The bicache Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace bicache {

using Cycle = std::uint64_t;

enum class HierarchyKind { bicameral, white };
enum class PrefetchMode { off, on, ideal };

std::string_view to_string(HierarchyKind h);  // "bc" / "wc"
std::string_view to_string(PrefetchMode p);   // "off" / "on" / "ideal"
HierarchyKind parse_hierarchy(std::string_view s);
PrefetchMode parse_prefetch(std::string_view s);

/// Every tunable of one simulation. Defaults reproduce the evaluated design point.
struct SimConfig {
  std::uint32_t sector_bytes = 64;
  std::uint32_t sc_sets = 256;
  std::uint32_t sc_ways = 4;
  std::uint32_t vc_lines = 64;
  std::uint32_t vc_sectors_per_line = 16;
  std::uint32_t wb_capacity = 8;
  std::uint32_t wc_sets = 512;
  std::uint32_t wc_ways = 4;
  std::uint32_t drain_threshold_sc = 8;
  std::uint32_t drain_threshold_vc = 5;

  Cycle lat_lookup = 1;
  Cycle lat_cross = 1;
  Cycle lat_ras = 28;
  Cycle lat_cas = 11;
  Cycle lat_pre = 11;
  std::uint32_t bus_bits = 512;

  HierarchyKind hierarchy = HierarchyKind::bicameral;
  PrefetchMode prefetch = PrefetchMode::off;
  std::uint32_t vl_bits = 512;
  bool fetch_on_full_write = false;
  std::uint64_t rng_seed = 1;

  std::uint32_t vc_line_bytes() const { return vc_sectors_per_line * sector_bytes; }
};

/// Raised by validation and config parsing; `problems` lists every violated constraint.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::vector<std::string> problems_;
};

using RawConfig = std::map<std::string, std::string, std::less<>>;

bool is_allowed_vl(std::uint32_t vl_bits);

/// Applies defaults to `raw`, then checks geometry, capacity and threshold invariants.
SimConfig validate_config(const RawConfig& raw);

/// Checks an already-populated config; throws ConfigError listing all problems.
void check_config(const SimConfig& cfg);

/// Parses flat `key = value` lines with `#` comments. Malformed lines are errors.
RawConfig parse_config_text(std::string_view text);
SimConfig load_config_file(const std::filesystem::path& path);

}  // namespace bicache
