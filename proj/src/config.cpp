// Copyright 2026 The bicache Authors
// SPDX-License-Identifier: Apache-2.0

#include "bicache/config.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <limits>
#include <sstream>

namespace bicache {

namespace {

std::string join(const std::vector<std::string>& v) {
  std::string out = "invalid configuration:";
  for (const auto& p : v) out += "\n  - " + p;
  return out;
}

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

bool is_pow2(std::uint64_t v) { return v != 0 && (v & (v - 1)) == 0; }

template <typename T>
void read_uint(const RawConfig& raw, std::string_view key, T& out, std::vector<std::string>& errs) {
  auto it = raw.find(key);
  if (it == raw.end()) return;
  const std::string& s = it->second;
  std::uint64_t v = 0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  int base = 10;
  if (s.size() > 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X')) {
    first += 2;
    base = 16;
  }
  auto [p, ec] = std::from_chars(first, last, v, base);
  if (ec != std::errc{} || p != last || first == last) {
    errs.push_back(std::string(key) + ": expected an unsigned integer, got '" + s + "'");
    return;
  }
  if (v > std::numeric_limits<T>::max()) {
    errs.push_back(std::string(key) + ": value out of range");
    return;
  }
  out = static_cast<T>(v);
}

void read_bool(const RawConfig& raw, std::string_view key, bool& out, std::vector<std::string>& errs) {
  auto it = raw.find(key);
  if (it == raw.end()) return;
  const auto& s = it->second;
  if (s == "true" || s == "1" || s == "on") {
    out = true;
  } else if (s == "false" || s == "0" || s == "off") {
    out = false;
  } else {
    errs.push_back(std::string(key) + ": expected a boolean, got '" + s + "'");
  }
}

constexpr std::array<std::string_view, 22> kKnownKeys = {
    "sector_bytes",       "sc_sets",       "sc_ways",     "vc_lines",    "vc_sectors_per_line",
    "wb_capacity",        "wc_sets",       "wc_ways",     "drain_threshold_sc",
    "drain_threshold_vc", "lat_lookup",    "lat_cross",   "lat_ras",     "lat_cas",
    "lat_pre",            "bus_bits",      "hierarchy",   "prefetch",    "vl_bits",
    "fetch_on_full_write", "rng_seed",     "seed",
};

void collect_problems(const SimConfig& c, std::vector<std::string>& errs) {
  auto nonzero = [&](std::string_view name, std::uint64_t v) {
    if (v == 0) errs.push_back(std::string(name) + " must be non-zero");
  };
  nonzero("sc_sets", c.sc_sets);
  nonzero("sc_ways", c.sc_ways);
  nonzero("vc_lines", c.vc_lines);
  nonzero("vc_sectors_per_line", c.vc_sectors_per_line);
  nonzero("wb_capacity", c.wb_capacity);
  nonzero("wc_sets", c.wc_sets);
  nonzero("wc_ways", c.wc_ways);
  nonzero("lat_lookup", c.lat_lookup);
  nonzero("lat_cross", c.lat_cross);
  nonzero("lat_cas", c.lat_cas);

  if (c.sector_bytes != 64) errs.push_back("sector_bytes must be 64 (fixed address layout)");
  if (c.bus_bits != c.sector_bytes * 8) errs.push_back("bus_bits must equal one sector (sector_bytes * 8)");
  if (c.sc_sets && !is_pow2(c.sc_sets)) errs.push_back("sc_sets must be a power of two");
  if (c.wc_sets && !is_pow2(c.wc_sets)) errs.push_back("wc_sets must be a power of two");
  if (c.vc_sectors_per_line && !is_pow2(c.vc_sectors_per_line))
    errs.push_back("vc_sectors_per_line must be a power of two");
  if (c.vc_sectors_per_line > 32) errs.push_back("vc_sectors_per_line must be at most 32");
  if (c.vc_sectors_per_line * std::uint64_t{c.sector_bytes} > 16384)
    errs.push_back("vector line must fit inside one DRAM row of one bank (16 KB)");

  const std::uint64_t sc_bytes = std::uint64_t{c.sc_sets} * c.sc_ways * c.sector_bytes;
  const std::uint64_t vc_bytes = std::uint64_t{c.vc_lines} * c.vc_sectors_per_line * c.sector_bytes;
  const std::uint64_t wc_bytes = std::uint64_t{c.wc_sets} * c.wc_ways * c.sector_bytes;
  if (sc_bytes && vc_bytes && sc_bytes != vc_bytes) {
    errs.push_back("capacity mismatch: scalar cache " + std::to_string(sc_bytes) + " B != vector cache " +
                   std::to_string(vc_bytes) + " B");
  }
  if (sc_bytes && vc_bytes && wc_bytes && sc_bytes + vc_bytes != wc_bytes) {
    errs.push_back("capacity mismatch: white cache " + std::to_string(wc_bytes) +
                   " B != scalar + vector cache " + std::to_string(sc_bytes + vc_bytes) + " B");
  }
  if (c.wb_capacity && (c.drain_threshold_sc == 0 || c.drain_threshold_sc > c.wb_capacity))
    errs.push_back("drain_threshold_sc must be in [1, wb_capacity]");
  if (c.wb_capacity && (c.drain_threshold_vc == 0 || c.drain_threshold_vc > c.wb_capacity))
    errs.push_back("drain_threshold_vc must be in [1, wb_capacity]");
  if (c.wb_capacity && c.vc_lines && c.wb_capacity >= c.vc_lines)
    errs.push_back("wb_capacity must be smaller than vc_lines");
  if (!is_allowed_vl(c.vl_bits))
    errs.push_back("vl_bits must be one of 128, 256, 512, 1024, 2048, 4096 (got " + std::to_string(c.vl_bits) +
                   ")");
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> problems)
    : std::runtime_error(join(problems)), problems_(std::move(problems)) {}

std::string_view to_string(HierarchyKind h) { return h == HierarchyKind::bicameral ? "bc" : "wc"; }

std::string_view to_string(PrefetchMode p) {
  switch (p) {
    case PrefetchMode::off: return "off";
    case PrefetchMode::on: return "on";
    case PrefetchMode::ideal: return "ideal";
  }
  return "?";
}

HierarchyKind parse_hierarchy(std::string_view s) {
  if (s == "bc" || s == "bicameral") return HierarchyKind::bicameral;
  if (s == "wc" || s == "white") return HierarchyKind::white;
  throw ConfigError({"hierarchy must be bc or wc (got '" + std::string(s) + "')"});
}

PrefetchMode parse_prefetch(std::string_view s) {
  if (s == "off") return PrefetchMode::off;
  if (s == "on") return PrefetchMode::on;
  if (s == "ideal") return PrefetchMode::ideal;
  throw ConfigError({"prefetch must be off, on or ideal (got '" + std::string(s) + "')"});
}

bool is_allowed_vl(std::uint32_t vl_bits) {
  switch (vl_bits) {
    case 128: case 256: case 512: case 1024: case 2048: case 4096: return true;
    default: return false;
  }
}

void check_config(const SimConfig& cfg) {
  std::vector<std::string> errs;
  collect_problems(cfg, errs);
  if (!errs.empty()) throw ConfigError(std::move(errs));
}

SimConfig validate_config(const RawConfig& raw) {
  std::vector<std::string> errs;
  for (const auto& [k, v] : raw) {
    if (std::find(kKnownKeys.begin(), kKnownKeys.end(), k) == kKnownKeys.end())
      errs.push_back("unknown key '" + k + "'");
  }

  SimConfig c;
  read_uint(raw, "sector_bytes", c.sector_bytes, errs);
  read_uint(raw, "sc_sets", c.sc_sets, errs);
  read_uint(raw, "sc_ways", c.sc_ways, errs);
  read_uint(raw, "vc_lines", c.vc_lines, errs);
  read_uint(raw, "vc_sectors_per_line", c.vc_sectors_per_line, errs);
  read_uint(raw, "wb_capacity", c.wb_capacity, errs);
  read_uint(raw, "wc_sets", c.wc_sets, errs);
  read_uint(raw, "wc_ways", c.wc_ways, errs);
  // Thresholds follow the write-buffer size unless given explicitly.
  c.drain_threshold_sc = c.wb_capacity;
  c.drain_threshold_vc = c.wb_capacity / 2 + 1;
  read_uint(raw, "drain_threshold_sc", c.drain_threshold_sc, errs);
  read_uint(raw, "drain_threshold_vc", c.drain_threshold_vc, errs);
  read_uint(raw, "lat_lookup", c.lat_lookup, errs);
  read_uint(raw, "lat_cross", c.lat_cross, errs);
  read_uint(raw, "lat_ras", c.lat_ras, errs);
  read_uint(raw, "lat_cas", c.lat_cas, errs);
  read_uint(raw, "lat_pre", c.lat_pre, errs);
  read_uint(raw, "bus_bits", c.bus_bits, errs);
  read_uint(raw, "vl_bits", c.vl_bits, errs);
  read_uint(raw, "rng_seed", c.rng_seed, errs);
  read_uint(raw, "seed", c.rng_seed, errs);
  read_bool(raw, "fetch_on_full_write", c.fetch_on_full_write, errs);

  if (auto it = raw.find("hierarchy"); it != raw.end()) {
    try {
      c.hierarchy = parse_hierarchy(it->second);
    } catch (const ConfigError& e) {
      errs.insert(errs.end(), e.problems().begin(), e.problems().end());
    }
  }
  if (auto it = raw.find("prefetch"); it != raw.end()) {
    try {
      c.prefetch = parse_prefetch(it->second);
    } catch (const ConfigError& e) {
      errs.insert(errs.end(), e.problems().begin(), e.problems().end());
    }
  }

  collect_problems(c, errs);
  if (!errs.empty()) throw ConfigError(std::move(errs));
  return c;
}

RawConfig parse_config_text(std::string_view text) {
  RawConfig raw;
  std::vector<std::string> errs;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      errs.push_back("line " + std::to_string(line_no) + ": expected 'key = value'");
      continue;
    }
    auto key = trim(line.substr(0, eq));
    auto value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      errs.push_back("line " + std::to_string(line_no) + ": empty key or value");
      continue;
    }
    if (!raw.emplace(std::string(key), std::string(value)).second)
      errs.push_back("line " + std::to_string(line_no) + ": duplicate key '" + std::string(key) + "'");
  }
  if (!errs.empty()) throw ConfigError(std::move(errs));
  return raw;
}

SimConfig load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError({"cannot open config file '" + path.string() + "'"});
  std::ostringstream ss;
  ss << in.rdbuf();
  return validate_config(parse_config_text(ss.str()));
}

}  // namespace bicache
