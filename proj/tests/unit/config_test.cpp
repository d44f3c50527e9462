// Copyright 2026 The bicache Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>

#include "bicache/config.hpp"

using namespace bicache;

namespace {

bool mentions(const ConfigError& e, const std::string& needle) {
  return std::any_of(e.problems().begin(), e.problems().end(),
                     [&](const std::string& p) { return p.find(needle) != std::string::npos; });
}

}  // namespace

TEST_CASE("empty input yields the default design point") {
  const SimConfig c = validate_config({});
  CHECK(c.lat_cas == 11);
  CHECK(c.lat_ras == 28);
  CHECK(c.lat_pre == 11);
  CHECK(c.lat_lookup == 1);
  CHECK(c.lat_cross == 1);
  CHECK(c.sc_sets == 256);
  CHECK(c.sc_ways == 4);
  CHECK(c.vc_lines == 64);
  CHECK(c.vc_sectors_per_line == 16);
  CHECK(c.wb_capacity == 8);
  CHECK(c.wc_sets == 512);
  CHECK(c.wc_ways == 4);
  CHECK(c.drain_threshold_sc == 8);
  CHECK(c.drain_threshold_vc == 5);
  CHECK(c.bus_bits == 512);
  // 64 KB per half, 128 KB white cache.
  CHECK(c.sc_sets * c.sc_ways * c.sector_bytes == 65536);
  CHECK(c.vc_lines * c.vc_line_bytes() == 65536);
  CHECK(c.wc_sets * c.wc_ways * c.sector_bytes == 131072);
}

TEST_CASE("halving the scalar cache is a capacity mismatch") {
  try {
    validate_config({{"sc_sets", "128"}});
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(mentions(e, "capacity"));
  }
}

TEST_CASE("vector length outside the allowed set is rejected") {
  CHECK_THROWS_AS(validate_config({{"vl_bits", "384"}}), ConfigError);
  for (std::uint32_t vl : {128u, 256u, 512u, 1024u, 2048u, 4096u}) CHECK(is_allowed_vl(vl));
  CHECK_FALSE(is_allowed_vl(64));
  CHECK_FALSE(is_allowed_vl(8192));
}

TEST_CASE("every violated constraint is reported") {
  try {
    validate_config({{"vc_lines", "0"}, {"vl_bits", "100"}, {"bogus", "1"}});
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.problems().size() >= 3);
    CHECK(mentions(e, "vc_lines"));
    CHECK(mentions(e, "vl_bits"));
    CHECK(mentions(e, "bogus"));
  }
}

TEST_CASE("config text parsing") {
  const RawConfig raw = parse_config_text("# comment\nhierarchy = wc\n\nprefetch=on  # trailing\n");
  CHECK(raw.at("hierarchy") == "wc");
  CHECK(raw.at("prefetch") == "on");
  const SimConfig c = validate_config(raw);
  CHECK(c.hierarchy == HierarchyKind::white);
  CHECK(c.prefetch == PrefetchMode::on);
  CHECK_THROWS_AS(parse_config_text("no equals sign\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("a = 1\na = 2\n"), ConfigError);
}

TEST_CASE("hierarchy and prefetch names round-trip") {
  for (auto h : {HierarchyKind::bicameral, HierarchyKind::white}) CHECK(parse_hierarchy(to_string(h)) == h);
  for (auto p : {PrefetchMode::off, PrefetchMode::on, PrefetchMode::ideal}) CHECK(parse_prefetch(to_string(p)) == p);
}
