// Copyright 2026 The bicache Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

#include "bicache/address.hpp"

namespace bicache {

// Data is modelled at sector granularity: every store produces a fresh,
// globally unique version number for its sector, and a sector's bytes are a
// pure function of (address, version). Two images with equal versions for
// every sector are therefore byte-for-byte identical.

/// Dense numbering of every sector the run has touched, shared by all images.
class SectorDirectory {
 public:
  std::uint32_t intern(PhysAddr sector);
  std::optional<std::uint32_t> lookup(PhysAddr sector) const;
  PhysAddr sector_of(std::uint32_t id) const { return PhysAddr(sectors_[id] << kSectorShift); }
  std::size_t size() const { return sectors_.size(); }

 private:
  std::unordered_map<std::uint32_t, std::uint32_t> ids_;
  std::vector<std::uint32_t> sectors_;
};

/// Per-sector data versions. Untouched sectors hold version 0 (initial contents).
class VersionImage {
 public:
  explicit VersionImage(SectorDirectory& dir) : dir_(&dir) {}

  std::uint64_t read(PhysAddr sector) const;
  void write(PhysAddr sector, std::uint64_t version);

  /// Versions indexed by directory id, padded to the directory size.
  const std::vector<std::uint64_t>& dense();

  const SectorDirectory& directory() const { return *dir_; }

 private:
  SectorDirectory* dir_;
  std::vector<std::uint64_t> versions_;
};

struct ImageMismatch {
  PhysAddr sector;
  std::uint64_t expected = 0;
  std::uint64_t actual = 0;
};

/// First sector whose version differs; both images must share one directory.
std::optional<ImageMismatch> compare_images(VersionImage& expected, VersionImage& actual);

/// Flat functional model of memory, updated in program order as the trace executes.
class OracleMemory {
 public:
  explicit OracleMemory(SectorDirectory& dir) : image_(dir) {}

  void record_write(PhysAddr sector, std::uint64_t version) { image_.write(sector, version); }
  std::uint64_t expected(PhysAddr sector) const { return image_.read(sector); }
  bool check_read(PhysAddr sector, std::uint64_t version) const { return image_.read(sector) == version; }
  VersionImage& image() { return image_; }

 private:
  VersionImage image_;
};

}  // namespace bicache
