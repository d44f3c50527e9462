// Copyright 2026 The bicache Authors
// SPDX-License-Identifier: Apache-2.0

#include "bicache/memory_image.hpp"

#include <algorithm>

#include "bicache/simd/kernels.hpp"

namespace bicache {

std::uint32_t SectorDirectory::intern(PhysAddr sector) {
  const std::uint32_t key = sector.sector_number();
  auto [it, inserted] = ids_.try_emplace(key, static_cast<std::uint32_t>(sectors_.size()));
  if (inserted) sectors_.push_back(key);
  return it->second;
}

std::optional<std::uint32_t> SectorDirectory::lookup(PhysAddr sector) const {
  auto it = ids_.find(sector.sector_number());
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

std::uint64_t VersionImage::read(PhysAddr sector) const {
  const auto id = dir_->lookup(sector);
  if (!id || *id >= versions_.size()) return 0;
  return versions_[*id];
}

void VersionImage::write(PhysAddr sector, std::uint64_t version) {
  const std::uint32_t id = dir_->intern(sector);
  if (id >= versions_.size()) versions_.resize(std::max<std::size_t>(id + 1, dir_->size()), 0);
  versions_[id] = version;
}

const std::vector<std::uint64_t>& VersionImage::dense() {
  if (versions_.size() < dir_->size()) versions_.resize(dir_->size(), 0);
  return versions_;
}

std::optional<ImageMismatch> compare_images(VersionImage& expected, VersionImage& actual) {
  const auto& e = expected.dense();
  const auto& a = actual.dense();
  const std::size_t i = simd::first_mismatch_u64(e, a);
  if (i == e.size() && e.size() == a.size()) return std::nullopt;
  if (i == e.size()) {
    // Equal prefix; the longer image has extra sectors which must still be zero.
    const auto& longer = e.size() > a.size() ? e : a;
    for (std::size_t j = i; j < longer.size(); ++j) {
      if (longer[j] != 0) {
        const auto sector = expected.directory().sector_of(static_cast<std::uint32_t>(j));
        return ImageMismatch{sector, j < e.size() ? e[j] : 0, j < a.size() ? a[j] : 0};
      }
    }
    return std::nullopt;
  }
  return ImageMismatch{expected.directory().sector_of(static_cast<std::uint32_t>(i)), e[i], a[i]};
}

}  // namespace bicache
