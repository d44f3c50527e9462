// Copyright 2026 The bicache Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <compare>
#include <cstdint>

namespace bicache {

/// Byte address in the 4 GB physical space.
struct PhysAddr {
  std::uint32_t value = 0;

  constexpr PhysAddr() = default;
  constexpr explicit PhysAddr(std::uint32_t v) : value(v) {}

  constexpr PhysAddr sector_base() const { return PhysAddr(value & ~std::uint32_t{63}); }
  constexpr std::uint32_t sector_number() const { return value >> 6; }
  constexpr auto operator<=>(const PhysAddr&) const = default;
};

inline constexpr std::uint32_t kSectorBytes = 64;
inline constexpr unsigned kSectorShift = 6;

// DRAM layout, LSB to MSB: offset 6 | column 8 | bank 3 | row 15.
// One column is one sector, so a CAS moves exactly one bus transfer.
inline constexpr unsigned kColumnBits = 8;
inline constexpr unsigned kBankBits = 3;
inline constexpr unsigned kRowBits = 15;
inline constexpr std::uint32_t kNumBanks = 1u << kBankBits;
inline constexpr std::uint32_t kNumRows = 1u << kRowBits;
inline constexpr std::uint32_t kNumColumns = 1u << kColumnBits;

struct DramCoord {
  std::uint32_t row = 0;
  std::uint32_t bank = 0;
  std::uint32_t column = 0;
  std::uint32_t offset = 0;
  constexpr bool operator==(const DramCoord&) const = default;
};

constexpr DramCoord decompose_dram(PhysAddr a) {
  return DramCoord{
      .row = a.value >> (kSectorShift + kColumnBits + kBankBits),
      .bank = (a.value >> (kSectorShift + kColumnBits)) & (kNumBanks - 1),
      .column = (a.value >> kSectorShift) & (kNumColumns - 1),
      .offset = a.value & (kSectorBytes - 1),
  };
}

constexpr PhysAddr recompose(const DramCoord& c) {
  return PhysAddr((c.row << (kSectorShift + kColumnBits + kBankBits)) |
                  (c.bank << (kSectorShift + kColumnBits)) | (c.column << kSectorShift) | c.offset);
}

/// Index into a set-associative cache with sector-sized lines (Scalar Cache, white cache).
struct SetIndex {
  std::uint32_t tag = 0;
  std::uint32_t set = 0;
  std::uint32_t offset = 0;
  constexpr bool operator==(const SetIndex&) const = default;
};

/// Index into the Vector Cache: tag | sector within line | byte offset.
struct VectorIndex {
  std::uint32_t tag = 0;
  std::uint32_t sector = 0;
  std::uint32_t offset = 0;
  constexpr bool operator==(const VectorIndex&) const = default;
};

constexpr unsigned log2_exact(std::uint32_t v) {
  unsigned n = 0;
  while ((1u << n) < v) ++n;
  return n;
}

constexpr SetIndex decompose_set_assoc(PhysAddr a, std::uint32_t sets) {
  const unsigned set_bits = log2_exact(sets);
  return SetIndex{
      .tag = static_cast<std::uint32_t>(std::uint64_t{a.value} >> (kSectorShift + set_bits)),
      .set = (a.value >> kSectorShift) & (sets - 1),
      .offset = a.value & (kSectorBytes - 1),
  };
}

constexpr PhysAddr recompose(const SetIndex& i, std::uint32_t sets) {
  const unsigned set_bits = log2_exact(sets);
  return PhysAddr(static_cast<std::uint32_t>((std::uint64_t{i.tag} << (kSectorShift + set_bits)) |
                                             (i.set << kSectorShift) | i.offset));
}

constexpr VectorIndex decompose_vector(PhysAddr a, std::uint32_t sectors_per_line = 16) {
  const unsigned sector_bits = log2_exact(sectors_per_line);
  return VectorIndex{
      .tag = a.value >> (kSectorShift + sector_bits),
      .sector = (a.value >> kSectorShift) & (sectors_per_line - 1),
      .offset = a.value & (kSectorBytes - 1),
  };
}

constexpr PhysAddr recompose(const VectorIndex& i, std::uint32_t sectors_per_line = 16) {
  const unsigned sector_bits = log2_exact(sectors_per_line);
  return PhysAddr((i.tag << (kSectorShift + sector_bits)) | (i.sector << kSectorShift) | i.offset);
}

// Default geometries: Scalar Cache 256 sets, white cache 512 sets.
constexpr SetIndex decompose_scalar(PhysAddr a) { return decompose_set_assoc(a, 256); }
constexpr SetIndex decompose_white(PhysAddr a) { return decompose_set_assoc(a, 512); }

}  // namespace bicache
