// Copyright 2026 The bicache Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <vector>

namespace bicache {

struct CsrMatrix {
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;
  std::vector<std::uint32_t> row_ptr;  // rows + 1 entries
  std::vector<std::uint32_t> col_idx;
  std::vector<double> values;

  std::size_t nnz() const { return col_idx.size(); }
};

class MatrixMarketError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Coordinate-format Matrix Market. Entries are sorted by (row, col); for
/// duplicates the one appearing last in the file wins. Symmetric and
/// skew-symmetric files are expanded; pattern files get unit values.
CsrMatrix read_matrix_market(std::istream& is);
CsrMatrix load_matrix_market(const std::filesystem::path& path);

/// Uniformly random sparsity pattern with the given density, reproducible from `seed`.
CsrMatrix random_csr(std::uint32_t rows, std::uint32_t cols, double density, std::uint64_t seed);

/// row_ptr monotone and consistent with nnz, col_idx in range and strictly increasing per row.
bool csr_well_formed(const CsrMatrix& m);

}  // namespace bicache
