// Copyright 2026 The bicache Authors
// SPDX-License-Identifier: Apache-2.0

#include "bicache/matrix_market.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <random>
#include <sstream>
#include <string>

namespace bicache {

namespace {

struct Triplet {
  std::uint32_t row;
  std::uint32_t col;
  std::uint64_t order;  // position in the file, for last-wins deduplication
  double value;
};

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

CsrMatrix build_csr(std::uint32_t rows, std::uint32_t cols, std::vector<Triplet>& t) {
  std::stable_sort(t.begin(), t.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : (a.col != b.col ? a.col < b.col : a.order < b.order);
  });
  CsrMatrix m;
  m.rows = rows;
  m.cols = cols;
  m.row_ptr.assign(std::size_t{rows} + 1, 0);
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (i + 1 < t.size() && t[i + 1].row == t[i].row && t[i + 1].col == t[i].col) continue;
    m.col_idx.push_back(t[i].col);
    m.values.push_back(t[i].value);
    ++m.row_ptr[t[i].row + 1];
  }
  for (std::uint32_t r = 0; r < rows; ++r) m.row_ptr[r + 1] += m.row_ptr[r];
  return m;
}

}  // namespace

CsrMatrix read_matrix_market(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw MatrixMarketError("empty Matrix Market input");
  std::istringstream header(line);
  std::string banner, object, format, field, symmetry;
  header >> banner >> object >> format >> field >> symmetry;
  if (banner != "%%MatrixMarket" || lower(object) != "matrix")
    throw MatrixMarketError("missing %%MatrixMarket matrix header");
  if (lower(format) != "coordinate") throw MatrixMarketError("only coordinate format is supported");
  field = lower(field);
  symmetry = lower(symmetry);
  const bool pattern = field == "pattern";
  if (!pattern && field != "real" && field != "integer" && field != "double")
    throw MatrixMarketError("unsupported field '" + field + "'");
  if (symmetry != "general" && symmetry != "symmetric" && symmetry != "skew-symmetric")
    throw MatrixMarketError("unsupported symmetry '" + symmetry + "'");

  while (std::getline(is, line)) {
    if (!line.empty() && line[0] != '%' && line.find_first_not_of(" \t\r") != std::string::npos) break;
  }
  std::uint64_t rows = 0, cols = 0, entries = 0;
  {
    std::istringstream size_line(line);
    if (!(size_line >> rows >> cols >> entries)) throw MatrixMarketError("bad size line");
  }
  if (rows > 0xFFFFFFFFull || cols > 0xFFFFFFFFull) throw MatrixMarketError("matrix dimensions exceed 32 bits");

  std::vector<Triplet> t;
  t.reserve(symmetry == "general" ? entries : 2 * entries);
  std::uint64_t order = 0;
  for (std::uint64_t k = 0; k < entries; ++k) {
    if (!std::getline(is, line)) throw MatrixMarketError("file ends after " + std::to_string(k) + " entries");
    if (!line.empty() && line[0] == '%') {
      --k;
      continue;
    }
    std::istringstream in(line);
    std::uint64_t r = 0, c = 0;
    double v = 1.0;
    if (!(in >> r >> c) || (!pattern && !(in >> v)))
      throw MatrixMarketError("bad entry on data line " + std::to_string(k + 1));
    if (r < 1 || r > rows || c < 1 || c > cols)
      throw MatrixMarketError("entry (" + std::to_string(r) + ", " + std::to_string(c) + ") out of range");
    const auto row = static_cast<std::uint32_t>(r - 1);
    const auto col = static_cast<std::uint32_t>(c - 1);
    t.push_back(Triplet{row, col, order++, v});
    if (symmetry != "general" && row != col) t.push_back(Triplet{col, row, order++, symmetry == "symmetric" ? v : -v});
  }
  return build_csr(static_cast<std::uint32_t>(rows), static_cast<std::uint32_t>(cols), t);
}

CsrMatrix load_matrix_market(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MatrixMarketError("cannot open " + path.string());
  return read_matrix_market(in);
}

CsrMatrix random_csr(std::uint32_t rows, std::uint32_t cols, double density, std::uint64_t seed) {
  if (density < 0.0 || density > 1.0) throw std::invalid_argument("density must be within [0, 1]");
  CsrMatrix m;
  m.rows = rows;
  m.cols = cols;
  m.row_ptr.assign(std::size_t{rows} + 1, 0);
  std::mt19937_64 rng(seed);
  // Uniform double from the top 53 bits keeps the pattern identical across standard libraries.
  auto uniform = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  const std::uint64_t total = std::uint64_t{rows} * cols;
  if (density > 0.0 && total > 0) {
    const double log_q = std::log1p(-density);
    std::uint64_t pos = 0;
    for (;;) {
      // Geometric gap to the next nonzero.
      std::uint64_t skip = 0;
      if (density < 1.0) {
        const double g = std::floor(std::log1p(-uniform()) / log_q);
        if (g >= static_cast<double>(total - pos)) break;
        skip = static_cast<std::uint64_t>(g);
      }
      pos += skip;
      if (pos >= total) break;
      const auto r = static_cast<std::uint32_t>(pos / cols);
      m.col_idx.push_back(static_cast<std::uint32_t>(pos % cols));
      m.values.push_back(1.0 + uniform());
      ++m.row_ptr[r + 1];
      ++pos;
    }
  }
  for (std::uint32_t r = 0; r < rows; ++r) m.row_ptr[r + 1] += m.row_ptr[r];
  return m;
}

bool csr_well_formed(const CsrMatrix& m) {
  if (m.row_ptr.size() != std::size_t{m.rows} + 1 || m.row_ptr.front() != 0 || m.row_ptr.back() != m.nnz())
    return false;
  if (m.values.size() != m.col_idx.size()) return false;
  for (std::uint32_t r = 0; r < m.rows; ++r) {
    if (m.row_ptr[r] > m.row_ptr[r + 1]) return false;
    for (std::uint32_t k = m.row_ptr[r]; k < m.row_ptr[r + 1]; ++k) {
      if (m.col_idx[k] >= m.cols) return false;
      if (k > m.row_ptr[r] && m.col_idx[k] <= m.col_idx[k - 1]) return false;
    }
  }
  return true;
}

}  // namespace bicache
