// Copyright 2026 The crbmgeo Authors
// SPDX-License-Identifier: Apache-2.0

#include "crbm/exact_rank.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <utility>

#include "crbm/error.hpp"

namespace crbm {

using boost::multiprecision::cpp_int;

int exact_rank(const IntMatrix& rows) {
  if (rows.empty()) return 0;
  const std::size_t cols = rows.front().size();
  std::vector<std::vector<cpp_int>> a;
  a.reserve(rows.size());
  for (const auto& row : rows) {
    require(row.size() == cols, ErrorCode::ShapeMismatch, "ragged matrix");
    a.emplace_back(row.begin(), row.end());
  }

  // Bareiss: after each pivot the trailing block stays integral once divided
  // by the previous pivot.
  const std::size_t nrows = a.size();
  cpp_int prev = 1;
  std::size_t rank = 0;
  for (std::size_t col = 0; col < cols && rank < nrows; ++col) {
    std::size_t piv = rank;
    while (piv < nrows && a[piv][col] == 0) ++piv;
    if (piv == nrows) continue;
    std::swap(a[piv], a[rank]);
    for (std::size_t i = rank + 1; i < nrows; ++i) {
      for (std::size_t j = col + 1; j < cols; ++j) {
        a[i][j] = (a[rank][col] * a[i][j] - a[i][col] * a[rank][j]) / prev;
      }
      a[i][col] = 0;
    }
    prev = a[rank][col];
    ++rank;
  }
  return static_cast<int>(rank);
}

}  // namespace crbm
