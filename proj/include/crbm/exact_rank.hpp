// Copyright 2026 The crbmgeo Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

namespace crbm {

/// Dense integer matrix, row-major rows.
using IntMatrix = std::vector<std::vector<std::int64_t>>;

/// Rank over the rationals by fraction-free (Bareiss) elimination on
/// arbitrary-precision integers. Rows may be empty; ragged input is rejected.
int exact_rank(const IntMatrix& rows);

}  // namespace crbm
