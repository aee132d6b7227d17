// Copyright 2026 The crbmgeo Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file acceptance.hpp
 * @brief The end-to-end acceptance checks, shared by the test binary and
 *        `crbm verify-all`.
 */

#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace crbm {

inline constexpr int kNumCriteria = 9;
inline constexpr std::uint64_t kDefaultAcceptanceSeed = 20260101;

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;    ///< deterministic summary of what was measured
  double seconds = 0.0;  ///< wall time, compared against the criterion's limit
  double limit_seconds = 0.0;
};

/// Runs criterion `id` (1-based). Exceptions inside a criterion count as failure.
CriterionResult run_criterion(int id, std::uint64_t seed = kDefaultAcceptanceSeed);

std::vector<CriterionResult> run_acceptance(std::uint64_t seed = kDefaultAcceptanceSeed);

}  // namespace crbm
