// Copyright 2026 The crbmgeo Authors
// SPDX-License-Identifier: Apache-2.0

// One line per acceptance criterion; exit status 1 if any fails.

#include <cstdio>
#include <cstdlib>

#include "crbm/acceptance.hpp"

int main(int argc, char** argv) {
  const std::uint64_t seed = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : crbm::kDefaultAcceptanceSeed;
  int failures = 0;
  for (int id = 1; id <= crbm::kNumCriteria; ++id) {
    const auto r = crbm::run_criterion(id, seed);
    std::printf("[%s] %d %s (%.2f s / %.0f s): %s\n", r.pass ? "PASS" : "FAIL", r.id, r.name.c_str(), r.seconds,
                r.limit_seconds, r.detail.c_str());
    std::fflush(stdout);
    if (!r.pass) ++failures;
  }
  std::printf("%d/%d criteria passed\n", crbm::kNumCriteria - failures, crbm::kNumCriteria);
  return failures == 0 ? 0 : 1;
}
