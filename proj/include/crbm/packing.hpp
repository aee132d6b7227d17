// Copyright 2026 The crbmgeo Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file packing.hpp
 * @brief Recursive star packing sequences of {0,1}^k and the sequences
 *        S, F, R, K, P that count them.
 *
 * Coordinate layout for depth r: coordinates 0..S(r)-1 form blocks of sizes
 * r, r-1, ..., 1 (block L drives level L); the remaining k - S(r) coordinates
 * index independent copies. At level L a branch is fixed by the values of
 * blocks 1..L-1; each of its cylinders fixes blocks L+1..r and the copy index,
 * and its star is centered where block L is zero.
 */

#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstddef>
#include <string>
#include <vector>

#include "crbm/bitspace.hpp"

namespace crbm {

using BigInt = boost::multiprecision::cpp_int;

/// Largest depth for which the exact integer sequences are produced.
inline constexpr int kMaxExactDepth = 512;

struct SeqValues {
  int r = 1;
  BigInt S;
  BigInt F;
  BigInt R;  ///< prod_{i=2}^r (2^i - (i+1)); 1 at r = 1
  double K = 0.5;
  double P = 0.5;
};

/// r(r+1)/2.
long long seq_S(int r);
/// Exact S, F, R and floating K, P. Throws TooLarge beyond kMaxExactDepth.
SeqValues seq_values(int r);
/// K(r) = 2^-S(r) F(r) by its recurrence; any r >= 1.
double seq_K(long long r);
/// P(r) = 1/2 prod_{i=2}^r (1 - (i+1)/2^i); any r >= 1.
double seq_P(long long r);
/// Resets charged by the budget formula: 0 at r = 1, R(r) otherwise.
BigInt resets_needed(int r);
/// Resets issued by build_packing (one per branch cylinder below the last level).
BigInt resets_constructed(int r);

struct ResetEntry {
  std::size_t position = 0;  ///< the reset runs before stars[position]
  CylinderSet cylinder;
};

struct PackingSequence {
  int k = 1;
  int r = 1;
  std::vector<Star> stars;
  std::vector<ResetEntry> resets;
};

/// Throws InfeasibleDepth if k < S(r).
PackingSequence build_packing(int k, int r);

struct PackingReport {
  bool ok = true;
  std::string violation;
  std::size_t index = 0;  ///< offending star (or reset) index when !ok
};

/// Checks stars, disjointness, exact cover, that no star's cylinder meets an
/// earlier star, and that no reset cylinder meets a star already processed.
PackingReport validate_packing(const PackingSequence& seq);

}  // namespace crbm
