// Copyright 2026 The crbmgeo Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file bounds.hpp
 * @brief Closed-form bounds on CRBM size, dimension and divergence, plus
 *        exact small-length code sizes A(n, d) and K(n, d).
 */

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "crbm/packing.hpp"

namespace crbm {

/// Largest code length handled by the exact searches.
inline constexpr int kMaxExactCodeLength = 6;

/// Largest set with pairwise Hamming distance >= d. Throws TooLarge for n > 6.
long long code_A_exact(int n, int d);
/// Smallest set whose radius-d balls cover {0,1}^n. Throws TooLarge for n > 6.
long long code_K_exact(int n, int d);

/// 2^(n - floor(log2(n^2 - n + 2))); only d = 4 is offered.
long long code_A_lower(int n, int d = 4);
/// 2^(n - floor(log2(n + 1))); only d = 1 is offered.
long long code_K_upper(int n, int d = 1);

struct DimExpectation {
  long long value = 0;
  std::string regime;  ///< "parameter-counting", "full" or "unresolved"
  long long parameter_count = 0;
  long long ambient = 0;
  bool exact_codes = false;  ///< exact A/K were used (k + n <= 6)
};

DimExpectation expected_dim(int k, int n, int m);

/// (n+k)m + n + m + k - (2^k - 1).
long long dim_lower_bound_small_m(int k, int n, int m);

/// 2^(k - S(r)) F(r) per_star + resets_needed(r). Requires k >= S(r).
BigInt star_budget(int k, int r, const BigInt& per_star);
/// m^(r)_{k,n} = star_budget(k, r, 2^n - 1).
BigInt universal_budget(int k, int n, int r);
/// Feasible depths r (S(r) <= k).
std::vector<int> feasible_depths(int k);
/// argmin_r of universal_budget, ties to the smaller r. Throws InfeasibleDepth for k = 0.
int best_depth(int k, int n);

struct UniversalTable {
  int k = 0;
  int n = 1;
  std::vector<std::pair<int, BigInt>> by_depth;
  std::optional<BigInt> minimum;
  int best_r = 0;
  BigInt rbm_route;  ///< 2^(k+n-1) - 1
  BigInt necessary;  ///< ceil((2^k(2^n-1) - n) / (n+k+1))
};

UniversalTable universal_m_table(int k, int n);

struct DivergenceBound {
  double value = 0.0;
  bool prop_applies = false;  ///< m <= 2^(n+k-1) - 1
  double prop_term = 0.0;     ///< RBM-route term (0 beyond its range)
  int l_star = 0;             ///< largest l with a feasible depth, 0 if none
  int r_star = 0;
};

/// (n+k) - floor(log2(m+1)) - (m+1)/2^floor(log2(m+1)), or 0 once m >= 2^(n+k-1) - 1.
double rbm_divergence_term(int k, int n, long long m);
/// Largest l in [1, n] such that some depth r has star_budget(k, r, 2^l - 1) <= m.
std::pair<int, int> largest_feasible_l(int k, int n, long long m);
DivergenceBound divergence_bound(int k, int n, long long m);
double divergence_upper(int k, int n, long long m);

struct DeterministicBounds {
  BigInt sufficient;       ///< min{2^k - 1, ceil(3n 2^k / (k+2))}
  long long necessary = 0;  ///< max(0, ceil(2^(k/2) - (n+k)^2 / (2n)))
  BigInt counting_exact;   ///< least m with m(n+k)^2 + n m^2 >= n 2^k
};

DeterministicBounds deterministic_m_bounds(int k, int n);

/// 2^(N^2 M).
BigInt ltf_count_bound(int inputs, int outputs);

}  // namespace crbm
