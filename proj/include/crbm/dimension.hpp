// Copyright 2026 The crbmgeo Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file dimension.hpp
 * @brief Model dimension of CRBMs: Jacobian rank at random parameters and an
 *        exact tropical lower bound from Hamming-ball slicings.
 */

#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

#include "crbm/bitspace.hpp"
#include "crbm/bounds.hpp"
#include "crbm/exact_rank.hpp"

namespace crbm {

/// Singular-value threshold sigma_max * max(rows, cols) * 2^-40, times `scale`.
/// Throws UnstableRank if halving or doubling the threshold changes the rank.
int numeric_rank(const Eigen::MatrixXd& a, double scale = 1.0);

/// Max over `trials` N(0,1) parameter draws of the conditional Jacobian rank.
int crbm_dimension_estimate(int k, int n, int m, int trials = 8, std::uint64_t seed = 0);

/// Rows v = x | (y << k); blocks (1, v) and, per center, (1, v) masked by the
/// radius-1 ball around that center.
IntMatrix tropical_matrix(int k, int n, const std::vector<Index>& centers);

/// rank([A | X]) - 2^k, X the indicator columns of the input states.
int tropical_rank_mod_inputs(int k, int n, const std::vector<Index>& centers);

/// m ball centers in {0,1}^width: first fit at distance >= 4, then >= 3, then
/// any unused state.
std::vector<Index> greedy_centers(int width, int m);

/// Union of the balls contains no input cylinder {x} x {0,1}^n and its
/// complement has full affine rank.
bool slicing_condition_holds(int k, int n, const std::vector<Index>& centers);

struct DimensionReport {
  int k = 0;
  int n = 1;
  int m = 0;
  DimExpectation expected;
  int numeric = 0;
  int tropical = 0;
  std::vector<Index> centers;
  bool slicing_condition = false;
  bool agree = false;  ///< numeric == expected value and tropical <= numeric
};

DimensionReport certify_dimension(int k, int n, int m, int trials = 8, std::uint64_t seed = 0);

}  // namespace crbm
