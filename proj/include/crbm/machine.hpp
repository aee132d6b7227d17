// Copyright 2026 The crbmgeo Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file machine.hpp
 * @brief Exact CRBM / RBM evaluation by enumeration of the visible states.
 *
 * The hidden sum factorizes, so
 *   log p~(x, y) = b.y + sum_j softplus(W_j.y + V_j.x + c_j)
 * and only the k + n visible units are enumerated. Joint indices put the
 * inputs in the low bits: v = x | (y << k).
 */

#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <vector>

#include "crbm/distributions.hpp"

namespace crbm {

struct CrbmParams {
  int k = 0;
  int n = 1;
  int m = 0;
  Eigen::MatrixXd W;  ///< m x n, hidden-output
  Eigen::MatrixXd V;  ///< m x k, hidden-input
  Eigen::VectorXd b;  ///< n, output biases
  Eigen::VectorXd c;  ///< m, hidden biases

  static CrbmParams zeros(int k, int n, int m);
  /// Entries i.i.d. N(0, scale^2).
  static CrbmParams random(int k, int n, int m, std::mt19937_64& rng, double scale = 1.0);

  /// Throws ShapeMismatch / InvalidArgument on bad shapes or non-finite entries.
  void validate() const;

  /// n*m + k*m + n + m.
  [[nodiscard]] int num_params() const noexcept { return n * m + k * m + n + m; }

  /// Order: W row-major, V row-major, b, c.
  [[nodiscard]] Eigen::VectorXd flatten() const;
  static CrbmParams unflatten(int k, int n, int m, const Eigen::VectorXd& theta);
};

/// Numerically stable log(1 + e^a).
double softplus(double a) noexcept;

/// Logistic function.
double sigmoid(double a) noexcept;

/// log sum_i exp(v_i).
double log_sum_exp(const std::vector<double>& v);

/// Unnormalized log-probabilities of all visible states, indexed x | (y << k).
std::vector<double> log_unnormalized(const CrbmParams& p);

ConditionalTable eval_conditional(const CrbmParams& p);

/// Visible distribution of the RBM (k must be 0).
Dist eval_joint_rbm(const CrbmParams& p);

/// The same weights read as an RBM on k + n visibles (inputs low bits).
CrbmParams as_joint_rbm(const CrbmParams& p);

/// Splits an RBM over k + n visibles into CRBM params with the first k as inputs.
CrbmParams as_conditional(const CrbmParams& joint, int k);

CrbmParams append_hidden_unit(const CrbmParams& p, const Eigen::VectorXd& w_out,
                              const Eigen::VectorXd& w_in, double bias);

CrbmParams remove_last_hidden_unit(const CrbmParams& p);

struct InferenceMap {
  int k = 0;
  int n = 1;
  int m = 0;
  std::vector<std::uint64_t> hidden;  ///< argmax z per visible state, bit j = unit j
  std::vector<bool> tie;              ///< some unit had zero pre-activation

  [[nodiscard]] bool any_tie() const;
};

/// Per visible state, argmax_z z.(Vx + Wy + c); ties go to the smaller z (m <= 64).
InferenceMap inference_map(const CrbmParams& p);

/// d p(y|x) / d theta. Rows x * 2^n + y, columns in flatten() order.
Eigen::MatrixXd conditional_jacobian(const CrbmParams& p);

}  // namespace crbm
