// Copyright 2026 The crbmgeo Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file ltn.hpp
 * @brief Two-layer linear threshold networks f(x) = hs(W^T hs(Vx + c) + b)
 *        and their embedding into CRBMs by scaling the weights.
 */

#pragma once

#include <Eigen/Dense>

#include <vector>

#include "crbm/distributions.hpp"
#include "crbm/machine.hpp"

namespace crbm {

/// Absolute pre-activation below which a threshold unit counts as tied.
inline constexpr double kTieTolerance = 1e-12;

struct ThresholdNet {
  int k = 1;
  int m = 0;
  int n = 1;
  Eigen::MatrixXd V;  ///< m x k
  Eigen::VectorXd c;  ///< m
  Eigen::MatrixXd W;  ///< m x n, same orientation as CrbmParams::W
  Eigen::VectorXd b;  ///< n

  static ThresholdNet zeros(int k, int m, int n);
  void validate() const;
};

/// Throws TieEncountered if any pre-activation is (numerically) zero.
Index ltn_eval(const ThresholdNet& net, Index x);

/// f as a table over all 2^k inputs.
std::vector<Index> ltn_table(const ThresholdNet& net);

/// True iff no input produces a tied pre-activation in either layer.
bool is_generic(const ThresholdNet& net);

/// Shifts the bias of every unit that ties on some input by `delta`, first
/// layer then output layer, so that the result is generic.
ThresholdNet perturb_to_generic(const ThresholdNet& net, double delta = 1e-9);

/// m = k units counting the ones of x; alternating output weights give parity.
ThresholdNet parity_net(int k);

/// Rows delta_{f(x)}.
ConditionalTable deterministic_table(int k, int n, const std::vector<Index>& f);

struct EmbedResult {
  CrbmParams params;
  double alpha = 1.0;
  double t = 1.0;
  std::vector<double> tv_trace;  ///< TV at each tried scale, in doubling order
};

/// Scales (V, c) by t alpha and (W, b) by t, doubling t until the conditional
/// is within eps (row TV) of delta_{f(x)}. Throws NotGeneric, ScaleCapExceeded.
EmbedResult embed_ltn_in_crbm(const ThresholdNet& net, double eps);

/// Rows prod_i Bernoulli(y_i; sigmoid((W^T z* + b)_i)) with z* = hs(Vx + c).
ConditionalTable feedforward_sigmoid_table(const ThresholdNet& net);

/// Scales only the first layer; the output layer keeps its finite weights.
/// Throws NotGeneric (first layer), ScaleCapExceeded.
EmbedResult embed_sigmoid_output(const ThresholdNet& net, double eps);

/// f(x) = hs(W^T hs(W f(x) + V x + c) + b) for all x; false on any tie.
bool check_deter_fixed_point(const CrbmParams& p, const std::vector<Index>& f);

}  // namespace crbm
