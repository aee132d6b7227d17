// Copyright 2026 The crbmgeo Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file sharing.hpp
 * @brief Sharing steps p -> lambda p + (1 - lambda) p * s and their hidden units.
 *
 * Appending a hidden unit with visible weights w and bias c multiplies the
 * unnormalized joint by 1 + exp(w.v + c). Against the current joint p this is
 * the sharing step with s proportional to exp(w.v) and
 *   logit(lambda) = -c - log sum_u p(u) exp(w.u).
 * Steps are stored with log-odds and logit(lambda) so that lambda within
 * 1e-300 of 0 or 1 stays representable.
 */

#pragma once

#include <Eigen/Dense>

#include <map>
#include <optional>
#include <span>
#include <vector>

#include "crbm/bitspace.hpp"
#include "crbm/distributions.hpp"
#include "crbm/machine.hpp"

namespace crbm {

/// Bias magnitude beyond which a unit is reported as BiasCapExceeded.
inline constexpr double kBiasCap = 1e6;

struct SharingStep {
  int width = 1;
  double logit_lambda = 0.0;    ///< log(lambda / (1 - lambda)), may be +-inf
  std::vector<double> log_odds;  ///< log(s_i(1) / s_i(0))

  static SharingStep make(double lambda, std::vector<double> log_odds);
  static SharingStep from_logit(double logit_lambda, std::vector<double> log_odds);

  [[nodiscard]] double lambda() const noexcept;
  [[nodiscard]] double one_minus_lambda() const noexcept;
  /// The product distribution s.
  [[nodiscard]] Dist product() const;
};

struct HiddenUnit {
  Eigen::VectorXd w;  ///< visible weights, inputs first
  double bias = 0.0;
};

/// Unnormalized log-probabilities over k + n visibles, index x | (y << k).
struct LogJoint {
  int k = 0;
  int n = 1;
  std::vector<double> logp;

  static LogJoint from_dist(const Dist& p, int k);
  static LogJoint from_params(const CrbmParams& p);

  [[nodiscard]] int width() const noexcept { return k + n; }
  [[nodiscard]] Dist to_dist() const;
  [[nodiscard]] ConditionalTable conditional() const;
  /// log of p(atom | x) where atom is a cylinder over the outputs.
  [[nodiscard]] double log_row_mass(Index x, const CylinderSet& atom) const;
  void apply(const HiddenUnit& unit);
  void apply(const SharingStep& step);
};

/// lambda p + (1 - lambda) hadamard(p, s). Throws DegenerateStep.
Dist apply_sharing(const Dist& p, const SharingStep& step);

/// Weights and bias whose unit realizes `step` on top of p_current.
/// Throws LambdaZero for lambda = 0 and BiasCapExceeded when |bias| > kBiasCap.
HiddenUnit step_to_hidden_unit(const Dist& p_current, const SharingStep& step);
HiddenUnit step_to_hidden_unit(const LogJoint& p_current, const SharingStep& step);

/// Inverse of step_to_hidden_unit.
SharingStep hidden_unit_to_step(const LogJoint& p_current, const HiddenUnit& unit);

/// Affine function g(x) = offset + weights.x.
struct AffineFit {
  std::vector<double> weights;
  double offset = 0.0;

  [[nodiscard]] double operator()(Index x) const;
};

/// Affine g that takes `values` (in Star::members_in_star_order) on the star
/// and drops by `penalty` per fixed coordinate of the cylinder that x violates.
AffineFit fit_star_affine(const Star& star, std::span<const double> values, double penalty);

/// max of the fitted g over the star's cylinder.
double cylinder_max(const Star& star, const AffineFit& g);

/// A step concentrated on an input cylinder and an output atom.
struct SharpStepSpec {
  CylinderSet inputs;
  CylinderSet atom;
  double tau = 16.0;
};

/// Units that move the star rows of `current` from near the start atom
/// atoms[0] to the atom masses `masses[x][j]` (rows keyed by input state).
/// Atoms after the first are filled in list order. Rows outside the star's
/// cylinder move by at most about e^-tau. Entry j - 1 is the unit for atom j,
/// empty when no star row wants mass on that atom.
std::vector<std::optional<HiddenUnit>> design_fill_units(const LogJoint& current, const Star& star,
                                          const std::map<Index, std::vector<double>>& masses,
                                          const std::vector<CylinderSet>& atoms, double tau);

/// Output states in ascending order as the sharing targets; one step per
/// non-zero output state (2^n - 1 steps, lambda = 1 for unused states). q_rows maps each star input to its target row.
std::vector<SharingStep> make_star_fill_steps(const LogJoint& current, const Star& star,
                                              const std::map<Index, Dist>& q_rows, double tau);

/// Distribution-free reset: log-odds +-tau on the fixed input coordinates of c
/// and on every output bit, 0 on free inputs, lambda = e^(-tau/2).
SharingStep make_reset_step(const CylinderSet& c, const State& y_target, double tau);

/// Reset that adapts its bias to the current joint so that every row in
/// spec.inputs ends within about e^-tau of the atom, all other rows moving by
/// at most about e^-tau.
HiddenUnit design_reset_unit(const LogJoint& current, const SharpStepSpec& spec);

}  // namespace crbm
