// Copyright 2026 The crbmgeo Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file compiler.hpp
 * @brief Compile target conditional tables into explicit CRBM parameters by
 *        sequential sharing steps over a star packing sequence.
 */

#pragma once

#include <cstdint>
#include <string>

#include "crbm/bounds.hpp"
#include "crbm/distributions.hpp"
#include "crbm/machine.hpp"

namespace crbm {

struct CompileOptions {
  double eps = 1e-2;
  double tau0 = 16.0;
  double tau_max = 1024.0;
};

struct CompileReport {
  std::string mode;
  int r = 0;
  int hidden_units_used = 0;
  int resets_used = 0;
  int star_steps_used = 0;
  int stars = 0;
  int resets_scheduled = 0;
  double achieved_tv = 0.0;  ///< against the (clamped) target
  double clamp_error = 0.0;  ///< row TV between the clamped and the given target
  double tau_final = 0.0;
  BigInt budget_bound = 0;
  bool within_budget = false;
};

struct CompileResult {
  CrbmParams params;
  CompileReport report;
};

/// Floors entries at eps / 2^(n+2) and renormalizes each row.
ConditionalTable clamp_target(const ConditionalTable& target, double eps);

/// Sharing steps toward every output state. Throws BudgetExceeded, InfeasibleDepth.
CompileResult compile_universal(const ConditionalTable& target, int r, const CompileOptions& opts = {});

/// Point-mass steps over the support of the joint (uniform inputs) x target.
/// Throws SupportTooLarge unless the target is in the support class of d.
CompileResult compile_support_points(const ConditionalTable& target, std::uint64_t d,
                                     const CompileOptions& opts = {});

/// All rows share one support T; |T| - 1 steps per star. Throws SupportsDiffer.
CompileResult compile_common_support(const ConditionalTable& target, int r,
                                     const CompileOptions& opts = {});

/// Rows constant on the blocks fixed by the first l output bits; 2^l - 1 steps
/// per star. Throws NotBlockConstant.
CompileResult compile_partition(const ConditionalTable& target, int l, int r,
                                const CompileOptions& opts = {});

struct WitnessResult {
  CrbmParams params;
  double divergence = 0.0;  ///< kl_conditional(target, model) in bits
  int l = 0;
  int r = 0;
  int hidden_units_used = 0;
};

/// Projects the target onto the cylinder partition of the largest l that
/// m_budget allows and compiles the projection; l = 0 yields the uniform model.
WitnessResult divergence_witness(const ConditionalTable& target, long long m_budget,
                                 double eps_div = 1e-3);

}  // namespace crbm
