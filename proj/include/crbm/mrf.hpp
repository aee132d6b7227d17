// Copyright 2026 The crbmgeo Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file mrf.hpp
 * @brief Binary Markov random fields and their compilation into RBM weights
 *        by cancelling interaction coefficients one hidden unit at a time.
 *
 * Faces are bitmasks over the N variables (variable i is bit i-1).
 */

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "crbm/distributions.hpp"
#include "crbm/machine.hpp"

namespace crbm {

using FaceMask = std::uint32_t;

struct SimplicialComplex {
  int N = 1;
  std::vector<FaceMask> faces;  ///< ascending bitmask order, contains 0

  /// Throws InvalidArgument unless the family is downward closed and contains the empty face.
  static SimplicialComplex make(int N, std::vector<FaceMask> faces);
  /// Downward closure of the generators (plus the empty face).
  static SimplicialComplex closure(int N, const std::vector<FaceMask>& generators);
  /// All 2^N subsets.
  static SimplicialComplex full(int N);

  [[nodiscard]] bool contains(FaceMask a) const;
};

struct MrfModel {
  SimplicialComplex complex;
  std::vector<double> theta;  ///< aligned with complex.faces

  static MrfModel make(SimplicialComplex complex, std::vector<double> theta);
  [[nodiscard]] double theta_of(FaceMask a) const;
};

/// log p(x) + log Z = sum_A theta_A prod_{i in A} x_i, for every x.
std::vector<double> mrf_energy(const MrfModel& model);

Dist mrf_distribution(const MrfModel& model);

/// Coefficients J_B of f(x) = sum_B J_B prod_{i in B} x_i from the 2^N table f.
std::vector<double> mobius_coefficients(const std::vector<double>& values);

/// Inverse of mobius_coefficients.
std::vector<double> mobius_evaluate(const std::vector<double>& coefficients);

struct YounesSolution {
  double w = 0.0;
  double b = 0.0;
  int eps = 1;                   ///< +1: S = x_1+...+x_N; -1: last variable enters with -1
  double t = 0.0;                ///< scale on the base direction
  std::vector<double> coefficients;  ///< all Mobius coefficients of log(1 + e^{w S + b})
};

/// Solves for w, b with top coefficient J_[N] = rho (to about 1e-12 relative).
/// Throws NoBracket if the scale would exceed 1e3.
YounesSolution younes_solve(double rho, int N);

/// log(1 + exp(w S^eps(x) + b)) on {0,1}^N.
std::vector<double> younes_values(const YounesSolution& s, int N);

struct MrfCompileResult {
  CrbmParams rbm;                  ///< k = 0, one hidden unit per cancelled face
  MrfModel correction;             ///< on J_keep; hadamard(p, correction) = rbm
  std::vector<FaceMask> unit_faces;  ///< face cancelled by each hidden unit
};

/// Throws BudgetMismatch if m_budget is below the number of faces to cancel;
/// surplus units get zero weights.
MrfCompileResult compile_mrf_to_rbm(const MrfModel& model, const SimplicialComplex& j_keep,
                                    std::optional<int> m_budget = std::nullopt);

/// Faces of I inside the first k variables.
SimplicialComplex input_faces(const SimplicialComplex& complex, int k);

/// Number of hidden units needed: faces of I not inside [k] that are not singletons.
int conditional_mrf_units(const SimplicialComplex& complex, int k);

/// CRBM whose conditionals equal those of the MRF with the first k variables as inputs.
CrbmParams compile_conditional_mrf(const MrfModel& model, int k);

/// MRF on the complex 2^[k] x J whose conditional at input x has interaction
/// parameters theta_per_input[x] (aligned with J's faces).
MrfModel product_complex_model(int k, const SimplicialComplex& j,
                               const std::vector<std::vector<double>>& theta_per_input);

}  // namespace crbm
