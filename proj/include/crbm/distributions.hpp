// Copyright 2026 The crbmgeo Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file distributions.hpp
 * @brief Dense distributions on {0,1}^N and 2^k x 2^n conditional tables.
 *
 * Divergences are in bits. Zeros are stored exactly.
 */

#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "crbm/bitspace.hpp"

namespace crbm {

inline constexpr double kSumTolerance = 1e-12;

struct Dist {
  int width = 0;
  std::vector<double> probs;

  /// Validates non-negativity and unit sum (within kSumTolerance).
  static Dist make(int width, std::vector<double> probs);
  /// Normalizes a non-negative vector with positive sum.
  static Dist normalized(int width, std::vector<double> weights);
  static Dist uniform(int width);
  static Dist point_mass(int width, Index at);

  [[nodiscard]] std::size_t size() const noexcept { return probs.size(); }
  [[nodiscard]] double operator[](Index v) const { return probs[v]; }
  [[nodiscard]] bool strictly_positive() const noexcept;
  [[nodiscard]] std::size_t support_size() const noexcept;
};

struct ConditionalTable {
  int k = 0;
  int n = 1;
  std::vector<Dist> rows;

  static ConditionalTable make(int k, int n, std::vector<Dist> rows);
  static ConditionalTable uniform(int k, int n);

  [[nodiscard]] const Dist& row(Index x) const { return rows[x]; }
  [[nodiscard]] double at(Index x, Index y) const { return rows[x].probs[y]; }
  [[nodiscard]] bool strictly_positive() const noexcept;
  /// Number of (x, y) with p(y|x) > 0.
  [[nodiscard]] std::size_t nonzeros() const noexcept;
};

/// Blocks of a partition of {0,1}^n.
struct PartitionModel {
  int n = 1;
  std::vector<std::vector<Index>> blocks;

  /// Throws InvalidArgument unless the blocks cover {0,1}^n exactly once.
  static PartitionModel make(int n, std::vector<std::vector<Index>> blocks);
  /// Blocks indexed by the values of the first l bits.
  static PartitionModel cylinder(int n, int l);
};

struct SupportClass {
  int k = 0;
  int n = 1;
  std::uint64_t d = 0;

  static SupportClass make(int k, int n, std::uint64_t d);
};

/// Renormalized entrywise product. Throws DisjointSupports.
Dist hadamard(const Dist& p, const Dist& q);

/// D(p||q) in bits; +infinity when supp(p) is not inside supp(q).
double kl_dist(const Dist& p, const Dist& q);

/// Row divergences averaged under the uniform input distribution.
double kl_conditional(const ConditionalTable& p, const ConditionalTable& q);

/// L1 distance sum_v |p(v) - q(v)|.
double l1_distance(const Dist& p, const Dist& q);

/// max_x sum_y |p(y|x) - q(y|x)|.
double tv_row_distance(const ConditionalTable& p, const ConditionalTable& q);

/// Inputs occupy the low k bits of the joint index. Throws ZeroInputMass.
ConditionalTable conditional_of_joint(const Dist& joint, int k);

/// Joint q(x) p(y|x) over k+n bits.
Dist joint_of(const Dist& input_marginal, const ConditionalTable& p);

bool in_support_class(const ConditionalTable& p, const SupportClass& c);

/// Divergence minimizer over the partition model (block mass spread
/// uniformly inside each block) and the attained divergence.
std::pair<Dist, double> partition_project(const Dist& p, const PartitionModel& m);

/// True if p is constant on every block (absolute tolerance tol).
bool is_block_constant(const Dist& p, const PartitionModel& m, double tol = 1e-12);

/// Flat Dirichlet draw on the 2^width simplex.
Dist random_dist(int width, std::mt19937_64& rng);

/// Rows drawn independently from the flat Dirichlet; deterministic in seed.
ConditionalTable random_conditional(int k, int n, std::uint64_t seed);

/// Uniform real in [0, 1) from the top 53 bits of one draw (portable).
double uniform01(std::mt19937_64& rng);

/// Standard normal via Box-Muller on uniform01 (portable across libraries).
double standard_normal(std::mt19937_64& rng);

}  // namespace crbm
