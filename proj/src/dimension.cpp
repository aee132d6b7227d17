// Copyright 2026 The crbmgeo Authors
// SPDX-License-Identifier: Apache-2.0

#include "crbm/dimension.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <random>

#include "crbm/error.hpp"
#include "crbm/machine.hpp"

namespace crbm {
namespace {

int count_above(const Eigen::VectorXd& sv, double tol) {
  int r = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > tol) ++r;
  }
  return r;
}

std::vector<std::int64_t> affine_row(Index v, int width) {
  std::vector<std::int64_t> row{1};
  for (int i = 0; i < width; ++i) row.push_back(bit(v, i) ? 1 : 0);
  return row;
}

}  // namespace

int numeric_rank(const Eigen::MatrixXd& a, double scale) {
  require(a.allFinite(), ErrorCode::InvalidArgument, "matrix has non-finite entries");
  if (a.size() == 0) return 0;
  const Eigen::VectorXd sv = a.jacobiSvd().singularValues();
  const double smax = sv.size() > 0 ? sv(0) : 0.0;
  if (smax == 0.0) return 0;
  const double tol = scale * smax * static_cast<double>(std::max(a.rows(), a.cols())) * std::ldexp(1.0, -40);
  const int r = count_above(sv, tol);
  require(count_above(sv, 0.5 * tol) == r && count_above(sv, 2.0 * tol) == r, ErrorCode::UnstableRank,
          "rank changes under threshold x{1/2, 2}");
  return r;
}

int crbm_dimension_estimate(int k, int n, int m, int trials, std::uint64_t seed) {
  require(trials >= 1, ErrorCode::InvalidArgument, "need at least one trial");
  std::vector<std::future<int>> jobs;
  for (int t = 0; t < trials; ++t) {
    jobs.push_back(std::async(std::launch::async, [=] {
      std::seed_seq sq{seed, static_cast<std::uint64_t>(t)};
      std::mt19937_64 rng(sq);
      return numeric_rank(conditional_jacobian(CrbmParams::random(k, n, m, rng)));
    }));
  }
  int best = 0;
  for (auto& j : jobs) best = std::max(best, j.get());
  return best;
}

IntMatrix tropical_matrix(int k, int n, const std::vector<Index>& centers) {
  const int width = k + n;
  check_width(width);
  IntMatrix rows;
  for (Index v = 0; v < space_size(width); ++v) {
    const auto base = affine_row(v, width);
    std::vector<std::int64_t> row = base;
    for (Index c : centers) {
      const bool in = popcount(v ^ c) <= 1;
      for (auto e : base) row.push_back(in ? e : 0);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

int tropical_rank_mod_inputs(int k, int n, const std::vector<Index>& centers) {
  IntMatrix rows = tropical_matrix(k, n, centers);
  const Index nx = space_size(k);
  for (Index v = 0; v < rows.size(); ++v) {
    for (Index x = 0; x < nx; ++x) rows[v].push_back((v & (nx - 1U)) == x ? 1 : 0);
  }
  return exact_rank(rows) - static_cast<int>(nx);
}

std::vector<Index> greedy_centers(int width, int m) {
  check_width(width);
  require(m >= 0, ErrorCode::InvalidArgument, "m must be >= 0");
  std::vector<Index> chosen;
  const auto fill = [&](int dist) {
    for (Index v = 0; v < space_size(width) && static_cast<int>(chosen.size()) < m; ++v) {
      const bool ok = std::all_of(chosen.begin(), chosen.end(),
                                  [&](Index c) { return popcount(c ^ v) >= dist; });
      if (ok) chosen.push_back(v);
    }
  };
  fill(4);
  fill(3);
  fill(1);
  return chosen;
}

bool slicing_condition_holds(int k, int n, const std::vector<Index>& centers) {
  const int width = k + n;
  check_width(width);
  std::vector<bool> covered(space_size(width), false);
  for (Index c : centers) {
    covered[c] = true;
    for (int i = 0; i < width; ++i) covered[c ^ (Index{1} << i)] = true;
  }
  for (Index x = 0; x < space_size(k); ++x) {
    bool all = true;
    for (Index y = 0; y < space_size(n) && all; ++y) all = covered[x | (y << k)];
    if (all) return false;
  }
  std::vector<Index> rest;
  for (Index v = 0; v < covered.size(); ++v) {
    if (!covered[v]) rest.push_back(v);
  }
  return affine_rank(rest, width) == width + 1;
}

DimensionReport certify_dimension(int k, int n, int m, int trials, std::uint64_t seed) {
  DimensionReport rep;
  rep.k = k;
  rep.n = n;
  rep.m = m;
  rep.expected = expected_dim(k, n, m);
  rep.numeric = crbm_dimension_estimate(k, n, m, trials, seed);
  rep.centers = greedy_centers(k + n, m);
  rep.tropical = tropical_rank_mod_inputs(k, n, rep.centers);
  rep.slicing_condition = slicing_condition_holds(k, n, rep.centers);
  rep.agree = rep.numeric == rep.expected.value && rep.tropical <= rep.numeric;
  return rep;
}

}  // namespace crbm
