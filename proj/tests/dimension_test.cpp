// Copyright 2026 The crbmgeo Authors
// SPDX-License-Identifier: Apache-2.0

#include "crbm/dimension.hpp"

#include <gtest/gtest.h>

#include <random>

#include "crbm/bounds.hpp"
#include "crbm/distributions.hpp"
#include "crbm/error.hpp"
#include "crbm/exact_rank.hpp"

namespace crbm {
namespace {

TEST(ExactRankTest, Examples) {
  EXPECT_EQ(exact_rank({}), 0);
  EXPECT_EQ(exact_rank({{1, 0}, {0, 1}}), 2);
  EXPECT_EQ(exact_rank({{1, 2, 3}, {2, 4, 6}, {1, 1, 1}}), 2);
  EXPECT_EQ(exact_rank({{0, 0}, {0, 0}}), 0);
  EXPECT_THROW(exact_rank({{1, 2}, {3}}), Error);
}

TEST(ExactRankTest, AgreesWithNumericOnSmallIntegerMatrices) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    const int rows = 1 + static_cast<int>(rng() % 7);
    const int cols = 1 + static_cast<int>(rng() % 7);
    const int r = 1 + static_cast<int>(rng() % std::min(rows, cols));
    // Product of integer factors of inner size r has rank <= r.
    Eigen::MatrixXd a(rows, r);
    Eigen::MatrixXd b(r, cols);
    for (int i = 0; i < a.size(); ++i) a.data()[i] = static_cast<double>(static_cast<int>(rng() % 7) - 3);
    for (int i = 0; i < b.size(); ++i) b.data()[i] = static_cast<double>(static_cast<int>(rng() % 7) - 3);
    const Eigen::MatrixXd m = a * b;
    IntMatrix im(static_cast<std::size_t>(rows), std::vector<std::int64_t>(static_cast<std::size_t>(cols)));
    for (int i = 0; i < rows; ++i) {
      for (int j = 0; j < cols; ++j) im[i][j] = static_cast<std::int64_t>(m(i, j));
    }
    const int exact = exact_rank(im);
    EXPECT_LE(exact, r);
    EXPECT_EQ(exact, numeric_rank(m));
  }
}

TEST(NumericRankTest, Examples) {
  EXPECT_EQ(numeric_rank(Eigen::MatrixXd::Identity(5, 5)), 5);
  std::mt19937_64 rng(2);
  Eigen::VectorXd u(8);
  Eigen::VectorXd v(8);
  for (int i = 0; i < 8; ++i) {
    u(i) = standard_normal(rng);
    v(i) = standard_normal(rng);
  }
  EXPECT_EQ(numeric_rank(u * v.transpose()), 1);
  Eigen::MatrixXd a(20, 12);
  for (int i = 0; i < a.size(); ++i) a.data()[i] = standard_normal(rng);
  EXPECT_EQ(numeric_rank(a), 12);
  EXPECT_GT(std::abs(a.topRows(12).determinant()), 1e-6);
}

TEST(EstimateTest, Examples) {
  EXPECT_EQ(crbm_dimension_estimate(1, 3, 1), 8);
  EXPECT_EQ(crbm_dimension_estimate(1, 2, 2), 6);
  EXPECT_EQ(crbm_dimension_estimate(1, 1, 0), 1);
  EXPECT_EQ(crbm_dimension_estimate(2, 2, 1), 7);
}

TEST(EstimateTest, StableAcrossSeeds) {
  const int triples[][3] = {{1, 3, 1}, {2, 2, 1}, {1, 2, 2}, {1, 1, 1}, {2, 1, 2}};
  for (const auto& t : triples) {
    const int first = crbm_dimension_estimate(t[0], t[1], t[2], 8, 0);
    for (std::uint64_t seed = 1; seed < 5; ++seed) {
      EXPECT_EQ(crbm_dimension_estimate(t[0], t[1], t[2], 8, seed), first);
    }
  }
}

TEST(TropicalTest, Examples) {
  EXPECT_EQ(tropical_rank_mod_inputs(1, 3, {}), 3);
  EXPECT_EQ(tropical_rank_mod_inputs(2, 2, {}), 2);
  EXPECT_TRUE(slicing_condition_holds(1, 3, {0}));
  EXPECT_EQ(tropical_rank_mod_inputs(1, 3, {0}), 8);
}

TEST(TropicalTest, SeparatedBallsReachParameterCount) {
  for (int k = 0; k <= 2; ++k) {
    for (int n = 1; k + n <= 6; ++n) {
      const int width = k + n;
      const int m = static_cast<int>(code_A_exact(width, 4)) - 1;
      if (m < 1) continue;
      const auto centers = greedy_centers(width, m);
      for (std::size_t i = 0; i < centers.size(); ++i) {
        for (std::size_t j = i + 1; j < centers.size(); ++j) EXPECT_GE(std::popcount(centers[i] ^ centers[j]), 4);
      }
      if (!slicing_condition_holds(k, n, centers)) continue;
      EXPECT_EQ(tropical_rank_mod_inputs(k, n, centers), (k + n + 1) * m + n) << k << " " << n;
    }
  }
}

TEST(CertifyTest, OrderingInvariants) {
  for (int k = 0; k <= 2; ++k) {
    for (int n = 1; n <= 3; ++n) {
      for (int m = 0; m <= 4; ++m) {
        const auto rep = certify_dimension(k, n, m, 4, 7);
        EXPECT_LE(rep.tropical, rep.numeric) << k << n << m;
        EXPECT_LE(rep.numeric, rep.expected.parameter_count);
        EXPECT_LE(rep.numeric, rep.expected.ambient);
        if (m >= code_K_exact(k + n, 1)) EXPECT_EQ(rep.numeric, rep.expected.ambient);
      }
    }
  }
}

TEST(CertifyTest, Examples) {
  const auto a = certify_dimension(1, 3, 1);
  EXPECT_TRUE(a.agree);
  EXPECT_EQ(a.numeric, 8);
  EXPECT_EQ(a.tropical, 8);
  const auto b = certify_dimension(1, 2, 2);
  EXPECT_EQ(b.expected.regime, "full");
  EXPECT_EQ(b.numeric, 6);
  const auto c = certify_dimension(2, 2, 1);
  EXPECT_EQ(c.expected.value, 7);
  EXPECT_EQ(c.numeric, 7);
  EXPECT_TRUE(c.agree);
}

}  // namespace
}  // namespace crbm
