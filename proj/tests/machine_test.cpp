// Copyright 2026 The crbmgeo Authors
// SPDX-License-Identifier: Apache-2.0

#include "crbm/machine.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "crbm/error.hpp"

namespace crbm {
namespace {

// Sums exp(-energy) over every hidden configuration z explicitly.
ConditionalTable brute_force_conditional(const CrbmParams& p) {
  std::vector<Dist> rows;
  for (Index x = 0; x < space_size(p.k); ++x) {
    std::vector<double> w(space_size(p.n), 0.0);
    for (Index y = 0; y < space_size(p.n); ++y) {
      for (Index z = 0; z < space_size(p.m); ++z) {
        double e = 0.0;
        for (int i = 0; i < p.n; ++i) e += bit(y, i) * p.b(i);
        for (int j = 0; j < p.m; ++j) {
          if (!bit(z, j)) continue;
          e += p.c(j);
          for (int i = 0; i < p.n; ++i) e += bit(y, i) * p.W(j, i);
          for (int i = 0; i < p.k; ++i) e += bit(x, i) * p.V(j, i);
        }
        w[y] += std::exp(e);
      }
    }
    rows.push_back(Dist::normalized(p.n, w));
  }
  return ConditionalTable{p.k, p.n, std::move(rows)};
}

Dist softmax_bits(const Eigen::VectorXd& b) {
  std::vector<double> w(space_size(static_cast<int>(b.size())));
  for (Index y = 0; y < w.size(); ++y) {
    double e = 0.0;
    for (int i = 0; i < b.size(); ++i) e += bit(y, i) * b(i);
    w[y] = std::exp(e);
  }
  return Dist::normalized(static_cast<int>(b.size()), w);
}

TEST(EvalTest, NoHiddenUnitsGivesSoftmaxRows) {
  std::mt19937_64 rng(1);
  auto p = CrbmParams::random(2, 2, 0, rng);
  const auto t = eval_conditional(p);
  const Dist expected = softmax_bits(p.b);
  for (const auto& row : t.rows) EXPECT_LE(l1_distance(row, expected), 1e-14);
}

TEST(EvalTest, ZeroParametersGiveUniform) {
  const auto t = eval_conditional(CrbmParams::zeros(2, 3, 4));
  EXPECT_LE(tv_row_distance(t, ConditionalTable::uniform(2, 3)), 1e-15);
}

TEST(EvalTest, MatchesHiddenEnumeration) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 30; ++trial) {
    const int k = static_cast<int>(rng() % 3);
    const int n = 1 + static_cast<int>(rng() % 3);
    const int m = static_cast<int>(rng() % 4);
    const auto p = CrbmParams::random(k, n, m, rng, 1.5);
    EXPECT_LE(tv_row_distance(eval_conditional(p), brute_force_conditional(p)), 1e-12);
  }
}

TEST(EvalTest, LargeWeightsStayFinite) {
  std::mt19937_64 rng(3);
  const auto p = CrbmParams::random(2, 2, 3, rng, 1000.0);
  for (const auto& row : eval_conditional(p).rows) {
    double s = 0.0;
    for (double v : row.probs) {
      EXPECT_TRUE(std::isfinite(v));
      s += v;
    }
    EXPECT_NEAR(s, 1.0, 1e-12);
  }
}

TEST(JointTest, Examples) {
  EXPECT_LE(l1_distance(eval_joint_rbm(CrbmParams::zeros(0, 3, 0)), Dist::uniform(3)), 1e-15);
  std::mt19937_64 rng(4);
  auto p = CrbmParams::random(0, 3, 1, rng);
  p.W.setZero();
  EXPECT_LE(l1_distance(eval_joint_rbm(p), softmax_bits(p.b)), 1e-14);
  const auto q = CrbmParams::random(0, 3, 2, rng);
  EXPECT_LE(l1_distance(eval_joint_rbm(q), brute_force_conditional(q).rows[0]), 1e-12);
  EXPECT_THROW(eval_joint_rbm(CrbmParams::zeros(1, 1, 0)), Error);
}

TEST(JointTest, BlockNormalizedJointEqualsConditional) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const int k = 1 + static_cast<int>(rng() % 2);
    const auto p = CrbmParams::random(k, 2, 2, rng);
    const auto joint = as_joint_rbm(p);
    EXPECT_EQ(joint.k, 0);
    EXPECT_EQ(joint.n, k + 2);
    EXPECT_LE(tv_row_distance(conditional_of_joint(eval_joint_rbm(joint), k), eval_conditional(p)), 1e-12);
    EXPECT_LE(tv_row_distance(eval_conditional(as_conditional(joint, k)), eval_conditional(p)), 1e-12);
  }
}

TEST(HiddenUnitTest, AppendZeroUnitAndRemove) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    const auto p = CrbmParams::random(2, 2, 1 + trial % 3, rng);
    const auto q = append_hidden_unit(p, Eigen::VectorXd::Zero(2), Eigen::VectorXd::Zero(2), 0.0);
    EXPECT_EQ(q.m, p.m + 1);
    EXPECT_LE(tv_row_distance(eval_conditional(q), eval_conditional(p)), 1e-12);
    const auto back = remove_last_hidden_unit(q);
    EXPECT_EQ(back.flatten(), p.flatten());
  }
  EXPECT_THROW(remove_last_hidden_unit(CrbmParams::zeros(1, 1, 0)), Error);
  EXPECT_THROW(append_hidden_unit(CrbmParams::zeros(1, 1, 0), Eigen::VectorXd::Zero(2), Eigen::VectorXd::Zero(1), 0.0),
               Error);
}

TEST(GaugeTest, BiasShiftsTiltEveryRowAlike) {
  std::mt19937_64 rng(7);
  auto p = CrbmParams::random(2, 2, 2, rng);
  auto q = p;
  q.c(0) += 0.0;
  const Eigen::VectorXd shift = Eigen::VectorXd::Random(2);
  q.b += shift;
  const auto tp = eval_conditional(p);
  const auto tq = eval_conditional(q);
  for (Index x = 0; x < 4; ++x) {
    for (Index y = 0; y < 4; ++y) {
      double tilt = 0.0;
      for (int i = 0; i < 2; ++i) tilt += bit(y, i) * shift(i);
      const double ratio = std::log(tq.at(x, y) / tp.at(x, y)) - tilt;
      const double ratio0 = std::log(tq.at(x, 0) / tp.at(x, 0));
      EXPECT_NEAR(ratio, ratio0, 1e-12);
    }
  }
  // A hidden unit with no visible weights only rescales: its bias is unobservable.
  auto r = append_hidden_unit(p, Eigen::VectorXd::Zero(2), Eigen::VectorXd::Zero(2), 3.7);
  EXPECT_LE(tv_row_distance(eval_conditional(r), tp), 1e-12);
}

TEST(ParamsTest, FlattenRoundTripAndValidation) {
  std::mt19937_64 rng(8);
  const auto p = CrbmParams::random(2, 3, 4, rng);
  EXPECT_EQ(p.num_params(), 3 * 4 + 2 * 4 + 3 + 4);
  const auto q = CrbmParams::unflatten(2, 3, 4, p.flatten());
  EXPECT_EQ(q.flatten(), p.flatten());
  auto bad = p;
  bad.b.resize(2);
  EXPECT_THROW(bad.validate(), Error);
  auto nan = p;
  nan.W(0, 0) = std::nan("");
  EXPECT_THROW(nan.validate(), Error);
}

TEST(InferenceTest, Examples) {
  const auto zero = inference_map(CrbmParams::zeros(1, 1, 2));
  for (std::size_t v = 0; v < zero.hidden.size(); ++v) {
    EXPECT_EQ(zero.hidden[v], 0U);
    EXPECT_TRUE(zero.tie[v]);
  }
  auto p = CrbmParams::zeros(1, 2, 1);
  p.c(0) = 5.0;
  const auto on = inference_map(p);
  for (std::size_t v = 0; v < on.hidden.size(); ++v) EXPECT_EQ(on.hidden[v], 1U);
  EXPECT_FALSE(on.any_tie());

  std::mt19937_64 rng(9);
  const auto g = CrbmParams::random(2, 2, 3, rng);
  const auto map = inference_map(g);
  EXPECT_FALSE(map.any_tie());
  // Oracle: argmax over z of the joint energy at each visible state.
  for (Index v = 0; v < 16; ++v) {
    const Index x = v & 3U;
    const Index y = v >> 2;
    double best = -1e300;
    Index arg = 0;
    for (Index z = 0; z < 8; ++z) {
      double e = 0.0;
      for (int j = 0; j < 3; ++j) {
        if (!bit(z, j)) continue;
        e += g.c(j);
        for (int i = 0; i < 2; ++i) e += bit(y, i) * g.W(j, i) + bit(x, i) * g.V(j, i);
      }
      if (e > best) {
        best = e;
        arg = z;
      }
    }
    EXPECT_EQ(map.hidden[v], arg);
  }
}

TEST(JacobianTest, RowsOfEachInputSumToZero) {
  std::mt19937_64 rng(10);
  const auto p = CrbmParams::random(2, 2, 2, rng);
  const Eigen::MatrixXd jac = conditional_jacobian(p);
  ASSERT_EQ(jac.rows(), 16);
  ASSERT_EQ(jac.cols(), p.num_params());
  for (Index x = 0; x < 4; ++x) {
    EXPECT_LE(jac.middleRows(4 * x, 4).colwise().sum().cwiseAbs().maxCoeff(), 1e-13);
  }
}

TEST(JacobianTest, BiasBlockIsSoftmaxCovariance) {
  std::mt19937_64 rng(11);
  const auto p = CrbmParams::random(1, 2, 0, rng);
  const Eigen::MatrixXd jac = conditional_jacobian(p);
  const Dist q = softmax_bits(p.b);
  double mean[2] = {0.0, 0.0};
  for (Index y = 0; y < 4; ++y) {
    for (int i = 0; i < 2; ++i) mean[i] += q[y] * bit(y, i);
  }
  for (Index x = 0; x < 2; ++x) {
    for (Index y = 0; y < 4; ++y) {
      for (int i = 0; i < 2; ++i) EXPECT_NEAR(jac(4 * x + y, i), q[y] * (bit(y, i) - mean[i]), 1e-14);
    }
  }
}

TEST(JacobianTest, MatchesFiniteDifferences) {
  std::mt19937_64 rng(12);
  const int shapes[][3] = {{1, 1, 1}, {1, 2, 2}, {2, 2, 1}};
  for (const auto& s : shapes) {
    for (int trial = 0; trial < 20; ++trial) {
      const auto p = CrbmParams::random(s[0], s[1], s[2], rng);
      const Eigen::MatrixXd jac = conditional_jacobian(p);
      const Eigen::VectorXd theta = p.flatten();
      const double h = 1e-5;
      for (Eigen::Index c = 0; c < theta.size(); ++c) {
        Eigen::VectorXd up = theta;
        Eigen::VectorXd down = theta;
        up(c) += h;
        down(c) -= h;
        const auto tu = eval_conditional(CrbmParams::unflatten(s[0], s[1], s[2], up));
        const auto td = eval_conditional(CrbmParams::unflatten(s[0], s[1], s[2], down));
        for (Index x = 0; x < space_size(s[0]); ++x) {
          for (Index y = 0; y < space_size(s[1]); ++y) {
            EXPECT_NEAR((tu.at(x, y) - td.at(x, y)) / (2 * h), jac(x * space_size(s[1]) + y, c), 1e-6);
          }
        }
      }
    }
  }
}

TEST(NumericsTest, SoftplusAndLogSumExp) {
  EXPECT_NEAR(softplus(0.0), std::log(2.0), 1e-15);
  EXPECT_NEAR(softplus(800.0), 800.0, 1e-12);
  EXPECT_NEAR(softplus(-800.0), 0.0, 1e-300);
  EXPECT_NEAR(sigmoid(0.0), 0.5, 1e-15);
  EXPECT_NEAR(log_sum_exp({1000.0, 1000.0}), 1000.0 + std::log(2.0), 1e-12);
}

}  // namespace
}  // namespace crbm
