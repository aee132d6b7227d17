// Copyright 2026 The crbmgeo Authors
// SPDX-License-Identifier: Apache-2.0

#include "crbm/sharing.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "crbm/error.hpp"

namespace crbm {
namespace {

// lambda p + (1 - lambda) (p * s) straight from the definition.
Dist mixture_oracle(const Dist& p, double lambda, const std::vector<double>& odds) {
  std::vector<double> s(p.size());
  for (Index v = 0; v < p.size(); ++v) {
    double w = 1.0;
    for (int i = 0; i < p.width; ++i) {
      const double one = 1.0 / (1.0 + std::exp(-odds[static_cast<std::size_t>(i)]));
      w *= bit(v, i) ? one : 1.0 - one;
    }
    s[v] = w;
  }
  double z = 0.0;
  for (Index v = 0; v < p.size(); ++v) z += p[v] * s[v];
  std::vector<double> out(p.size());
  for (Index v = 0; v < p.size(); ++v) out[v] = lambda * p[v] + (1.0 - lambda) * p[v] * s[v] / z;
  return Dist{p.width, out};
}

std::vector<double> random_odds(int width, std::mt19937_64& rng) {
  std::vector<double> odds;
  for (int i = 0; i < width; ++i) odds.push_back(standard_normal(rng));
  return odds;
}

LogJoint delta_zero_start(int k, int n, double tau) {
  CrbmParams p = CrbmParams::zeros(k, n, 0);
  p.b.setConstant(-tau);
  return LogJoint::from_params(p);
}

TEST(SharingStepTest, LambdaRepresentation) {
  const auto s = SharingStep::make(0.25, {0.0, 1.0});
  EXPECT_NEAR(s.lambda(), 0.25, 1e-15);
  EXPECT_NEAR(s.one_minus_lambda(), 0.75, 1e-15);
  EXPECT_NEAR(s.product()[3], 0.5 / (1.0 + std::exp(-1.0)), 1e-15);
  EXPECT_THROW(SharingStep::make(1.5, {0.0}), Error);
  const auto tiny = SharingStep::from_logit(-800.0, {0.0});
  EXPECT_GT(tiny.one_minus_lambda(), 0.0);
  EXPECT_EQ(tiny.one_minus_lambda(), 1.0);
}

TEST(ApplySharingTest, Examples) {
  std::mt19937_64 rng(1);
  const Dist p = random_dist(3, rng);
  EXPECT_LE(l1_distance(apply_sharing(p, SharingStep::make(1.0, random_odds(3, rng))), p), 1e-15);
  EXPECT_LE(l1_distance(apply_sharing(p, SharingStep::make(0.0, {0.0, 0.0, 0.0})), p), 1e-15);
  const std::vector<double> odds{std::log(3.0), std::log(3.0)};
  const Dist mixed = apply_sharing(Dist::uniform(2), SharingStep::make(0.5, odds));
  // s = (1/16, 3/16, 3/16, 9/16); uniform * s = s.
  const double s[4] = {1.0 / 16, 3.0 / 16, 3.0 / 16, 9.0 / 16};
  for (Index v = 0; v < 4; ++v) EXPECT_NEAR(mixed[v], 0.5 * 0.25 + 0.5 * s[v], 1e-15);
  EXPECT_LE(l1_distance(mixed, mixture_oracle(Dist::uniform(2), 0.5, odds)), 1e-15);
}

TEST(ApplySharingTest, PreservesPositivityAndNormalization) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    const int width = 1 + static_cast<int>(rng() % 6);
    const Dist p = random_dist(width, rng);
    const double lambda = uniform01(rng);
    const auto odds = random_odds(width, rng);
    const Dist q = apply_sharing(p, SharingStep::make(lambda, odds));
    double sum = 0.0;
    for (double v : q.probs) {
      EXPECT_GT(v, 0.0);
      sum += v;
    }
    EXPECT_NEAR(sum, 1.0, 1e-12);
    EXPECT_LE(l1_distance(q, mixture_oracle(p, lambda, odds)), 1e-12);
    // The log-domain path agrees with the linear one.
    auto lj = LogJoint::from_dist(p, 0);
    lj.apply(SharingStep::make(lambda, odds));
    EXPECT_LE(l1_distance(lj.to_dist(), q), 1e-12);
  }
}

TEST(StepToUnitTest, Examples) {
  std::mt19937_64 rng(3);
  const Dist p = random_dist(2, rng);
  const HiddenUnit u = step_to_hidden_unit(p, SharingStep::make(0.5, {0.0, 0.0}));
  EXPECT_NEAR(u.w.norm(), 0.0, 1e-15);
  EXPECT_NEAR(u.bias, 0.0, 1e-15);
  try {
    step_to_hidden_unit(p, SharingStep::make(1.0, {1.0, 1.0}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::BiasCapExceeded);
  }
  try {
    step_to_hidden_unit(p, SharingStep::make(0.0, {1.0, 1.0}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::LambdaZero);
  }
}

TEST(StepToUnitTest, AppendedUnitRealizesStep) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    const int width = 1 + static_cast<int>(rng() % 4);
    const auto rbm = CrbmParams::random(0, width, static_cast<int>(rng() % 3), rng);
    const Dist p = eval_joint_rbm(rbm);
    const auto step = SharingStep::make(0.05 + 0.95 * uniform01(rng) * (1.0 - 1e-9), random_odds(width, rng));
    const HiddenUnit u = step_to_hidden_unit(p, step);
    const auto grown = append_hidden_unit(rbm, u.w, Eigen::VectorXd(0), u.bias);
    EXPECT_LE(l1_distance(eval_joint_rbm(grown), apply_sharing(p, step)), 1e-10);
    const auto back = hidden_unit_to_step(LogJoint::from_params(rbm), u);
    EXPECT_NEAR(back.logit_lambda, step.logit_lambda, 1e-10);
    for (int i = 0; i < width; ++i) EXPECT_NEAR(back.log_odds[i], step.log_odds[i], 1e-10);
  }
}

TEST(AffineFitTest, InterpolatesStarAndPenalizesOutside) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const int width = 1 + static_cast<int>(rng() % 7);
    const Index center = static_cast<Index>(rng() % space_size(width));
    const Index mask = static_cast<Index>(rng() % space_size(width));
    const auto star = Star::make(State::make(center, width), CylinderSet::make(width, mask, center & mask));
    const auto members = star.members_in_star_order();
    std::vector<double> values;
    for (std::size_t i = 0; i < members.size(); ++i) values.push_back(3.0 * standard_normal(rng));
    const double penalty = 20.0;
    const AffineFit g = fit_star_affine(star, values, penalty);
    // exp(g) restricted to the star is proportional to exp(values).
    for (std::size_t i = 0; i < members.size(); ++i) EXPECT_NEAR(g(members[i]), values[i], 1e-9);
    const double top = cylinder_max(star, g);
    double brute_top = -1e300;
    for (const auto& s : cylinder_members(star.cylinder)) brute_top = std::max(brute_top, g(s.index));
    EXPECT_NEAR(top, brute_top, 1e-9);
    for (Index v = 0; v < space_size(width); ++v) {
      if (!star.cylinder.contains(v)) EXPECT_LE(g(v), top - penalty + 1e-9);
    }
  }
}

TEST(StarFillTest, DeltaZeroTargetsAreNoOps) {
  const int k = 2;
  const int n = 2;
  const auto star = Star::make(State::make(0, k), CylinderSet::full(k));
  std::map<Index, Dist> q;
  for (Index x : star.members_in_star_order()) q.emplace(x, Dist::point_mass(n, 0));
  const auto steps = make_star_fill_steps(delta_zero_start(k, n, 16.0), star, q, 16.0);
  ASSERT_EQ(steps.size(), space_size(n) - 1);
  for (const auto& s : steps) EXPECT_EQ(s.one_minus_lambda(), 0.0);
}

ConditionalTable fill_and_read(int k, int n, const Star& star, const std::map<Index, Dist>& q, double tau) {
  LogJoint joint = delta_zero_start(k, n, tau);
  for (const auto& s : make_star_fill_steps(joint, star, q, tau)) joint.apply(s);
  return joint.conditional();
}

TEST(StarFillTest, SingleInputStarReachesRow) {
  const auto star = Star::make(State::make(0, 1), CylinderSet::make(1, 1, 0));
  std::map<Index, Dist> q{{0, Dist::make(1, {0.3, 0.7})}};
  const auto steps = make_star_fill_steps(delta_zero_start(1, 1, 30.0), star, q, 30.0);
  ASSERT_EQ(steps.size(), 1U);
  // Joint starts near (1/2, 0, 1/2, 0); the step moves 1 - lambda onto (x=0, y=1).
  // Row 0 then reads (lambda/2, 1 - lambda), so 0.7 needs lambda = 0.3 / 0.65.
  EXPECT_NEAR(steps[0].lambda(), 0.3 / 0.65, 1e-6);
  const auto t = fill_and_read(1, 1, star, q, 30.0);
  EXPECT_NEAR(t.at(0, 1), 0.7, 1e-6);
}

TEST(StarFillTest, FullTwoDimStarHitsRandomTargets) {
  std::mt19937_64 rng(6);
  const auto star = Star::make(State::make(0, 2), CylinderSet::full(2));
  for (int trial = 0; trial < 20; ++trial) {
    std::map<Index, Dist> q;
    for (Index x : star.members_in_star_order()) q.emplace(x, random_dist(1, rng));
    const auto t = fill_and_read(2, 1, star, q, 30.0);
    for (const auto& [x, row] : q) EXPECT_LE(l1_distance(t.row(x), row), 1e-3);
  }
}

TEST(StarFillTest, ErrorShrinksWithSharpness) {
  std::mt19937_64 rng(7);
  const auto star = Star::make(State::make(1, 3), CylinderSet::make(3, 0b100, 0));
  for (int trial = 0; trial < 10; ++trial) {
    std::map<Index, Dist> q;
    for (Index x : star.members_in_star_order()) q.emplace(x, random_dist(2, rng));
    double prev = 1e300;
    for (double tau : {10.0, 20.0, 40.0, 80.0}) {
      const auto t = fill_and_read(3, 2, star, q, tau);
      double err = 0.0;
      for (const auto& [x, row] : q) err = std::max(err, l1_distance(t.row(x), row));
      EXPECT_LE(err, prev + 1e-12) << "tau " << tau;
      prev = err;
    }
    EXPECT_LE(prev, 1e-9);
  }
}

TEST(ResetTest, GlobalResetSendsRowsToTarget) {
  std::mt19937_64 rng(8);
  auto joint = LogJoint::from_dist(random_dist(3, rng), 2);
  joint.apply(make_reset_step(CylinderSet::full(2), State::make(1, 1), 30.0));
  for (const auto& row : joint.conditional().rows) EXPECT_NEAR(row[1], 1.0, 1e-3);
}

TEST(ResetTest, VanishingSharpnessIsIdentity) {
  std::mt19937_64 rng(9);
  const Dist p = random_dist(3, rng);
  const auto step = make_reset_step(CylinderSet::make(2, 1, 0), State::make(0, 1), 1e-9);
  EXPECT_LE(l1_distance(apply_sharing(p, step), p), 1e-8);
}

TEST(ResetTest, CylinderResetLeavesOtherRows) {
  std::mt19937_64 rng(10);
  const CylinderSet c = CylinderSet::make(2, 0b01, 0);  // unit 1 of x fixed to 0
  for (int trial = 0; trial < 20; ++trial) {
    const Dist p = random_dist(3, rng);
    const auto before = conditional_of_joint(p, 2);
    auto joint = LogJoint::from_dist(p, 2);
    joint.apply(make_reset_step(c, State::make(0, 1), 30.0));
    const auto after = joint.conditional();
    for (Index x = 0; x < 4; ++x) {
      if (c.contains(x)) EXPECT_LE(l1_distance(after.row(x), Dist::point_mass(1, 0)), 1e-3);
      else EXPECT_LE(l1_distance(after.row(x), before.row(x)), 1e-3);
    }
  }
}

TEST(ResetTest, AdaptiveUnitResetsCylinder) {
  std::mt19937_64 rng(11);
  const SharpStepSpec spec{CylinderSet::make(3, 0b010, 0b010), CylinderSet::make(2, 0b11, 0b10), 20.0};
  for (int trial = 0; trial < 20; ++trial) {
    auto joint = LogJoint::from_dist(random_dist(5, rng), 3);
    const auto before = joint.conditional();
    joint.apply(design_reset_unit(joint, spec));
    const auto after = joint.conditional();
    for (Index x = 0; x < 8; ++x) {
      if (spec.inputs.contains(x)) EXPECT_NEAR(after.at(x, 2), 1.0, 1e-6);
      else EXPECT_LE(l1_distance(after.row(x), before.row(x)), 1e-6);
    }
  }
}

}  // namespace
}  // namespace crbm
