// Copyright 2026 The crbmgeo Authors
// SPDX-License-Identifier: Apache-2.0

#include "crbm/compiler.hpp"

#include <gtest/gtest.h>

#include <random>

#include "crbm/bounds.hpp"
#include "crbm/error.hpp"

namespace crbm {
namespace {

double model_tv(const CompileResult& res, const ConditionalTable& target) {
  return tv_row_distance(eval_conditional(res.params), target);
}

void expect_sound(const CompileResult& res, const ConditionalTable& target, double eps) {
  EXPECT_LE(res.report.achieved_tv, eps);
  EXPECT_NEAR(res.report.achieved_tv, model_tv(res, target), 1e-9);
  EXPECT_EQ(res.report.hidden_units_used, res.params.m);
  EXPECT_TRUE(res.report.within_budget);
  EXPECT_LE(BigInt(res.params.m), res.report.budget_bound);
}

ConditionalTable block_constant(int k, int n, int l, std::mt19937_64& rng) {
  std::vector<Dist> rows;
  for (Index x = 0; x < space_size(k); ++x) {
    const Dist blocks = random_dist(l, rng);
    std::vector<double> w(space_size(n));
    for (Index y = 0; y < w.size(); ++y) w[y] = blocks[y & (space_size(l) - 1U)];
    rows.push_back(Dist::normalized(n, w));
  }
  return ConditionalTable::make(k, n, std::move(rows));
}

TEST(ClampTest, FloorsAndRenormalizes) {
  const auto t = ConditionalTable::make(0, 1, {Dist::point_mass(1, 0)});
  const auto c = clamp_target(t, 0.08);
  EXPECT_TRUE(c.strictly_positive());
  EXPECT_NEAR(c.at(0, 1), 0.01 / 1.01, 1e-15);
}

TEST(UniversalTest, UniformTarget) {
  for (int k = 1; k <= 3; ++k) {
    const auto t = ConditionalTable::uniform(k, 2);
    const auto res = compile_universal(t, 1);
    expect_sound(res, t, 1e-2);
    EXPECT_LE(model_tv(res, t), 1e-2);
  }
}

TEST(UniversalTest, SmallestCase) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto t = random_conditional(1, 1, seed);
    const auto res = compile_universal(t, 1);
    expect_sound(res, clamp_target(t, 1e-2), 1e-2);
    EXPECT_LE(res.params.m, 1);
    EXPECT_LE(model_tv(res, t), 1e-2);
  }
}

TEST(UniversalTest, DepthTwoOnThreeInputs) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto t = random_conditional(3, 1, 100 + seed);
    const auto res = compile_universal(t, 2);
    EXPECT_LE(res.params.m, 4);
    EXPECT_EQ(res.report.budget_bound, 4);
    EXPECT_LE(res.report.resets_used, 1);
    expect_sound(res, clamp_target(t, 1e-2), 1e-2);
  }
}

TEST(UniversalTest, BudgetAndSoundnessOverShapes) {
  for (int k = 1; k <= 4; ++k) {
    for (int n = 1; n <= 2; ++n) {
      for (int r : feasible_depths(k)) {
        const auto t = random_conditional(k, n, 1000 + 10 * k + n);
        const auto res = compile_universal(t, r);
        EXPECT_EQ(res.report.budget_bound, universal_budget(k, n, r));
        expect_sound(res, clamp_target(t, 1e-2), 1e-2);
        EXPECT_LE(model_tv(res, t), 1e-2 + res.report.clamp_error);
      }
    }
  }
}

TEST(UniversalTest, LooserToleranceNeverUsesMoreUnits) {
  const auto t = random_conditional(3, 2, 9);
  int prev = 1 << 30;
  for (double eps : {1e-4, 1e-3, 1e-2, 1e-1}) {
    const auto res = compile_universal(t, 2, CompileOptions{eps});
    EXPECT_LE(res.params.m, prev);
    prev = res.params.m;
  }
}

TEST(UniversalTest, Errors) {
  const auto t = random_conditional(2, 1, 1);
  try {
    compile_universal(t, 2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InfeasibleDepth);
  }
  CompileOptions opts;
  opts.eps = 1e-12;
  opts.tau_max = 16.0;
  try {
    compile_universal(t, 1, opts);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::BudgetExceeded);
  }
}

TEST(SupportPointsTest, DeterministicTarget) {
  const auto t = ConditionalTable::make(1, 1, {Dist::point_mass(1, 1), Dist::point_mass(1, 0)});
  const auto res = compile_support_points(t, 0);
  EXPECT_LE(res.params.m, 1);
  EXPECT_LE(model_tv(res, t), 1e-2);
}

TEST(SupportPointsTest, OneExtraPoint) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 10; ++trial) {
    const double a = 0.1 + 0.8 * uniform01(rng);
    const auto t = ConditionalTable::make(1, 2, {Dist::make(2, {a, 0.0, 0.0, 1.0 - a}), Dist::point_mass(2, 2)});
    const auto res = compile_support_points(t, 1);
    EXPECT_LE(res.params.m, 2);
    expect_sound(res, t, 1e-2);
  }
  try {
    compile_support_points(random_conditional(1, 2, 3), 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SupportTooLarge);
  }
  const auto full = compile_support_points(random_conditional(1, 2, 3), 6);
  EXPECT_LE(model_tv(full, random_conditional(1, 2, 3)), 1e-2);
}

TEST(CommonSupportTest, Examples) {
  const auto start = ConditionalTable::make(2, 2, std::vector<Dist>(4, Dist::point_mass(2, 0)));
  const auto r0 = compile_common_support(start, 1);
  EXPECT_EQ(r0.report.star_steps_used, 0);
  EXPECT_LE(model_tv(r0, start), 1e-2);

  std::mt19937_64 rng(4);
  std::vector<Dist> rows;
  for (int x = 0; x < 4; ++x) {
    const double a = 0.1 + 0.8 * uniform01(rng);
    rows.push_back(Dist::make(2, {0.0, a, 0.0, 1.0 - a}));
  }
  const auto two = ConditionalTable::make(2, 2, rows);
  const auto r2 = compile_common_support(two, 1);
  EXPECT_EQ(r2.report.budget_bound, 2);
  expect_sound(r2, two, 1e-2);

  std::vector<Dist> rows3;
  for (int x = 0; x < 2; ++x) {
    const Dist d = random_dist(2, rng);
    rows3.push_back(Dist::make(3, {d[0], 0.0, d[1], 0.0, 0.0, d[2] + d[3], 0.0, 0.0}));
  }
  const auto three = ConditionalTable::make(1, 3, rows3);
  const auto r3 = compile_common_support(three, 1);
  EXPECT_EQ(r3.report.budget_bound, 2);
  expect_sound(r3, three, 1e-2);

  const auto differ = ConditionalTable::make(1, 1, {Dist::point_mass(1, 0), Dist::uniform(1)});
  try {
    compile_common_support(differ, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SupportsDiffer);
  }
}

TEST(PartitionTest, Examples) {
  std::mt19937_64 rng(5);
  const auto t = random_conditional(2, 2, 6);
  const auto full = compile_partition(t, 2, 1);
  const auto uni = compile_universal(t, 1);
  EXPECT_EQ(full.params.m, uni.params.m);
  EXPECT_LE(model_tv(full, t), 1e-2);

  const auto flat = compile_partition(ConditionalTable::uniform(2, 2), 0, 1);
  EXPECT_EQ(flat.params.m, 0);
  EXPECT_LE(model_tv(flat, ConditionalTable::uniform(2, 2)), 1e-12);

  for (int trial = 0; trial < 10; ++trial) {
    const auto b = block_constant(1, 2, 1, rng);
    const auto res = compile_partition(b, 1, 1);
    EXPECT_LE(res.params.m, 1);
    EXPECT_EQ(res.report.budget_bound, 1);
    EXPECT_LE(model_tv(res, b), 1e-2);
  }
  try {
    compile_partition(t, 1, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotBlockConstant);
  }
}

TEST(WitnessTest, UniversalRegime) {
  const auto t = random_conditional(1, 2, 7);
  const auto w = divergence_witness(t, 3);
  EXPECT_EQ(w.l, 2);
  EXPECT_LE(w.divergence, 1e-3);
}

TEST(WitnessTest, OneUnitOnTwoOutputs) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto w = divergence_witness(random_conditional(1, 2, 200 + seed), 1);
    EXPECT_EQ(w.l, 1);
    EXPECT_LE(w.hidden_units_used, 1);
    EXPECT_LE(w.divergence, 1.0 + 1e-3);
  }
}

TEST(WitnessTest, BlockConstantTarget) {
  std::mt19937_64 rng(8);
  const auto b = block_constant(2, 2, 1, rng);
  EXPECT_LE(divergence_witness(b, 2).divergence, 1e-3);
  EXPECT_LE(divergence_witness(b, 6).divergence, 1e-3);
}

TEST(WitnessTest, NoBudgetGivesUniformModel) {
  const auto t = random_conditional(2, 2, 9);
  const auto w = divergence_witness(t, 0);
  EXPECT_EQ(w.l, 0);
  EXPECT_EQ(w.hidden_units_used, 0);
  EXPECT_NEAR(w.divergence, kl_conditional(t, ConditionalTable::uniform(2, 2)), 1e-12);
  EXPECT_LE(w.divergence, 2.0);
}

}  // namespace
}  // namespace crbm
