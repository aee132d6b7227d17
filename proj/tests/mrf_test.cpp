// Copyright 2026 The crbmgeo Authors
// SPDX-License-Identifier: Apache-2.0

#include "crbm/mrf.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "crbm/error.hpp"

namespace crbm {
namespace {

// Direct evaluation of sum_A theta_A prod_{i in A} x_i.
std::vector<double> brute_energy(const MrfModel& model) {
  const int N = model.complex.N;
  std::vector<double> e(space_size(N), 0.0);
  for (Index x = 0; x < e.size(); ++x) {
    for (std::size_t i = 0; i < model.complex.faces.size(); ++i) {
      if ((model.complex.faces[i] & x) == model.complex.faces[i]) e[x] += model.theta[i];
    }
  }
  return e;
}

Dist softmax(const std::vector<double>& e) {
  std::vector<double> w(e.size());
  for (std::size_t i = 0; i < e.size(); ++i) w[i] = std::exp(e[i]);
  return Dist::normalized(static_cast<int>(std::bit_width(e.size()) - 1), w);
}

MrfModel random_model(const SimplicialComplex& c, std::mt19937_64& rng, double scale) {
  std::vector<double> theta;
  for (std::size_t i = 0; i < c.faces.size(); ++i) theta.push_back(scale * (2.0 * uniform01(rng) - 1.0));
  return MrfModel::make(c, theta);
}

TEST(ComplexTest, ClosureAndValidation) {
  const auto c = SimplicialComplex::closure(3, {0b011, 0b100});
  EXPECT_EQ(c.faces, (std::vector<FaceMask>{0, 1, 2, 3, 4}));
  EXPECT_THROW(SimplicialComplex::make(3, {0, 3}), Error);
  EXPECT_THROW(SimplicialComplex::make(3, {1}), Error);
  EXPECT_EQ(SimplicialComplex::full(3).faces.size(), 8U);
}

TEST(MrfDistributionTest, Examples) {
  const auto uniform = mrf_distribution(MrfModel::make(SimplicialComplex::closure(2, {}), {0.0}));
  for (double p : uniform.probs) EXPECT_NEAR(p, 0.25, 1e-15);

  const auto prod = mrf_distribution(MrfModel::make(SimplicialComplex::closure(2, {1, 2}), {0.0, 1.0, -2.0}));
  const double p1 = 1.0 / (1.0 + std::exp(-1.0));
  const double p2 = 1.0 / (1.0 + std::exp(2.0));
  EXPECT_NEAR(prod.probs[3], p1 * p2, 1e-15);
  EXPECT_NEAR(prod.probs[0], (1 - p1) * (1 - p2), 1e-15);

  const auto full = SimplicialComplex::full(3);
  std::vector<double> theta(8, 0.0);
  theta[7] = 2.0;
  const auto p = mrf_distribution(MrfModel::make(full, theta));
  const double z = 7.0 + std::exp(2.0);
  EXPECT_NEAR(p.probs[7], std::exp(2.0) / z, 1e-15);
  EXPECT_NEAR(p.probs[3], 1.0 / z, 1e-15);
}

TEST(MrfDistributionTest, MatchesBruteForce) {
  std::mt19937_64 rng(3);
  for (int N = 1; N <= 5; ++N) {
    const auto model = random_model(SimplicialComplex::full(N), rng, 1.5);
    EXPECT_LE(l1_distance(mrf_distribution(model), softmax(brute_energy(model))), 1e-13);
  }
}

TEST(MobiusTest, RoundTripAndMonomials) {
  std::mt19937_64 rng(4);
  for (int N = 0; N <= 6; ++N) {
    std::vector<double> f(space_size(N));
    for (double& v : f) v = standard_normal(rng);
    const auto back = mobius_evaluate(mobius_coefficients(f));
    for (std::size_t i = 0; i < f.size(); ++i) EXPECT_NEAR(back[i], f[i], 1e-12);
  }
  // x1*x3 on {0,1}^3 has a single coefficient at face {1,3}.
  std::vector<double> mono(8, 0.0);
  for (Index x = 0; x < 8; ++x) mono[x] = (bit(x, 0) && bit(x, 2)) ? 1.0 : 0.0;
  const auto c = mobius_coefficients(mono);
  for (Index a = 0; a < 8; ++a) EXPECT_NEAR(c[a], a == 0b101 ? 1.0 : 0.0, 1e-15);
  EXPECT_THROW(mobius_coefficients({1.0, 2.0, 3.0}), Error);
}

TEST(YounesTest, ZeroTarget) {
  const auto s = younes_solve(0.0, 3);
  EXPECT_EQ(s.w, 0.0);
  EXPECT_NEAR(s.coefficients[7], 0.0, 1e-15);
}

TEST(YounesTest, SingleVariable) {
  // log(1 + e^{w x + b}) has top coefficient softplus(w + b) - softplus(b).
  for (double rho : {-3.0, -0.5, 0.7, 4.0}) {
    const auto s = younes_solve(rho, 1);
    const auto v = younes_values(s, 1);
    EXPECT_NEAR(v[1] - v[0], rho, 1e-10);
  }
}

TEST(YounesTest, HitsTopCoefficient) {
  for (int N = 2; N <= 5; ++N) {
    for (double rho : {2.0, -2.0, 0.3, -7.5}) {
      const auto s = younes_solve(rho, N);
      const auto direct = mobius_coefficients(younes_values(s, N));
      EXPECT_NEAR(direct[space_size(N) - 1], rho, 1e-10 * std::max(1.0, std::abs(rho))) << N << " " << rho;
    }
  }
  EXPECT_THROW(younes_solve(1e9, 3), Error);
}

double compiled_gap(const MrfModel& model, const MrfCompileResult& res) {
  const Dist lhs = hadamard(mrf_distribution(model), mrf_distribution(res.correction));
  return l1_distance(lhs, eval_joint_rbm(res.rbm));
}

TEST(CompileMrfTest, Examples) {
  const auto singles = MrfModel::make(SimplicialComplex::closure(3, {1, 2, 4}), {0.0, 0.5, -1.0, 2.0});
  const auto r0 = compile_mrf_to_rbm(singles, SimplicialComplex::closure(3, {}));
  EXPECT_EQ(r0.rbm.m, 0);
  EXPECT_LE(l1_distance(mrf_distribution(singles), eval_joint_rbm(r0.rbm)), 1e-14);

  const auto pair = MrfModel::make(SimplicialComplex::closure(2, {3}), {0.0, 0.0, 0.0, 1.5});
  const auto r1 = compile_mrf_to_rbm(pair, SimplicialComplex::closure(2, {}));
  EXPECT_EQ(r1.rbm.m, 1);
  EXPECT_LE(l1_distance(mrf_distribution(pair), eval_joint_rbm(r1.rbm)), 1e-9);

  std::mt19937_64 rng(5);
  const auto full = random_model(SimplicialComplex::full(3), rng, 1.0);
  const auto r2 = compile_mrf_to_rbm(full, SimplicialComplex::closure(3, {}));
  EXPECT_EQ(r2.rbm.m, 4);
  EXPECT_EQ(r2.unit_faces, (std::vector<FaceMask>{7, 3, 5, 6}));
  EXPECT_LE(l1_distance(mrf_distribution(full), eval_joint_rbm(r2.rbm)), 1e-6);
}

TEST(CompileMrfTest, CorrectionIdentityOnRandomComplexes) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    const int N = 2 + static_cast<int>(rng() % 3);
    std::vector<FaceMask> gens;
    for (int g = 0; g < 3; ++g) gens.push_back(static_cast<FaceMask>(rng() % space_size(N)));
    const auto complex = SimplicialComplex::closure(N, gens);
    const auto model = random_model(complex, rng, 1.0);
    std::vector<FaceMask> keep;
    for (FaceMask a : complex.faces) {
      if (std::popcount(a) == 2 && rng() % 2 == 0) keep.push_back(a);
    }
    const auto res = compile_mrf_to_rbm(model, SimplicialComplex::closure(N, keep));
    EXPECT_LE(compiled_gap(model, res), 1e-8) << trial;
    for (FaceMask a : res.unit_faces) EXPECT_GT(std::popcount(a), 1);
  }
}

TEST(CompileMrfTest, BudgetHandling) {
  const auto pair = MrfModel::make(SimplicialComplex::closure(2, {3}), {0.0, 0.0, 0.0, 1.5});
  const auto empty = SimplicialComplex::closure(2, {});
  EXPECT_THROW(compile_mrf_to_rbm(pair, empty, 0), Error);
  const auto padded = compile_mrf_to_rbm(pair, empty, 3);
  EXPECT_EQ(padded.rbm.m, 3);
  EXPECT_LE(l1_distance(mrf_distribution(pair), eval_joint_rbm(padded.rbm)), 1e-9);
  EXPECT_THROW(compile_mrf_to_rbm(pair, SimplicialComplex::full(3)), Error);
}

TEST(ConditionalMrfTest, MatchesConditionalOfJoint) {
  std::mt19937_64 rng(7);
  for (int N = 2; N <= 4; ++N) {
    for (int k = 0; k < N; ++k) {
      const auto model = random_model(SimplicialComplex::full(N), rng, 1.0);
      const auto crbm = compile_conditional_mrf(model, k);
      EXPECT_EQ(crbm.m, conditional_mrf_units(model.complex, k));
      const auto want = conditional_of_joint(mrf_distribution(model), k);
      EXPECT_LE(tv_row_distance(eval_conditional(crbm), want), 1e-8) << N << " " << k;
    }
  }
}

TEST(ConditionalMrfTest, ProductComplex) {
  // k = 1, J = {{}, {1}, {2}, {1,2}} on two outputs: four units suffice.
  const auto j = SimplicialComplex::full(2);
  const std::vector<std::vector<double>> theta{{0.0, 0.4, -0.3, 1.2}, {0.0, -1.0, 0.8, -0.6}};
  const auto model = product_complex_model(1, j, theta);
  EXPECT_EQ(model.complex.N, 3);
  EXPECT_EQ(conditional_mrf_units(model.complex, 1), 4);
  const auto crbm = compile_conditional_mrf(model, 1);
  EXPECT_EQ(crbm.m, 4);
  const auto table = eval_conditional(crbm);
  for (Index x = 0; x < 2; ++x) {
    const auto want = mrf_distribution(MrfModel::make(j, theta[x]));
    EXPECT_LE(l1_distance(table.rows[x], want), 1e-8);
  }
}

TEST(ConditionalMrfTest, InputFaces) {
  const auto c = SimplicialComplex::full(3);
  EXPECT_EQ(input_faces(c, 2).faces, (std::vector<FaceMask>{0, 1, 2, 3}));
  EXPECT_EQ(conditional_mrf_units(c, 2), 3);
  EXPECT_EQ(conditional_mrf_units(c, 0), 4);
}

}  // namespace
}  // namespace crbm
