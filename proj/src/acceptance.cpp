// Copyright 2026 The crbmgeo Authors
// SPDX-License-Identifier: Apache-2.0

#include "crbm/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <future>
#include <random>
#include <sstream>

#include "crbm/bitspace.hpp"
#include "crbm/bounds.hpp"
#include "crbm/compiler.hpp"
#include "crbm/dimension.hpp"
#include "crbm/distributions.hpp"
#include "crbm/error.hpp"
#include "crbm/ltn.hpp"
#include "crbm/machine.hpp"
#include "crbm/mrf.hpp"
#include "crbm/packing.hpp"
#include "crbm/sharing.hpp"

namespace crbm {
namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void check(bool cond, const std::string& what) {
    if (!cond) {
      if (pass) detail << "FAILED: ";
      else detail << "; ";
      detail << what;
      pass = false;
    }
  }
};

/// Runs fn(i) for i < count concurrently; results come back in index order.
template <class F>
auto fan_out(int count, F fn) {
  using R = decltype(fn(0));
  std::vector<std::future<R>> jobs;
  for (int i = 0; i < count; ++i) jobs.push_back(std::async(std::launch::async, fn, i));
  std::vector<R> out;
  for (auto& j : jobs) out.push_back(j.get());
  return out;
}

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(4);
  s << v;
  return s.str();
}

void table1(Outcome& o, std::uint64_t) {
  const int F[] = {1, 3, 20, 284, 8408};
  const int R[] = {1, 1, 4, 44, 1144};
  for (int r = 1; r <= 5; ++r) {
    const auto v = seq_values(r);
    o.check(v.F == F[r - 1], "F(" + std::to_string(r) + ") = " + v.F.str());
    if (r >= 2) o.check(v.R == R[r - 1], "R(" + std::to_string(r) + ") = " + v.R.str());
  }
  const double k = seq_K(100000);
  const double p = seq_P(50);
  o.check(std::abs(k - 0.2263) <= 5e-4, "K(1e5) = " + fmt(k));
  o.check(std::abs(p - 0.0269) <= 5e-4, "P(50) = " + fmt(p));
  o.detail << "F,R match r=1..5; K(1e5)=" << fmt(k) << " P(50)=" << fmt(p);
}

void packing(Outcome& o, std::uint64_t) {
  int sequences = 0;
  for (int k = 1; k <= 10; ++k) {
    for (int r : feasible_depths(k)) {
      const auto seq = build_packing(k, r);
      const auto rep = validate_packing(seq);
      o.check(rep.ok, "k=" + std::to_string(k) + " r=" + std::to_string(r) + ": " + rep.violation);
      const BigInt expected = (BigInt(1) << static_cast<unsigned>(k - seq_S(r))) * seq_values(r).F;
      o.check(BigInt(seq.stars.size()) == expected,
              "k=" + std::to_string(k) + " r=" + std::to_string(r) + " star count");
      ++sequences;
    }
  }
  o.detail << sequences << " sequences valid with exact star counts";
}

void universal(Outcome& o, std::uint64_t seed) {
  const std::pair<int, int> shapes[] = {{1, 1}, {2, 1}, {2, 2}, {3, 1}, {3, 2}};
  double worst = 0.0;
  for (const auto& [k, n] : shapes) {
    const int r = best_depth(k, n);
    const BigInt budget = universal_budget(k, n, r);
    const auto results = fan_out(20, [&, k = k, n = n](int i) {
      const auto target = random_conditional(k, n, seed + 1000 * k + 100 * n + i);
      const auto res = compile_universal(target, r);
      return std::pair{tv_row_distance(eval_conditional(res.params), target), res.params.m};
    });
    for (const auto& [tv, m] : results) {
      worst = std::max(worst, tv);
      o.check(tv <= 1e-2, "(k,n)=(" + std::to_string(k) + "," + std::to_string(n) + ") tv " + fmt(tv));
      o.check(BigInt(m) <= budget, "(k,n)=(" + std::to_string(k) + "," + std::to_string(n) + ") m over budget");
    }
  }
  o.detail << "100 targets, worst row TV " << fmt(worst);
}

void divergence(Outcome& o, std::uint64_t seed) {
  const std::tuple<int, int, long long> cases[] = {{1, 2, 1}, {2, 2, 2}};
  double worst_gap = -1e300;
  for (const auto& [k, n, m] : cases) {
    const auto bound = divergence_bound(k, n, m);
    const auto ds = fan_out(20, [&, k = k, n = n, m = m](int i) {
      return divergence_witness(random_conditional(k, n, seed + 7000 + 100 * k + i), m).divergence;
    });
    for (double d : ds) {
      o.check(d <= (n - 1) + 0.05, "D=" + fmt(d) + " above n-1+0.05");
      if (bound.prop_applies) o.check(d <= bound.prop_term, "D=" + fmt(d) + " above " + fmt(bound.prop_term));
      worst_gap = std::max(worst_gap, d - (n - 1));
    }
  }
  o.detail << "40 witnesses, max D-(n-1) " << fmt(worst_gap);
}

void dimension(Outcome& o, std::uint64_t seed) {
  const std::tuple<int, int, int, int> cases[] = {{1, 3, 1, 8}, {2, 2, 1, 7}, {1, 2, 2, 6}, {1, 1, 1, 2}};
  for (const auto& [k, n, m, want] : cases) {
    const std::string tag = "(" + std::to_string(k) + "," + std::to_string(n) + "," + std::to_string(m) + ")";
    for (int s = 0; s < 5; ++s) {
      const auto rep = certify_dimension(k, n, m, 8, seed + s);
      o.check(rep.numeric == want, tag + " numeric " + std::to_string(rep.numeric));
      o.check(rep.expected.value == want, tag + " expected " + std::to_string(rep.expected.value));
      o.check(rep.tropical <= rep.numeric, tag + " tropical above numeric");
    }
    o.detail << tag << "=" << want << " ";
  }
  o.detail << "stable over 5 seeds";
}

double random_theta(std::mt19937_64& rng) { return standard_normal(rng); }

void mrf(Outcome& o, std::uint64_t seed) {
  const auto full = SimplicialComplex::full(3);
  const auto keep = SimplicialComplex::closure(3, {});
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    std::mt19937_64 rng(seed + 500 + i);
    std::vector<double> theta;
    for (std::size_t f = 0; f < full.faces.size(); ++f) theta.push_back(random_theta(rng));
    const auto model = MrfModel::make(full, theta);
    const auto res = compile_mrf_to_rbm(model, keep, 4);
    o.check(res.rbm.m == 4, "full complex used " + std::to_string(res.rbm.m) + " units");
    const double tv = l1_distance(eval_joint_rbm(res.rbm), mrf_distribution(model));
    o.check(tv <= 1e-6, "joint tv " + fmt(tv));
    const auto cond = compile_conditional_mrf(model, 1);
    const double ctv = tv_row_distance(eval_conditional(cond), conditional_of_joint(mrf_distribution(model), 1));
    o.check(ctv <= 1e-6, "conditional tv " + fmt(ctv));
    worst = std::max({worst, tv, ctv});
  }
  o.detail << "20 draws, worst TV " << fmt(worst);
}

void ltn(Outcome& o, std::uint64_t) {
  for (int k = 2; k <= 4; ++k) {
    const auto net = parity_net(k);
    const auto res = embed_ltn_in_crbm(net, 1e-3);
    const double tv = tv_row_distance(eval_conditional(res.params), deterministic_table(k, 1, ltn_table(net)));
    o.check(res.params.m == k, "parity k=" + std::to_string(k) + " uses m != k");
    o.check(tv <= 1e-3, "parity k=" + std::to_string(k) + " tv " + fmt(tv));
    o.check(check_deter_fixed_point(res.params, ltn_table(net)), "fixed point fails at k=" + std::to_string(k));
    o.detail << "k=" << k << " t=" << res.t << " tv=" << fmt(tv) << " ";
  }
}

void bounds(Outcome& o, std::uint64_t seed) {
  for (int k = 1; k <= 6; ++k) {
    for (int n = 1; n <= 6; ++n) {
      const auto t = universal_m_table(k, n);
      if (t.minimum) o.check(*t.minimum <= t.rbm_route, "universal minimum above RBM route");
    }
  }
  for (int k = 0; k <= 4; ++k) {
    for (int n = 1; n <= 4; ++n) {
      for (long long m = 1; m <= 64; ++m) {
        o.check(divergence_upper(k, n, m) <= divergence_upper(k, n, m - 1) + 1e-12,
                "divergence_upper increases at m=" + std::to_string(m));
      }
    }
  }
  std::mt19937_64 rng(seed);
  for (int i = 0; i < 5; ++i) {
    const int k = 1 + static_cast<int>(rng() % 24);
    const int n = 1 + static_cast<int>(rng() % 8);
    const auto d = deterministic_m_bounds(k, n);
    o.check(d.counting_exact >= d.necessary, "counting bound below necessary");
    o.check(BigInt(d.necessary) <= d.sufficient, "necessary above sufficient");
    // counting_exact is the least m with m (n+k)^2 + n m^2 >= n 2^k.
    const BigInt need = BigInt(n) << static_cast<unsigned>(k);
    const auto lhs = [&](const BigInt& m) { return m * (n + k) * (n + k) + n * m * m; };
    o.check(lhs(d.counting_exact) >= need, "counting bound not sufficient");
    o.check(d.counting_exact == 0 || lhs(d.counting_exact - 1) < need, "counting bound not least");
    o.detail << "(" << k << "," << n << ") ";
  }
  o.detail << "checked";
}

void oracles(Outcome& o, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const int width = 1 + static_cast<int>(rng() % 10);
    const Dist p = random_dist(width, rng);
    const Dist q = random_dist(width, rng);
    const Dist s = random_dist(width, rng);
    worst = std::max(worst, l1_distance(hadamard(Dist::uniform(width), q), q));
    worst = std::max(worst, l1_distance(hadamard(hadamard(p, q), s), hadamard(p, hadamard(q, s))));
  }
  o.check(worst <= 1e-12, "hadamard error " + fmt(worst));
  o.detail << "hadamard " << fmt(worst);

  worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const int k = static_cast<int>(rng() % 3);
    const int n = 1 + static_cast<int>(rng() % 3);
    const auto p = LogJoint::from_dist(random_dist(k + n, rng), k);
    std::vector<double> odds;
    for (int j = 0; j < k + n; ++j) odds.push_back(standard_normal(rng));
    const auto step = SharingStep::make(0.05 + 0.9 * uniform01(rng), odds);
    const auto back = hidden_unit_to_step(p, step_to_hidden_unit(p, step));
    worst = std::max(worst, std::abs(back.logit_lambda - step.logit_lambda));
    for (int j = 0; j < k + n; ++j) worst = std::max(worst, std::abs(back.log_odds[j] - odds[j]));
  }
  o.check(worst <= 1e-10, "sharing round trip " + fmt(worst));
  o.detail << ", sharing " << fmt(worst);

  worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const int k = static_cast<int>(rng() % 3);
    const int n = 1 + static_cast<int>(rng() % 2);
    const int m = 1 + static_cast<int>(rng() % 3);
    const auto p = CrbmParams::random(k, n, m, rng);
    const Eigen::MatrixXd jac = conditional_jacobian(p);
    const Eigen::VectorXd theta = p.flatten();
    const double h = 1e-5;
    for (Eigen::Index c = 0; c < theta.size(); ++c) {
      Eigen::VectorXd up = theta;
      Eigen::VectorXd down = theta;
      up(c) += h;
      down(c) -= h;
      const auto tu = eval_conditional(CrbmParams::unflatten(k, n, m, up));
      const auto td = eval_conditional(CrbmParams::unflatten(k, n, m, down));
      for (Index x = 0; x < space_size(k); ++x) {
        for (Index y = 0; y < space_size(n); ++y) {
          const double fd = (tu.at(x, y) - td.at(x, y)) / (2 * h);
          worst = std::max(worst, std::abs(fd - jac(x * space_size(n) + y, c)));
        }
      }
    }
  }
  o.check(worst <= 1e-6, "jacobian vs finite differences " + fmt(worst));
  o.detail << ", jacobian " << fmt(worst);

  worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const int N = 1 + static_cast<int>(rng() % 8);
    std::vector<double> v(space_size(N));
    for (double& e : v) e = standard_normal(rng);
    const auto back = mobius_evaluate(mobius_coefficients(v));
    for (std::size_t j = 0; j < v.size(); ++j) worst = std::max(worst, std::abs(back[j] - v[j]));
  }
  o.check(worst <= 1e-12, "mobius round trip " + fmt(worst));
  o.detail << ", mobius " << fmt(worst);

  int independent = 0;
  for (int i = 0; i < 100; ++i) {
    const int width = 1 + static_cast<int>(rng() % 10);
    const Index center = static_cast<Index>(rng() % space_size(width));
    const Index mask = static_cast<Index>(rng() % space_size(width));
    const auto star = Star::make(State::make(center, width), CylinderSet::make(width, mask, center & mask));
    const auto pts = star_indices(star);
    if (affinely_independent(pts, width)) ++independent;
  }
  o.check(independent == 100, "dependent stars: " + std::to_string(100 - independent));
  o.detail << ", stars " << independent << "/100 independent";
}

struct Spec {
  const char* name;
  double limit;
  void (*fn)(Outcome&, std::uint64_t);
};

const Spec kSpecs[kNumCriteria] = {
    {"table1-sequences", 10.0, table1},
    {"packing-validity", 30.0, packing},
    {"universal-compilation", 300.0, universal},
    {"divergence-witness", 120.0, divergence},
    {"dimension-certificate", 60.0, dimension},
    {"mrf-compilation", 60.0, mrf},
    {"ltn-embedding", 60.0, ltn},
    {"bound-consistency", 10.0, bounds},
    {"oracle-invariants", 120.0, oracles},
};

}  // namespace

CriterionResult run_criterion(int id, std::uint64_t seed) {
  require(id >= 1 && id <= kNumCriteria, ErrorCode::InvalidArgument, "criterion id out of range");
  const Spec& spec = kSpecs[id - 1];
  CriterionResult res;
  res.id = id;
  res.name = spec.name;
  res.limit_seconds = spec.limit;
  Outcome o;
  const auto start = std::chrono::steady_clock::now();
  try {
    spec.fn(o, seed);
  } catch (const std::exception& e) {
    o.check(false, std::string("exception: ") + e.what());
  }
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (res.seconds > spec.limit) o.check(false, "runtime " + fmt(res.seconds) + " s over limit");
  res.pass = o.pass;
  res.detail = o.detail.str();
  return res;
}

std::vector<CriterionResult> run_acceptance(std::uint64_t seed) {
  std::vector<CriterionResult> out;
  for (int id = 1; id <= kNumCriteria; ++id) out.push_back(run_criterion(id, seed));
  return out;
}

}  // namespace crbm
