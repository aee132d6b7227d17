// Copyright 2026 The crbmgeo Authors
// SPDX-License-Identifier: Apache-2.0

#include "crbm/compiler.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <optional>

#include "crbm/error.hpp"
#include "crbm/packing.hpp"
#include "crbm/sharing.hpp"

namespace crbm {
namespace {

/// What Algorithm 1 needs to know about a target, in atom form.
struct AtomTarget {
  std::string mode;
  std::vector<CylinderSet> atoms;             ///< atoms[0] is the start atom
  std::vector<std::vector<double>> masses;    ///< per input, mass of each atom
  ConditionalTable table;                      ///< what achieved_tv is measured against
  std::function<Eigen::VectorXd(double)> start_bias;
};

struct Attempt {
  CrbmParams params;
  int star_units = 0;
  int resets = 0;
  double tau_used = 0.0;
};

std::vector<double> row_probs(const LogJoint& joint, Index x) {
  const Index ny = space_size(joint.n);
  std::vector<double> row(ny);
  for (Index y = 0; y < ny; ++y) row[y] = joint.logp[x | (y << joint.k)];
  const double z = log_sum_exp(row);
  for (double& v : row) v = std::exp(v - z);
  return row;
}

double l1(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return s;
}

CrbmParams append(const CrbmParams& p, const HiddenUnit& u) {
  return append_hidden_unit(p, u.w.tail(p.n), u.w.head(p.k), u.bias);
}

/// Largest L1 change of any processed row between two joints.
double drift(const LogJoint& before, const LogJoint& after, const std::vector<bool>& processed) {
  double worst = 0.0;
  for (Index x = 0; x < processed.size(); ++x) {
    if (processed[x]) worst = std::max(worst, l1(row_probs(before, x), row_probs(after, x)));
  }
  return worst;
}

double start_deviation(const LogJoint& joint, Index x, const CylinderSet& atom) {
  return 2.0 * -std::expm1(joint.log_row_mass(x, atom));
}

std::optional<Attempt> run_once(const AtomTarget& t, const PackingSequence& seq, double tau_base,
                                const CompileOptions& opts, double tol) {
  const int k = seq.k;
  const int n = t.table.n;
  Attempt a{CrbmParams::zeros(k, n, 0), 0, 0, tau_base};
  a.params.b = t.start_bias(tau_base);
  LogJoint joint = LogJoint::from_params(a.params);
  std::vector<bool> processed(space_size(k), false);

  std::size_t next_reset = 0;
  for (std::size_t s = 0; s < seq.stars.size(); ++s) {
    for (; next_reset < seq.resets.size() && seq.resets[next_reset].position == s; ++next_reset) {
      const CylinderSet& cyl = seq.resets[next_reset].cylinder;
      const auto rows = cylinder_members(cyl);
      const auto needed = [&](const LogJoint& j) {
        return std::any_of(rows.begin(), rows.end(), [&](const State& x) {
          return start_deviation(j, x.index, t.atoms[0]) > tol;
        });
      };
      if (!needed(joint)) continue;
      bool done = false;
      for (double tau = tau_base; tau <= opts.tau_max && !done; tau *= 2.0) {
        const HiddenUnit u = design_reset_unit(joint, SharpStepSpec{cyl, t.atoms[0], tau});
        LogJoint trial = joint;
        trial.apply(u);
        if (needed(trial) || drift(joint, trial, processed) > tol) continue;
        a.params = append(a.params, u);
        joint = std::move(trial);
        ++a.resets;
        a.tau_used = std::max(a.tau_used, tau);
        done = true;
      }
      if (!done) return std::nullopt;
    }

    const Star& star = seq.stars[s];
    const auto members = star.members_in_star_order();
    std::map<Index, std::vector<double>> masses;
    for (Index x : members) masses[x] = t.masses[x];
    bool done = false;
    for (double tau = tau_base; tau <= opts.tau_max && !done; tau *= 2.0) {
      const auto units = design_fill_units(joint, star, masses, t.atoms, tau);
      LogJoint trial = joint;
      for (const auto& u : units) {
        if (u) trial.apply(*u);
      }
      bool ok = drift(joint, trial, processed) <= tol;
      for (Index x : members) ok = ok && l1(row_probs(trial, x), t.table.rows[x].probs) <= tol;
      if (!ok) continue;
      for (const auto& u : units) {
        if (!u) continue;
        a.params = append(a.params, *u);
        ++a.star_units;
      }
      joint = std::move(trial);
      for (Index x : members) processed[x] = true;
      a.tau_used = std::max(a.tau_used, tau);
      done = true;
    }
    if (!done) return std::nullopt;
  }
  return a;
}

CompileResult run_compile(const AtomTarget& t, int k, int r, const BigInt& bound,
                          const CompileOptions& opts, double clamp_error) {
  require(opts.eps > 0.0, ErrorCode::InvalidArgument, "eps must be positive");
  const PackingSequence seq = build_packing(k, r);
  const auto phases = seq.stars.size() + seq.resets.size();
  const double tol = opts.eps / (2.0 * static_cast<double>(phases));
  for (double tau = opts.tau0; tau <= opts.tau_max; tau *= 2.0) {
    auto attempt = run_once(t, seq, tau, opts, tol);
    if (!attempt) continue;
    const double tv = tv_row_distance(eval_conditional(attempt->params), t.table);
    if (tv > opts.eps) continue;
    CompileReport rep;
    rep.mode = t.mode;
    rep.r = r;
    rep.star_steps_used = attempt->star_units;
    rep.resets_used = attempt->resets;
    rep.hidden_units_used = attempt->params.m;
    rep.stars = static_cast<int>(seq.stars.size());
    rep.resets_scheduled = static_cast<int>(seq.resets.size());
    rep.achieved_tv = tv;
    rep.clamp_error = clamp_error;
    rep.tau_final = attempt->tau_used;
    rep.budget_bound = bound;
    rep.within_budget = BigInt(rep.hidden_units_used) <= bound;
    return CompileResult{std::move(attempt->params), std::move(rep)};
  }
  fail(ErrorCode::BudgetExceeded, "sharpness schedule exhausted before reaching tolerance");
}

Eigen::VectorXd biases_toward(int n, Index y, Index mask, double tau) {
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < n; ++i) {
    if (bit(mask, i)) b(i) = bit(y, i) ? tau : -tau;
  }
  return b;
}

CylinderSet point_atom(int n, Index y) { return CylinderSet::make(n, space_size(n) - 1U, y); }

}  // namespace

ConditionalTable clamp_target(const ConditionalTable& target, double eps) {
  require(eps > 0.0, ErrorCode::InvalidArgument, "eps must be positive");
  const double floor = eps / std::ldexp(1.0, target.n + 2);
  std::vector<Dist> rows;
  for (const auto& row : target.rows) {
    std::vector<double> w = row.probs;
    for (double& v : w) v = std::max(v, floor);
    rows.push_back(Dist::normalized(target.n, std::move(w)));
  }
  return ConditionalTable{target.k, target.n, std::move(rows)};
}

CompileResult compile_universal(const ConditionalTable& target, int r, const CompileOptions& opts) {
  const int k = target.k;
  const int n = target.n;
  require(r >= 1 && k >= seq_S(r), ErrorCode::InfeasibleDepth, "k < S(r)");
  const ConditionalTable clamped = clamp_target(target, opts.eps);
  AtomTarget t;
  t.mode = "universal";
  for (Index y = 0; y < space_size(n); ++y) t.atoms.push_back(point_atom(n, y));
  for (const auto& row : clamped.rows) t.masses.push_back(row.probs);
  t.table = clamped;
  t.start_bias = [n](double tau) { return Eigen::VectorXd::Constant(n, -tau).eval(); };
  return run_compile(t, k, r, universal_budget(k, n, r), opts, tv_row_distance(clamped, target));
}

CompileResult compile_common_support(const ConditionalTable& target, int r, const CompileOptions& opts) {
  const int k = target.k;
  const int n = target.n;
  require(r >= 1 && k >= seq_S(r), ErrorCode::InfeasibleDepth, "k < S(r)");
  std::vector<Index> support;
  for (Index y = 0; y < space_size(n); ++y) {
    if (target.at(0, y) > 0.0) support.push_back(y);
  }
  for (Index x = 0; x < space_size(k); ++x) {
    for (Index y = 0; y < space_size(n); ++y) {
      require((target.at(x, y) > 0.0) == (target.at(0, y) > 0.0), ErrorCode::SupportsDiffer,
              "rows do not share one support");
    }
  }
  AtomTarget t;
  t.mode = "common";
  for (Index y : support) t.atoms.push_back(point_atom(n, y));
  for (const auto& row : target.rows) {
    std::vector<double> m;
    for (Index y : support) m.push_back(row.probs[y]);
    t.masses.push_back(std::move(m));
  }
  t.table = target;
  const Index start = support.front();
  t.start_bias = [n, start](double tau) { return biases_toward(n, start, space_size(n) - 1U, tau); };
  const BigInt bound = star_budget(k, r, BigInt(support.size() - 1));
  return run_compile(t, k, r, bound, opts, 0.0);
}

CompileResult compile_partition(const ConditionalTable& target, int l, int r, const CompileOptions& opts) {
  const int k = target.k;
  const int n = target.n;
  require(l >= 0 && l <= n, ErrorCode::InvalidArgument, "need 0 <= l <= n");
  require(r >= 1 && k >= seq_S(r), ErrorCode::InfeasibleDepth, "k < S(r)");
  const auto model = PartitionModel::cylinder(n, l);
  for (const auto& row : target.rows) {
    require(is_block_constant(row, model, 1e-9), ErrorCode::NotBlockConstant,
            "target row is not constant on the partition blocks");
  }
  const ConditionalTable clamped = clamp_target(target, opts.eps);
  const Index mask = space_size(l) - 1U;
  AtomTarget t;
  t.mode = "partition";
  for (Index z = 0; z < space_size(l); ++z) t.atoms.push_back(CylinderSet::make(n, mask, z));
  for (const auto& row : clamped.rows) {
    std::vector<double> m(space_size(l), 0.0);
    for (Index y = 0; y < space_size(n); ++y) m[y & mask] += row.probs[y];
    t.masses.push_back(std::move(m));
  }
  t.table = clamped;
  t.start_bias = [n, mask](double tau) { return biases_toward(n, 0, mask, tau); };
  const BigInt bound = star_budget(k, r, BigInt(space_size(l) - 1U));
  return run_compile(t, k, r, bound, opts, tv_row_distance(clamped, target));
}

CompileResult compile_support_points(const ConditionalTable& target, std::uint64_t d,
                                     const CompileOptions& opts) {
  const int k = target.k;
  const int n = target.n;
  require(in_support_class(target, SupportClass::make(k, n, d)), ErrorCode::SupportTooLarge,
          "target has more than 2^k + d non-zero entries");
  require(opts.eps > 0.0, ErrorCode::InvalidArgument, "eps must be positive");
  const int width = k + n;
  check_width(width);
  // Joint with uniform inputs; its support points in ascending joint index.
  std::vector<Index> points;
  std::vector<double> masses;
  for (Index v = 0; v < space_size(width); ++v) {
    const double p = target.at(v & (space_size(k) - 1U), v >> k);
    if (p > 0.0) {
      points.push_back(v);
      masses.push_back(p / static_cast<double>(space_size(k)));
    }
  }
  std::vector<CylinderSet> atoms;
  for (Index v : points) atoms.push_back(point_atom(width, v));
  const Star single{HammingBall{State{0, 0}}, CylinderSet{0, 0, 0}};
  const std::map<Index, std::vector<double>> mass_map{{0, masses}};
  const BigInt bound = BigInt((std::uint64_t{1} << k) + d) - 1;

  for (double tau = opts.tau0; tau <= opts.tau_max; tau *= 2.0) {
    CrbmParams rbm = CrbmParams::zeros(0, width, 0);
    rbm.b = biases_toward(width, points.front(), space_size(width) - 1U, tau);
    const auto units = design_fill_units(LogJoint::from_params(rbm), single, mass_map, atoms, tau);
    for (const auto& u : units) {
      if (u) rbm = append_hidden_unit(rbm, u->w, Eigen::VectorXd(0), u->bias);
    }
    CrbmParams params = as_conditional(rbm, k);
    const double tv = tv_row_distance(eval_conditional(params), target);
    if (tv > opts.eps) continue;
    CompileReport rep;
    rep.mode = "support";
    rep.star_steps_used = params.m;
    rep.hidden_units_used = params.m;
    rep.stars = 1;
    rep.achieved_tv = tv;
    rep.tau_final = tau;
    rep.budget_bound = bound;
    rep.within_budget = BigInt(params.m) <= bound;
    return CompileResult{std::move(params), std::move(rep)};
  }
  fail(ErrorCode::BudgetExceeded, "sharpness schedule exhausted before reaching tolerance");
}

WitnessResult divergence_witness(const ConditionalTable& target, long long m_budget, double eps_div) {
  require(m_budget >= 0, ErrorCode::InvalidArgument, "budget must be >= 0");
  const int k = target.k;
  const int n = target.n;
  const auto [l, r] = largest_feasible_l(k, n, m_budget);
  WitnessResult w;
  w.l = l;
  w.r = r;
  if (l == 0) {
    w.params = CrbmParams::zeros(k, n, 0);
  } else {
    const auto model = PartitionModel::cylinder(n, l);
    std::vector<Dist> rows;
    for (const auto& row : target.rows) rows.push_back(partition_project(row, model).first);
    const ConditionalTable proj{k, n, std::move(rows)};
    CompileOptions opts;
    opts.eps = eps_div;
    w.params = compile_partition(proj, l, r, opts).params;
  }
  w.hidden_units_used = w.params.m;
  w.divergence = kl_conditional(target, eval_conditional(w.params));
  return w;
}

}  // namespace crbm
