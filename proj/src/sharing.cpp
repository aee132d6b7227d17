// Copyright 2026 The crbmgeo Authors
// SPDX-License-Identifier: Apache-2.0

#include "crbm/sharing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "crbm/error.hpp"

namespace crbm {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double log_add_exp(double a, double b) {
  if (a == -kInf) return b;
  if (b == -kInf) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(-std::abs(a - b)));
}

double dot_bits(std::span<const double> w, Index v) {
  double s = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (bit(v, static_cast<int>(i))) s += w[i];
  }
  return s;
}

double dot_bits(const Eigen::VectorXd& w, Index v) {
  return dot_bits(std::span<const double>(w.data(), static_cast<std::size_t>(w.size())), v);
}

/// log sum_u p(u) exp(theta.u) with p normalized.
double log_tilt(const LogJoint& p, std::span<const double> theta) {
  std::vector<double> tilted(p.logp.size());
  for (Index v = 0; v < tilted.size(); ++v) tilted[v] = p.logp[v] + dot_bits(theta, v);
  return log_sum_exp(tilted) - log_sum_exp(p.logp);
}

/// g(y) = -pen * (mismatches of y against the atom's fixed bits).
AffineFit atom_penalty(const CylinderSet& atom, double pen) {
  AffineFit h{std::vector<double>(static_cast<std::size_t>(atom.width), 0.0), 0.0};
  for (int i = 0; i < atom.width; ++i) {
    if (!bit(atom.fixed_mask, i)) continue;
    if (bit(atom.fixed_values, i)) {
      h.weights[static_cast<std::size_t>(i)] = pen;
      h.offset -= pen;
    } else {
      h.weights[static_cast<std::size_t>(i)] = -pen;
    }
  }
  return h;
}

HiddenUnit join(const AffineFit& g, const AffineFit& h) {
  HiddenUnit u{Eigen::VectorXd(static_cast<Eigen::Index>(g.weights.size() + h.weights.size())),
               g.offset + h.offset};
  Eigen::Index t = 0;
  for (double w : g.weights) u.w(t++) = w;
  for (double w : h.weights) u.w(t++) = w;
  return u;
}

}  // namespace

SharingStep SharingStep::make(double lambda, std::vector<double> log_odds) {
  require(lambda >= 0.0 && lambda <= 1.0, ErrorCode::InvalidArgument, "lambda must lie in [0,1]");
  const double logit = lambda == 0.0   ? -kInf
                       : lambda == 1.0 ? kInf
                                       : std::log(lambda) - std::log1p(-lambda);
  return from_logit(logit, std::move(log_odds));
}

SharingStep SharingStep::from_logit(double logit_lambda, std::vector<double> log_odds) {
  require(!std::isnan(logit_lambda), ErrorCode::InvalidArgument, "logit(lambda) is NaN");
  require(!log_odds.empty(), ErrorCode::InvalidArgument, "sharing step needs width >= 1");
  for (double t : log_odds) {
    require(std::isfinite(t), ErrorCode::InvalidArgument, "product factors must be positive");
  }
  const int width = static_cast<int>(log_odds.size());
  check_width(width);
  return SharingStep{width, logit_lambda, std::move(log_odds)};
}

double SharingStep::lambda() const noexcept { return sigmoid(logit_lambda); }

double SharingStep::one_minus_lambda() const noexcept { return sigmoid(-logit_lambda); }

Dist SharingStep::product() const {
  std::vector<double> logs(space_size(width));
  for (Index v = 0; v < logs.size(); ++v) logs[v] = dot_bits(log_odds, v);
  const double z = log_sum_exp(logs);
  for (double& l : logs) l = std::exp(l - z);
  return Dist{width, std::move(logs)};
}

LogJoint LogJoint::from_dist(const Dist& p, int k) {
  require(k >= 0 && k <= p.width, ErrorCode::InvalidArgument, "need 0 <= k <= width");
  LogJoint out{k, p.width - k, std::vector<double>(p.size())};
  for (std::size_t i = 0; i < p.size(); ++i) out.logp[i] = p.probs[i] > 0.0 ? std::log(p.probs[i]) : -kInf;
  return out;
}

LogJoint LogJoint::from_params(const CrbmParams& p) {
  return LogJoint{p.k, p.n, log_unnormalized(p)};
}

Dist LogJoint::to_dist() const {
  const double z = log_sum_exp(logp);
  std::vector<double> probs(logp.size());
  for (std::size_t i = 0; i < probs.size(); ++i) probs[i] = std::exp(logp[i] - z);
  return Dist{width(), std::move(probs)};
}

ConditionalTable LogJoint::conditional() const {
  const Index ny = space_size(n);
  std::vector<Dist> rows;
  std::vector<double> row(ny);
  for (Index x = 0; x < space_size(k); ++x) {
    for (Index y = 0; y < ny; ++y) row[y] = logp[x | (y << k)];
    const double z = log_sum_exp(row);
    require(std::isfinite(z), ErrorCode::ZeroInputMass, "input row without mass");
    std::vector<double> probs(ny);
    for (Index y = 0; y < ny; ++y) probs[y] = std::exp(row[y] - z);
    rows.push_back(Dist{n, std::move(probs)});
  }
  return ConditionalTable{k, n, std::move(rows)};
}

double LogJoint::log_row_mass(Index x, const CylinderSet& atom) const {
  std::vector<double> all;
  std::vector<double> in;
  for (Index y = 0; y < space_size(n); ++y) {
    const double l = logp[x | (y << k)];
    all.push_back(l);
    if (atom.contains(y)) in.push_back(l);
  }
  return log_sum_exp(in) - log_sum_exp(all);
}

void LogJoint::apply(const HiddenUnit& unit) {
  require(unit.w.size() == width(), ErrorCode::ShapeMismatch, "unit width");
  for (Index v = 0; v < logp.size(); ++v) logp[v] += softplus(dot_bits(unit.w, v) + unit.bias);
}

void LogJoint::apply(const SharingStep& step) {
  require(step.width == width(), ErrorCode::WidthMismatch, "step width");
  const double log_m = log_tilt(*this, step.log_odds);
  require(std::isfinite(log_m), ErrorCode::DegenerateStep, "sharing normalizer degenerate");
  const double log_lam = -softplus(-step.logit_lambda);
  const double log_rest = -softplus(step.logit_lambda);
  for (Index v = 0; v < logp.size(); ++v) {
    logp[v] += log_add_exp(log_lam, log_rest + dot_bits(step.log_odds, v) - log_m);
  }
}

Dist apply_sharing(const Dist& p, const SharingStep& step) {
  require(p.width == step.width, ErrorCode::WidthMismatch, "step width");
  double shift = -kInf;
  for (Index v = 0; v < p.size(); ++v) {
    if (p.probs[v] > 0.0) shift = std::max(shift, dot_bits(step.log_odds, v));
  }
  require(std::isfinite(shift), ErrorCode::DegenerateStep, "empty support");
  std::vector<double> tilt(p.size());
  double m = 0.0;
  for (Index v = 0; v < p.size(); ++v) {
    tilt[v] = p.probs[v] * std::exp(dot_bits(step.log_odds, v) - shift);
    m += tilt[v];
  }
  require(m > 0.0 && std::isfinite(m), ErrorCode::DegenerateStep, "sharing normalizer degenerate");
  const double lam = step.lambda();
  const double rest = step.one_minus_lambda();
  std::vector<double> out(p.size());
  for (Index v = 0; v < p.size(); ++v) out[v] = lam * p.probs[v] + rest * tilt[v] / m;
  return Dist{p.width, std::move(out)};
}

HiddenUnit step_to_hidden_unit(const LogJoint& p_current, const SharingStep& step) {
  require(step.width == p_current.width(), ErrorCode::WidthMismatch, "step width");
  require(step.logit_lambda > -kInf, ErrorCode::LambdaZero,
          "lambda = 0 is not reachable by a finite hidden unit");
  const double log_m = log_tilt(p_current, step.log_odds);
  require(std::isfinite(log_m), ErrorCode::DegenerateStep, "sharing normalizer degenerate");
  const double bias = -step.logit_lambda - log_m;
  require(std::isfinite(bias) && std::abs(bias) <= kBiasCap, ErrorCode::BiasCapExceeded,
          "hidden bias magnitude exceeds cap");
  HiddenUnit u{Eigen::VectorXd(step.width), bias};
  for (int i = 0; i < step.width; ++i) u.w(i) = step.log_odds[static_cast<std::size_t>(i)];
  return u;
}

HiddenUnit step_to_hidden_unit(const Dist& p_current, const SharingStep& step) {
  return step_to_hidden_unit(LogJoint::from_dist(p_current, 0), step);
}

SharingStep hidden_unit_to_step(const LogJoint& p_current, const HiddenUnit& unit) {
  require(unit.w.size() == p_current.width(), ErrorCode::ShapeMismatch, "unit width");
  std::vector<double> theta(unit.w.data(), unit.w.data() + unit.w.size());
  const double log_m = log_tilt(p_current, theta);
  return SharingStep::from_logit(-unit.bias - log_m, std::move(theta));
}

double AffineFit::operator()(Index x) const { return offset + dot_bits(weights, x); }

AffineFit fit_star_affine(const Star& star, std::span<const double> values, double penalty) {
  const auto members = star.members_in_star_order();
  require(values.size() == members.size(), ErrorCode::ShapeMismatch,
          "one value per star member expected");
  const CylinderSet& c = star.cylinder;
  const Index x0 = star.center();
  AffineFit g{std::vector<double>(static_cast<std::size_t>(c.width), 0.0), values[0]};
  std::size_t next = 1;
  for (int i = 0; i < c.width; ++i) {
    auto& w = g.weights[static_cast<std::size_t>(i)];
    if (bit(c.fixed_mask, i)) {
      if (bit(c.fixed_values, i)) {
        w = penalty;
        g.offset -= penalty;
      } else {
        w = -penalty;
      }
      continue;
    }
    // Free coordinate: moving off the center along i changes g by delta.
    const double delta = values[next++] - values[0];
    if (bit(x0, i)) {
      w = -delta;
      g.offset += delta;
    } else {
      w = delta;
    }
  }
  return g;
}

double cylinder_max(const Star& star, const AffineFit& g) {
  double best = g(star.cylinder.fixed_values);
  const Index free = star.cylinder.free_mask();
  for (int i = 0; i < star.cylinder.width; ++i) {
    if (bit(free, i)) best += std::max(g.weights[static_cast<std::size_t>(i)], 0.0);
  }
  return best;
}

std::vector<std::optional<HiddenUnit>> design_fill_units(
    const LogJoint& current, const Star& star, const std::map<Index, std::vector<double>>& masses,
    const std::vector<CylinderSet>& atoms, double tau) {
  require(star.cylinder.width == current.k, ErrorCode::WidthMismatch, "star width must equal k");
  require(!atoms.empty(), ErrorCode::InvalidArgument, "need a start atom");
  require(tau > 0.0, ErrorCode::InvalidArgument, "sharpness must be positive");
  for (const auto& a : atoms) {
    require(a.width == current.n, ErrorCode::WidthMismatch, "atom width must equal n");
  }
  const auto members = star.members_in_star_order();
  for (Index x : members) {
    const auto it = masses.find(x);
    require(it != masses.end(), ErrorCode::InvalidArgument, "missing target for star member");
    require(it->second.size() == atoms.size(), ErrorCode::ShapeMismatch, "one mass per atom");
  }

  LogJoint joint = current;
  std::vector<std::optional<HiddenUnit>> units;
  for (std::size_t j = 1; j < atoms.size(); ++j) {
    std::vector<double> a_vals;
    std::size_t zero = 0;
    for (Index x : members) {
      const auto& q = masses.at(x);
      double before = 0.0;
      for (std::size_t t = 0; t < j; ++t) before += q[t];
      if (q[j] == 0.0) {
        ++zero;
        a_vals.push_back(0.0);
        continue;
      }
      require(before > 0.0, ErrorCode::InfeasibleProfile, "atom mass without earlier mass");
      // Want p(atom_j | x) (1 + e^A) = rho * (mass of earlier atoms).
      std::vector<double> log_earlier;
      for (std::size_t t = 0; t < j; ++t) log_earlier.push_back(joint.log_row_mass(x, atoms[t]));
      const double l = std::log(q[j] / before) + log_sum_exp(log_earlier) -
                       joint.log_row_mass(x, atoms[j]);
      constexpr double kLogFloor = -27.6;  // log 1e-12
      a_vals.push_back(l > 0.0 ? l + std::max(std::log(-std::expm1(-l)), kLogFloor) : l + kLogFloor);
    }
    if (zero == members.size()) {
      units.emplace_back(std::nullopt);
      continue;
    }
    require(zero == 0, ErrorCode::InfeasibleProfile, "mixing weight 1 on part of a star only");

    const double max_a = *std::max_element(a_vals.begin(), a_vals.end());
    const AffineFit flat = fit_star_affine(star, a_vals, 0.0);
    const double tau_x = std::max(tau, tau + cylinder_max(star, flat));
    const double tau_y = std::max(tau, tau + max_a);
    HiddenUnit u = join(fit_star_affine(star, a_vals, tau_x), atom_penalty(atoms[j], tau_y));
    joint.apply(u);
    units.emplace_back(std::move(u));
  }
  return units;
}

std::vector<SharingStep> make_star_fill_steps(const LogJoint& current, const Star& star,
                                              const std::map<Index, Dist>& q_rows, double tau) {
  const int n = current.n;
  std::vector<CylinderSet> atoms;
  for (Index y = 0; y < space_size(n); ++y) {
    atoms.push_back(CylinderSet::make(n, space_size(n) - 1U, y));
  }
  std::map<Index, std::vector<double>> masses;
  for (const auto& [x, row] : q_rows) {
    require(row.width == n, ErrorCode::WidthMismatch, "target row width");
    masses[x] = row.probs;
  }
  const auto units = design_fill_units(current, star, masses, atoms, tau);
  LogJoint joint = current;
  std::vector<SharingStep> steps;
  for (const auto& u : units) {
    if (!u) {
      steps.push_back(SharingStep::from_logit(kInf, std::vector<double>(static_cast<std::size_t>(joint.width()), 0.0)));
      continue;
    }
    steps.push_back(hidden_unit_to_step(joint, *u));
    joint.apply(*u);
  }
  return steps;
}

SharingStep make_reset_step(const CylinderSet& c, const State& y_target, double tau) {
  require(tau >= 0.0, ErrorCode::InvalidArgument, "sharpness must be non-negative");
  std::vector<double> theta;
  for (int i = 0; i < c.width; ++i) {
    theta.push_back(!bit(c.fixed_mask, i) ? 0.0 : (bit(c.fixed_values, i) ? tau : -tau));
  }
  for (int i = 0; i < y_target.width; ++i) theta.push_back(bit(y_target.index, i) ? tau : -tau);
  const double logit = tau == 0.0 ? kInf : -0.5 * tau - std::log(-std::expm1(-0.5 * tau));
  return SharingStep::from_logit(logit, std::move(theta));
}

HiddenUnit design_reset_unit(const LogJoint& current, const SharpStepSpec& spec) {
  require(spec.inputs.width == current.k && spec.atom.width == current.n, ErrorCode::WidthMismatch,
          "reset widths");
  require(spec.tau > 0.0, ErrorCode::InvalidArgument, "sharpness must be positive");
  double worst = 0.0;
  for (const auto& x : cylinder_members(spec.inputs)) {
    worst = std::min(worst, current.log_row_mass(x.index, spec.atom));
  }
  const double gain = spec.tau - worst;
  const double pen = gain + spec.tau;
  Star star{HammingBall{State{spec.inputs.smallest(), spec.inputs.width}}, spec.inputs};
  // Constant gain over the cylinder: fit through equal values on the star.
  std::vector<double> vals(star.members_in_star_order().size(), gain);
  return join(fit_star_affine(star, vals, pen), atom_penalty(spec.atom, pen));
}

}  // namespace crbm
