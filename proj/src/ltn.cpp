// Copyright 2026 The crbmgeo Authors
// SPDX-License-Identifier: Apache-2.0

#include "crbm/ltn.hpp"

#include <cmath>
#include <limits>
#include <optional>

#include "crbm/error.hpp"

namespace crbm {
namespace {

constexpr double kScaleCap = 1048576.0;  // 2^20

Eigen::VectorXd bits_of(Index v, int width) {
  Eigen::VectorXd out(width);
  for (int i = 0; i < width; ++i) out(i) = bit(v, i) ? 1.0 : 0.0;
  return out;
}

/// hs with ties reported as nullopt.
std::optional<Index> heaviside(const Eigen::VectorXd& pre) {
  Index out = 0;
  for (Eigen::Index i = 0; i < pre.size(); ++i) {
    if (std::abs(pre(i)) < kTieTolerance) return std::nullopt;
    if (pre(i) > 0.0) out |= Index{1} << i;
  }
  return out;
}

double first_layer_gap(const ThresholdNet& net) {
  double gap = std::numeric_limits<double>::infinity();
  for (Index x = 0; x < space_size(net.k); ++x) {
    const Eigen::VectorXd pre = net.V * bits_of(x, net.k) + net.c;
    for (Eigen::Index j = 0; j < pre.size(); ++j) gap = std::min(gap, std::abs(pre(j)));
  }
  return gap;
}

double alpha_for(const ThresholdNet& net) {
  if (net.m == 0) return 1.0;
  const double gap = first_layer_gap(net);
  require(gap >= kTieTolerance, ErrorCode::NotGeneric, "first layer has a tied pre-activation");
  const double wmax = net.W.rowwise().lpNorm<1>().maxCoeff();
  return (1.0 + 2.0 * wmax) / gap;
}

EmbedResult scale_until(const ThresholdNet& net, const ConditionalTable& target, double eps,
                        double alpha, bool scale_output) {
  require(eps > 0.0, ErrorCode::InvalidArgument, "eps must be positive");
  EmbedResult res;
  res.alpha = alpha;
  for (double t = 1.0; t <= kScaleCap; t *= 2.0) {
    CrbmParams p = CrbmParams::zeros(net.k, net.n, net.m);
    p.V = t * alpha * net.V;
    p.c = t * alpha * net.c;
    p.W = scale_output ? (t * net.W).eval() : net.W;
    p.b = scale_output ? (t * net.b).eval() : net.b;
    const double tv = tv_row_distance(eval_conditional(p), target);
    res.tv_trace.push_back(tv);
    if (tv <= eps) {
      res.params = std::move(p);
      res.t = t;
      return res;
    }
  }
  fail(ErrorCode::ScaleCapExceeded, "scale cap reached before tolerance");
}

}  // namespace

ThresholdNet ThresholdNet::zeros(int k, int m, int n) {
  require(k >= 0 && m >= 0 && n >= 1, ErrorCode::InvalidArgument, "need k, m >= 0 and n >= 1");
  return ThresholdNet{k,
                      m,
                      n,
                      Eigen::MatrixXd::Zero(m, k),
                      Eigen::VectorXd::Zero(m),
                      Eigen::MatrixXd::Zero(m, n),
                      Eigen::VectorXd::Zero(n)};
}

void ThresholdNet::validate() const {
  require(V.rows() == m && V.cols() == k && c.size() == m && W.rows() == m && W.cols() == n &&
              b.size() == n,
          ErrorCode::ShapeMismatch, "threshold net shapes");
  require(V.allFinite() && c.allFinite() && W.allFinite() && b.allFinite(), ErrorCode::InvalidArgument,
          "threshold net weights must be finite");
  check_width(k);
  check_width(n);
}

Index ltn_eval(const ThresholdNet& net, Index x) {
  net.validate();
  require(x < space_size(net.k), ErrorCode::InvalidArgument, "input outside {0,1}^k");
  const auto z = heaviside(net.V * bits_of(x, net.k) + net.c);
  require(z.has_value(), ErrorCode::TieEncountered, "hidden layer tie at input " + std::to_string(x));
  const auto y = heaviside(net.W.transpose() * bits_of(*z, net.m) + net.b);
  require(y.has_value(), ErrorCode::TieEncountered, "output layer tie at input " + std::to_string(x));
  return *y;
}

std::vector<Index> ltn_table(const ThresholdNet& net) {
  std::vector<Index> f;
  for (Index x = 0; x < space_size(net.k); ++x) f.push_back(ltn_eval(net, x));
  return f;
}

bool is_generic(const ThresholdNet& net) {
  try {
    ltn_table(net);
    return true;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::TieEncountered) return false;
    throw;
  }
}

ThresholdNet perturb_to_generic(const ThresholdNet& net, double delta) {
  net.validate();
  require(std::abs(delta) >= 2 * kTieTolerance, ErrorCode::InvalidArgument, "perturbation below tie tolerance");
  ThresholdNet out = net;
  std::vector<Index> hidden;
  for (Index x = 0; x < space_size(net.k); ++x) {
    const Eigen::VectorXd pre = net.V * bits_of(x, net.k) + net.c;
    for (int j = 0; j < net.m; ++j) {
      if (std::abs(pre(j)) < kTieTolerance) out.c(j) = net.c(j) + delta;
    }
  }
  for (Index x = 0; x < space_size(net.k); ++x) {
    const auto z = heaviside(out.V * bits_of(x, net.k) + out.c);
    require(z.has_value(), ErrorCode::NotGeneric, "perturbation did not resolve a hidden tie");
    const Eigen::VectorXd pre = out.W.transpose() * bits_of(*z, net.m) + net.b;
    for (int i = 0; i < net.n; ++i) {
      if (std::abs(pre(i)) < kTieTolerance) out.b(i) = net.b(i) + delta;
    }
  }
  require(is_generic(out), ErrorCode::NotGeneric, "perturbation did not resolve all ties");
  return out;
}

ThresholdNet parity_net(int k) {
  require(k >= 1, ErrorCode::InvalidArgument, "k must be >= 1");
  check_width(k);
  ThresholdNet net = ThresholdNet::zeros(k, k, 1);
  net.V.setConstant(2.0);
  for (int i = 0; i < k; ++i) {
    net.c(i) = -(2.0 * (i + 1) - 1.0);
    net.W(i, 0) = (i % 2 == 0) ? 2.0 : -2.0;
  }
  net.b(0) = -1.0;
  return net;
}

ConditionalTable deterministic_table(int k, int n, const std::vector<Index>& f) {
  check_width(k);
  require(f.size() == space_size(k), ErrorCode::ShapeMismatch, "one output per input");
  std::vector<Dist> rows;
  for (Index y : f) rows.push_back(Dist::point_mass(n, y));
  return ConditionalTable::make(k, n, std::move(rows));
}

EmbedResult embed_ltn_in_crbm(const ThresholdNet& net, double eps) {
  net.validate();
  require(is_generic(net), ErrorCode::NotGeneric, "network has a tied pre-activation");
  const auto target = deterministic_table(net.k, net.n, ltn_table(net));
  return scale_until(net, target, eps, alpha_for(net), true);
}

ConditionalTable feedforward_sigmoid_table(const ThresholdNet& net) {
  net.validate();
  std::vector<Dist> rows;
  for (Index x = 0; x < space_size(net.k); ++x) {
    const auto z = heaviside(net.V * bits_of(x, net.k) + net.c);
    require(z.has_value(), ErrorCode::NotGeneric, "first layer tie at input " + std::to_string(x));
    const Eigen::VectorXd pre = net.W.transpose() * bits_of(*z, net.m) + net.b;
    std::vector<double> probs(space_size(net.n), 1.0);
    for (Index y = 0; y < probs.size(); ++y) {
      for (int i = 0; i < net.n; ++i) probs[y] *= bit(y, i) ? sigmoid(pre(i)) : sigmoid(-pre(i));
    }
    rows.push_back(Dist{net.n, std::move(probs)});
  }
  return ConditionalTable{net.k, net.n, std::move(rows)};
}

EmbedResult embed_sigmoid_output(const ThresholdNet& net, double eps) {
  const auto target = feedforward_sigmoid_table(net);
  return scale_until(net, target, eps, alpha_for(net), false);
}

bool check_deter_fixed_point(const CrbmParams& p, const std::vector<Index>& f) {
  p.validate();
  require(f.size() == space_size(p.k), ErrorCode::ShapeMismatch, "one output per input");
  for (Index x = 0; x < space_size(p.k); ++x) {
    const Eigen::VectorXd y = bits_of(f[x], p.n);
    const auto z = heaviside(p.W * y + p.V * bits_of(x, p.k) + p.c);
    if (!z) return false;
    const auto out = heaviside(p.W.transpose() * bits_of(*z, p.m) + p.b);
    if (!out || *out != f[x]) return false;
  }
  return true;
}

}  // namespace crbm
