// Copyright 2026 The crbmgeo Authors
// SPDX-License-Identifier: Apache-2.0

#include "crbm/machine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "crbm/error.hpp"

namespace crbm {
namespace {

void check_visible(const CrbmParams& p) {
  p.validate();
  require(p.k + p.n <= kMaxWidth, ErrorCode::CapExceeded,
          "k + n = " + std::to_string(p.k + p.n) + " exceeds enumeration cap");
}

/// Hidden pre-activations a_j = W_j.y + V_j.x + c_j for one visible state.
void preactivations(const CrbmParams& p, Index x, Index y, Eigen::VectorXd& a) {
  a = p.c;
  for (int i = 0; i < p.n; ++i) {
    if (bit(y, i)) a += p.W.col(i);
  }
  for (int i = 0; i < p.k; ++i) {
    if (bit(x, i)) a += p.V.col(i);
  }
}

double output_bias_term(const CrbmParams& p, Index y) {
  double s = 0.0;
  for (int i = 0; i < p.n; ++i) {
    if (bit(y, i)) s += p.b(i);
  }
  return s;
}

}  // namespace

CrbmParams CrbmParams::zeros(int k, int n, int m) {
  require(k >= 0 && n >= 0 && m >= 0, ErrorCode::InvalidArgument, "negative width");
  return CrbmParams{k,
                    n,
                    m,
                    Eigen::MatrixXd::Zero(m, n),
                    Eigen::MatrixXd::Zero(m, k),
                    Eigen::VectorXd::Zero(n),
                    Eigen::VectorXd::Zero(m)};
}

CrbmParams CrbmParams::random(int k, int n, int m, std::mt19937_64& rng, double scale) {
  CrbmParams p = zeros(k, n, m);
  Eigen::VectorXd theta(p.num_params());
  for (Eigen::Index i = 0; i < theta.size(); ++i) theta(i) = scale * standard_normal(rng);
  return unflatten(k, n, m, theta);
}

void CrbmParams::validate() const {
  require(k >= 0 && n >= 0 && m >= 0, ErrorCode::InvalidArgument, "negative width");
  require(W.rows() == m && W.cols() == n, ErrorCode::ShapeMismatch, "W must be m x n");
  require(V.rows() == m && V.cols() == k, ErrorCode::ShapeMismatch, "V must be m x k");
  require(b.size() == n, ErrorCode::ShapeMismatch, "b must have length n");
  require(c.size() == m, ErrorCode::ShapeMismatch, "c must have length m");
  require(W.allFinite() && V.allFinite() && b.allFinite() && c.allFinite(),
          ErrorCode::InvalidArgument, "parameters must be finite");
}

Eigen::VectorXd CrbmParams::flatten() const {
  Eigen::VectorXd theta(num_params());
  Eigen::Index t = 0;
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < n; ++i) theta(t++) = W(j, i);
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < k; ++i) theta(t++) = V(j, i);
  for (int i = 0; i < n; ++i) theta(t++) = b(i);
  for (int j = 0; j < m; ++j) theta(t++) = c(j);
  return theta;
}

CrbmParams CrbmParams::unflatten(int k, int n, int m, const Eigen::VectorXd& theta) {
  CrbmParams p = zeros(k, n, m);
  require(theta.size() == p.num_params(), ErrorCode::ShapeMismatch, "parameter vector length");
  Eigen::Index t = 0;
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < n; ++i) p.W(j, i) = theta(t++);
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < k; ++i) p.V(j, i) = theta(t++);
  for (int i = 0; i < n; ++i) p.b(i) = theta(t++);
  for (int j = 0; j < m; ++j) p.c(j) = theta(t++);
  return p;
}

double softplus(double a) noexcept {
  return a > 0.0 ? a + std::log1p(std::exp(-a)) : std::log1p(std::exp(a));
}

double sigmoid(double a) noexcept {
  if (a >= 0.0) return 1.0 / (1.0 + std::exp(-a));
  const double e = std::exp(a);
  return e / (1.0 + e);
}

double log_sum_exp(const std::vector<double>& v) {
  if (v.empty()) return -std::numeric_limits<double>::infinity();
  const double hi = *std::max_element(v.begin(), v.end());
  if (!std::isfinite(hi)) return hi;
  double s = 0.0;
  for (double x : v) s += std::exp(x - hi);
  return hi + std::log(s);
}

std::vector<double> log_unnormalized(const CrbmParams& p) {
  check_visible(p);
  std::vector<double> out(space_size(p.k + p.n));
  Eigen::VectorXd a(p.m);
  for (Index y = 0; y < space_size(p.n); ++y) {
    const double by = output_bias_term(p, y);
    for (Index x = 0; x < space_size(p.k); ++x) {
      preactivations(p, x, y, a);
      double s = by;
      for (int j = 0; j < p.m; ++j) s += softplus(a(j));
      out[x | (y << p.k)] = s;
    }
  }
  return out;
}

ConditionalTable eval_conditional(const CrbmParams& p) {
  const auto logp = log_unnormalized(p);
  const Index ny = space_size(p.n);
  std::vector<Dist> rows;
  rows.reserve(space_size(p.k));
  std::vector<double> row(ny);
  for (Index x = 0; x < space_size(p.k); ++x) {
    for (Index y = 0; y < ny; ++y) row[y] = logp[x | (y << p.k)];
    const double z = log_sum_exp(row);
    std::vector<double> probs(ny);
    for (Index y = 0; y < ny; ++y) probs[y] = std::exp(row[y] - z);
    rows.push_back(Dist{p.n, std::move(probs)});
  }
  return ConditionalTable{p.k, p.n, std::move(rows)};
}

Dist eval_joint_rbm(const CrbmParams& p) {
  require(p.k == 0, ErrorCode::InvalidArgument, "eval_joint_rbm needs k = 0");
  auto logp = log_unnormalized(p);
  const double z = log_sum_exp(logp);
  for (double& v : logp) v = std::exp(v - z);
  return Dist{p.n, std::move(logp)};
}

CrbmParams as_joint_rbm(const CrbmParams& p) {
  p.validate();
  CrbmParams q = CrbmParams::zeros(0, p.k + p.n, p.m);
  q.W << p.V, p.W;
  // Input biases are zero: they only shift the input marginal.
  q.b.tail(p.n) = p.b;
  q.c = p.c;
  return q;
}

CrbmParams as_conditional(const CrbmParams& joint, int k) {
  joint.validate();
  require(joint.k == 0, ErrorCode::InvalidArgument, "expected an RBM (k = 0)");
  require(k >= 0 && k < joint.n, ErrorCode::InvalidArgument, "need 0 <= k < visible width");
  const int n = joint.n - k;
  CrbmParams p = CrbmParams::zeros(k, n, joint.m);
  p.V = joint.W.leftCols(k);
  p.W = joint.W.rightCols(n);
  p.b = joint.b.tail(n);
  p.c = joint.c;
  return p;
}

CrbmParams append_hidden_unit(const CrbmParams& p, const Eigen::VectorXd& w_out,
                              const Eigen::VectorXd& w_in, double bias) {
  p.validate();
  require(w_out.size() == p.n, ErrorCode::ShapeMismatch, "w_out must have length n");
  require(w_in.size() == p.k, ErrorCode::ShapeMismatch, "w_in must have length k");
  require(std::isfinite(bias) && w_out.allFinite() && w_in.allFinite(),
          ErrorCode::InvalidArgument, "hidden unit parameters must be finite");
  CrbmParams q = CrbmParams::zeros(p.k, p.n, p.m + 1);
  q.W.topRows(p.m) = p.W;
  q.W.row(p.m) = w_out.transpose();
  q.V.topRows(p.m) = p.V;
  q.V.row(p.m) = w_in.transpose();
  q.b = p.b;
  q.c.head(p.m) = p.c;
  q.c(p.m) = bias;
  return q;
}

CrbmParams remove_last_hidden_unit(const CrbmParams& p) {
  p.validate();
  require(p.m >= 1, ErrorCode::InvalidArgument, "no hidden unit to remove");
  CrbmParams q = CrbmParams::zeros(p.k, p.n, p.m - 1);
  q.W = p.W.topRows(p.m - 1);
  q.V = p.V.topRows(p.m - 1);
  q.b = p.b;
  q.c = p.c.head(p.m - 1);
  return q;
}

bool InferenceMap::any_tie() const {
  return std::any_of(tie.begin(), tie.end(), [](bool t) { return t; });
}

InferenceMap inference_map(const CrbmParams& p) {
  check_visible(p);
  require(p.m <= 64, ErrorCode::CapExceeded, "inference map stores at most 64 hidden units");
  const Index size = space_size(p.k + p.n);
  InferenceMap out{p.k, p.n, p.m, std::vector<std::uint64_t>(size, 0), std::vector<bool>(size, false)};
  Eigen::VectorXd a(p.m);
  // z.a separates over units: z_j = 1 iff a_j > 0; a_j = 0 ties toward z_j = 0.
  for (Index v = 0; v < size; ++v) {
    const Index x = v & (space_size(p.k) - 1U);
    const Index y = v >> p.k;
    preactivations(p, x, y, a);
    for (int j = 0; j < p.m; ++j) {
      if (a(j) > 0.0) out.hidden[v] |= std::uint64_t{1} << j;
      if (a(j) == 0.0) out.tie[v] = true;
    }
  }
  return out;
}

Eigen::MatrixXd conditional_jacobian(const CrbmParams& p) {
  check_visible(p);
  const Index nx = space_size(p.k);
  const Index ny = space_size(p.n);
  const int np = p.num_params();
  const int off_v = p.n * p.m;
  const int off_b = off_v + p.k * p.m;
  const int off_c = off_b + p.n;
  const auto table = eval_conditional(p);

  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(nx) * ny, np);
  Eigen::MatrixXd grad(ny, np);  // d log p~(x, y) per y
  Eigen::VectorXd a(p.m);
  for (Index x = 0; x < nx; ++x) {
    grad.setZero();
    for (Index y = 0; y < ny; ++y) {
      preactivations(p, x, y, a);
      for (int j = 0; j < p.m; ++j) {
        const double s = sigmoid(a(j));
        for (int i = 0; i < p.n; ++i)
          if (bit(y, i)) grad(y, j * p.n + i) = s;
        for (int i = 0; i < p.k; ++i)
          if (bit(x, i)) grad(y, off_v + j * p.k + i) = s;
        grad(y, off_c + j) = s;
      }
      for (int i = 0; i < p.n; ++i)
        if (bit(y, i)) grad(y, off_b + i) = 1.0;
    }
    Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(np);
    for (Index y = 0; y < ny; ++y) mean += table.at(x, y) * grad.row(y);
    for (Index y = 0; y < ny; ++y) {
      jac.row(static_cast<Eigen::Index>(x) * ny + y) = table.at(x, y) * (grad.row(y) - mean);
    }
  }
  return jac;
}

}  // namespace crbm
