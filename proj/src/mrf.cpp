// Copyright 2026 The crbmgeo Authors
// SPDX-License-Identifier: Apache-2.0

#include "crbm/mrf.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "crbm/error.hpp"

namespace crbm {
namespace {

constexpr double kScaleCap = 1e3;
constexpr int kBisections = 200;

/// Decreasing cardinality, then lexicographic order of the sorted elements.
bool cancel_before(FaceMask a, FaceMask b) {
  const int ca = std::popcount(a);
  const int cb = std::popcount(b);
  if (ca != cb) return ca > cb;
  // The first differing element decides; the set holding the smaller element comes first.
  const FaceMask diff = a ^ b;
  return (a & diff & (~diff + 1)) != 0;
}

double top_coefficient(double w, double b, int N) {
  double j = 0.0;
  double binom = 1.0;
  for (int k = 0; k <= N; ++k) {
    if (k > 0) binom = binom * (N - k + 1) / k;
    const double sign = ((N - k) % 2 == 0) ? 1.0 : -1.0;
    j += sign * binom * softplus(k * w + b);
  }
  return j;
}

}  // namespace

SimplicialComplex SimplicialComplex::make(int N, std::vector<FaceMask> faces) {
  check_width(N);
  require(N >= 1, ErrorCode::InvalidArgument, "ground set must be non-empty");
  std::sort(faces.begin(), faces.end());
  faces.erase(std::unique(faces.begin(), faces.end()), faces.end());
  SimplicialComplex c{N, std::move(faces)};
  require(!c.faces.empty() && c.faces.front() == 0, ErrorCode::InvalidArgument,
          "complex must contain the empty face");
  for (FaceMask a : c.faces) {
    require(a < space_size(N), ErrorCode::InvalidArgument, "face outside ground set");
    for (int i = 0; i < N; ++i) {
      if (bit(a, i)) {
        require(c.contains(a & ~(FaceMask{1} << i)), ErrorCode::InvalidArgument,
                "complex is not downward closed");
      }
    }
  }
  return c;
}

SimplicialComplex SimplicialComplex::closure(int N, const std::vector<FaceMask>& generators) {
  check_width(N);
  std::vector<FaceMask> faces{0};
  for (FaceMask g : generators) {
    require(g < space_size(N), ErrorCode::InvalidArgument, "face outside ground set");
    FaceMask sub = g;
    while (true) {
      faces.push_back(sub);
      if (sub == 0) break;
      sub = (sub - 1) & g;
    }
  }
  return make(N, std::move(faces));
}

SimplicialComplex SimplicialComplex::full(int N) {
  check_width(N);
  std::vector<FaceMask> faces(space_size(N));
  for (FaceMask a = 0; a < faces.size(); ++a) faces[a] = a;
  return make(N, std::move(faces));
}

bool SimplicialComplex::contains(FaceMask a) const {
  return std::binary_search(faces.begin(), faces.end(), a);
}

MrfModel MrfModel::make(SimplicialComplex complex, std::vector<double> theta) {
  require(theta.size() == complex.faces.size(), ErrorCode::ShapeMismatch, "one theta per face");
  for (double t : theta) require(std::isfinite(t), ErrorCode::InvalidArgument, "theta must be finite");
  return MrfModel{std::move(complex), std::move(theta)};
}

double MrfModel::theta_of(FaceMask a) const {
  const auto it = std::lower_bound(complex.faces.begin(), complex.faces.end(), a);
  if (it == complex.faces.end() || *it != a) return 0.0;
  return theta[static_cast<std::size_t>(it - complex.faces.begin())];
}

std::vector<double> mrf_energy(const MrfModel& model) {
  std::vector<double> coeffs(space_size(model.complex.N), 0.0);
  for (std::size_t i = 0; i < model.complex.faces.size(); ++i) coeffs[model.complex.faces[i]] = model.theta[i];
  return mobius_evaluate(coeffs);
}

Dist mrf_distribution(const MrfModel& model) {
  auto e = mrf_energy(model);
  const double z = log_sum_exp(e);
  for (double& v : e) v = std::exp(v - z);
  return Dist{model.complex.N, std::move(e)};
}

std::vector<double> mobius_coefficients(const std::vector<double>& values) {
  require(std::has_single_bit(values.size()), ErrorCode::ShapeMismatch, "length must be a power of 2");
  std::vector<double> f = values;
  for (std::size_t step = 1; step < f.size(); step <<= 1) {
    for (std::size_t v = 0; v < f.size(); ++v) {
      if (v & step) f[v] -= f[v ^ step];
    }
  }
  return f;
}

std::vector<double> mobius_evaluate(const std::vector<double>& coefficients) {
  require(std::has_single_bit(coefficients.size()), ErrorCode::ShapeMismatch,
          "length must be a power of 2");
  std::vector<double> f = coefficients;
  for (std::size_t step = 1; step < f.size(); step <<= 1) {
    for (std::size_t v = 0; v < f.size(); ++v) {
      if (v & step) f[v] += f[v ^ step];
    }
  }
  return f;
}

std::vector<double> younes_values(const YounesSolution& s, int N) {
  check_width(N);
  std::vector<double> out(space_size(N));
  for (Index x = 0; x < out.size(); ++x) {
    double sum = 0.0;
    for (int i = 0; i < N; ++i) {
      if (bit(x, i)) sum += (i == N - 1 && s.eps < 0) ? -1.0 : 1.0;
    }
    out[x] = softplus(s.w * sum + s.b);
  }
  return out;
}

YounesSolution younes_solve(double rho, int N) {
  require(std::isfinite(rho), ErrorCode::InvalidArgument, "rho must be finite");
  require(N >= 1, ErrorCode::InvalidArgument, "N must be >= 1");
  check_width(N);
  const double target = std::abs(rho);
  const double w0 = 1.0;
  const double b0 = -(N - 0.5);
  const auto j_at = [&](double t) { return top_coefficient(t * w0, t * b0, N); };

  double t = 0.0;
  if (target > 0.0) {
    double lo = 0.0;
    double hi = 1.0;
    while (j_at(hi) < target) {
      lo = hi;
      hi *= 2.0;
      require(hi <= kScaleCap, ErrorCode::NoBracket, "|rho| beyond the solver's scale cap");
    }
    for (int it = 0; it < kBisections; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (j_at(mid) < target) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    t = 0.5 * (lo + hi);
  }
  YounesSolution s;
  s.t = t;
  s.w = t * w0;
  s.b = t * b0;
  s.eps = 1;
  if (rho < 0.0) {
    // x_N -> 1 - x_N flips the sign of the top coefficient and shifts the bias by w.
    s.eps = -1;
    s.b += s.w;
  }
  s.coefficients = mobius_coefficients(younes_values(s, N));
  return s;
}

MrfCompileResult compile_mrf_to_rbm(const MrfModel& model, const SimplicialComplex& j_keep,
                                    std::optional<int> m_budget) {
  const int N = model.complex.N;
  require(j_keep.N == N, ErrorCode::WidthMismatch, "J must live on the same ground set");
  for (FaceMask a : j_keep.faces) {
    require(model.complex.contains(a), ErrorCode::InvalidArgument, "J must be a subcomplex of I");
  }
  std::vector<FaceMask> cancel;
  for (FaceMask a : model.complex.faces) {
    if (std::popcount(a) > 1 && !j_keep.contains(a)) cancel.push_back(a);
  }
  std::sort(cancel.begin(), cancel.end(), cancel_before);
  const int m = m_budget.value_or(static_cast<int>(cancel.size()));
  require(m >= static_cast<int>(cancel.size()), ErrorCode::BudgetMismatch,
          "budget below the number of faces to cancel");

  std::vector<double> residual(space_size(N), 0.0);
  for (std::size_t i = 0; i < model.complex.faces.size(); ++i) residual[model.complex.faces[i]] = model.theta[i];

  MrfCompileResult out{CrbmParams::zeros(0, N, m), {}, cancel};
  for (std::size_t u = 0; u < cancel.size(); ++u) {
    const FaceMask a = cancel[u];
    const int size = std::popcount(a);
    const YounesSolution s = younes_solve(residual[a], size);
    const int top = std::bit_width(a) - 1;
    std::vector<int> members;
    for (int i = 0; i < N; ++i) {
      if (bit(a, i)) {
        out.rbm.W(static_cast<Eigen::Index>(u), i) = (i == top && s.eps < 0) ? -s.w : s.w;
        members.push_back(i);
      }
    }
    out.rbm.c(static_cast<Eigen::Index>(u)) = s.b;
    // Scatter the unit's coefficients (indexed by subsets of A) into the residual.
    for (Index local = 0; local < s.coefficients.size(); ++local) {
      FaceMask global = 0;
      for (int j = 0; j < size; ++j) {
        if (bit(local, j)) global |= FaceMask{1} << members[static_cast<std::size_t>(j)];
      }
      residual[global] -= s.coefficients[local];
    }
    residual[a] = 0.0;
  }
  for (int i = 0; i < N; ++i) out.rbm.b(i) = residual[FaceMask{1} << i];
  std::vector<double> theta;
  for (FaceMask a : j_keep.faces) theta.push_back(std::popcount(a) > 1 ? -residual[a] : 0.0);
  out.correction = MrfModel::make(j_keep, std::move(theta));
  return out;
}

SimplicialComplex input_faces(const SimplicialComplex& complex, int k) {
  require(k >= 0 && k <= complex.N, ErrorCode::InvalidArgument, "need 0 <= k <= N");
  std::vector<FaceMask> faces;
  for (FaceMask a : complex.faces) {
    if ((a >> k) == 0) faces.push_back(a);
  }
  return SimplicialComplex::make(complex.N, std::move(faces));
}

int conditional_mrf_units(const SimplicialComplex& complex, int k) {
  int count = 0;
  for (FaceMask a : complex.faces) {
    if ((a >> k) != 0 && std::popcount(a) > 1) ++count;
  }
  return count;
}

CrbmParams compile_conditional_mrf(const MrfModel& model, int k) {
  require(k >= 0 && k < model.complex.N, ErrorCode::InvalidArgument, "need 0 <= k < N");
  const auto res = compile_mrf_to_rbm(model, input_faces(model.complex, k));
  return as_conditional(res.rbm, k);
}

MrfModel product_complex_model(int k, const SimplicialComplex& j,
                               const std::vector<std::vector<double>>& theta_per_input) {
  check_width(k);
  require(theta_per_input.size() == space_size(k), ErrorCode::ShapeMismatch, "one parameter set per input");
  const int N = k + j.N;
  check_width(N);
  std::vector<FaceMask> faces;
  std::vector<double> theta;
  for (std::size_t bi = 0; bi < j.faces.size(); ++bi) {
    std::vector<double> per_x;
    for (const auto& t : theta_per_input) {
      require(t.size() == j.faces.size(), ErrorCode::ShapeMismatch, "parameters aligned with J");
      per_x.push_back(t[bi]);
    }
    // Interaction with the inputs: Mobius coefficients of x -> theta^x_B.
    const auto coeffs = mobius_coefficients(per_x);
    for (FaceMask a = 0; a < space_size(k); ++a) {
      faces.push_back(a | (j.faces[bi] << k));
      theta.push_back(coeffs[a]);
    }
  }
  std::vector<std::size_t> order(faces.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return faces[a] < faces[b]; });
  std::vector<FaceMask> sorted_faces;
  std::vector<double> sorted_theta;
  for (std::size_t i : order) {
    sorted_faces.push_back(faces[i]);
    sorted_theta.push_back(theta[i]);
  }
  return MrfModel::make(SimplicialComplex::make(N, std::move(sorted_faces)), std::move(sorted_theta));
}

}  // namespace crbm
