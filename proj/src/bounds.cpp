// Copyright 2026 The crbmgeo Authors
// SPDX-License-Identifier: Apache-2.0

#include "crbm/bounds.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>

#include "crbm/error.hpp"

namespace crbm {
namespace {

using Mask = std::uint64_t;

void check_code_args(int n, int d) {
  require(n >= 1, ErrorCode::InvalidArgument, "code length must be >= 1");
  require(d >= 0, ErrorCode::InvalidArgument, "distance must be >= 0");
  require(n <= kMaxExactCodeLength, ErrorCode::TooLarge, "exact code search limited to length 6");
}

int floor_log2(unsigned long long v) { return static_cast<int>(std::bit_width(v)) - 1; }

BigInt pow2(long long e) { return BigInt(1) << static_cast<unsigned>(e); }

/// Branch and bound max clique on <= 64 vertices with a greedy colouring bound.
class MaxClique {
 public:
  explicit MaxClique(std::vector<Mask> adj) : adj_(std::move(adj)) {}

  int solve(Mask candidates, int base) {
    best_ = base;
    expand(candidates, base);
    return best_;
  }

 private:
  void expand(Mask cand, int size) {
    if (cand == 0) {
      best_ = std::max(best_, size);
      return;
    }
    // Colour classes give an upper bound on the clique inside cand.
    std::vector<int> order;
    std::vector<int> colour;
    Mask uncoloured = cand;
    int c = 0;
    while (uncoloured != 0) {
      ++c;
      Mask avail = uncoloured;
      while (avail != 0) {
        const int v = std::countr_zero(avail);
        avail &= ~(Mask{1} << v);
        avail &= ~adj_[static_cast<std::size_t>(v)];
        uncoloured &= ~(Mask{1} << v);
        order.push_back(v);
        colour.push_back(c);
      }
    }
    for (std::size_t i = order.size(); i-- > 0;) {
      if (size + colour[i] <= best_) return;
      const int v = order[i];
      expand(cand & adj_[static_cast<std::size_t>(v)], size + 1);
      cand &= ~(Mask{1} << v);
    }
  }

  std::vector<Mask> adj_;
  int best_ = 0;
};

/// Exact minimum cover of the cube by radius-d balls.
class Cover {
 public:
  Cover(int n, int d) : size_(1U << n) {
    for (unsigned c = 0; c < size_; ++c) {
      Mask ball = 0;
      for (unsigned v = 0; v < size_; ++v) {
        if (std::popcount(c ^ v) <= d) ball |= Mask{1} << v;
      }
      balls_.push_back(ball);
    }
  }

  int solve() {
    const Mask all = size_ == 64 ? ~Mask{0} : (Mask{1} << size_) - 1;
    best_ = static_cast<int>(size_);
    // The code may be translated so that it contains 0.
    search(all & ~balls_[0], 1);
    return best_;
  }

 private:
  void search(Mask uncovered, int used) {
    if (uncovered == 0) {
      best_ = std::min(best_, used);
      return;
    }
    int gain = 0;
    for (unsigned c = 0; c < size_; ++c) gain = std::max(gain, std::popcount(balls_[c] & uncovered));
    const int need = (std::popcount(uncovered) + gain - 1) / gain;
    if (used + need >= best_) return;
    const unsigned p = static_cast<unsigned>(std::countr_zero(uncovered));
    // Some codeword covers p; try each candidate center, most useful first.
    std::vector<std::pair<int, unsigned>> cands;
    for (unsigned c = 0; c < size_; ++c) {
      if ((balls_[c] >> p) & 1U) cands.emplace_back(-std::popcount(balls_[c] & uncovered), c);
    }
    std::sort(cands.begin(), cands.end());
    for (const auto& [neg, c] : cands) search(uncovered & ~balls_[c], used + 1);
  }

  unsigned size_;
  std::vector<Mask> balls_;
  int best_ = 0;
};

}  // namespace

long long code_A_exact(int n, int d) {
  check_code_args(n, d);
  const unsigned size = 1U << n;
  if (d <= 1) return size;
  if (d > n) return 1;
  std::vector<Mask> adj(size, 0);
  for (unsigned a = 0; a < size; ++a)
    for (unsigned b = 0; b < size; ++b)
      if (std::popcount(a ^ b) >= d) adj[a] |= Mask{1} << b;
  // Codes are translation invariant, so 0 can be taken as a codeword.
  MaxClique solver(std::move(adj));
  const Mask cand = [&] {
    Mask m = 0;
    for (unsigned b = 1; b < size; ++b)
      if (std::popcount(b) >= d) m |= Mask{1} << b;
    return m;
  }();
  return solver.solve(cand, 1);
}

long long code_K_exact(int n, int d) {
  check_code_args(n, d);
  if (d >= n) return 1;
  return Cover(n, d).solve();
}

long long code_A_lower(int n, int d) {
  require(n >= 1, ErrorCode::InvalidArgument, "code length must be >= 1");
  require(d == 4, ErrorCode::InvalidArgument, "closed-form lower bound offered for d = 4 only");
  require(n <= 62, ErrorCode::TooLarge, "length too large");
  const auto q = static_cast<unsigned long long>(n) * static_cast<unsigned long long>(n) - n + 2;
  return 1LL << std::max(0, n - floor_log2(q));
}

long long code_K_upper(int n, int d) {
  require(n >= 1, ErrorCode::InvalidArgument, "code length must be >= 1");
  require(d == 1, ErrorCode::InvalidArgument, "closed-form upper bound offered for d = 1 only");
  require(n <= 62, ErrorCode::TooLarge, "length too large");
  return 1LL << (n - floor_log2(static_cast<unsigned long long>(n) + 1));
}

DimExpectation expected_dim(int k, int n, int m) {
  require(k >= 0 && n >= 1 && m >= 0, ErrorCode::InvalidArgument, "need k >= 0, n >= 1, m >= 0");
  require(k + n <= 60, ErrorCode::TooLarge, "k + n too large");
  DimExpectation e;
  e.parameter_count = static_cast<long long>(k + n + 1) * m + n;
  e.ambient = (1LL << k) * ((1LL << n) - 1);
  const int len = k + n;
  e.exact_codes = len <= kMaxExactCodeLength;
  const long long a4 = e.exact_codes ? code_A_exact(len, 4) : code_A_lower(len, 4);
  const long long k1 = e.exact_codes ? code_K_exact(len, 1) : code_K_upper(len, 1);
  if (static_cast<long long>(m) + 1 <= a4) {
    e.value = e.parameter_count;
    e.regime = "parameter-counting";
  } else if (m >= k1) {
    e.value = e.ambient;
    e.regime = "full";
  } else {
    e.value = std::min(e.parameter_count, e.ambient);
    e.regime = "unresolved";
  }
  return e;
}

long long dim_lower_bound_small_m(int k, int n, int m) {
  return static_cast<long long>(n + k) * m + n + m + k - ((1LL << k) - 1);
}

BigInt star_budget(int k, int r, const BigInt& per_star) {
  const long long s = seq_S(r);
  require(k >= s, ErrorCode::InfeasibleDepth, "k < S(r)");
  return pow2(k - s) * seq_values(r).F * per_star + resets_needed(r);
}

BigInt universal_budget(int k, int n, int r) { return star_budget(k, r, pow2(n) - 1); }

std::vector<int> feasible_depths(int k) {
  std::vector<int> out;
  for (int r = 1; r <= kMaxExactDepth && seq_S(r) <= k; ++r) out.push_back(r);
  return out;
}

int best_depth(int k, int n) {
  const auto rs = feasible_depths(k);
  require(!rs.empty(), ErrorCode::InfeasibleDepth, "no feasible depth for k = 0");
  int best = rs.front();
  BigInt best_m = universal_budget(k, n, best);
  for (int r : rs) {
    const BigInt m = universal_budget(k, n, r);
    if (m < best_m) {
      best_m = m;
      best = r;
    }
  }
  return best;
}

UniversalTable universal_m_table(int k, int n) {
  require(k >= 0 && n >= 1, ErrorCode::InvalidArgument, "need k >= 0, n >= 1");
  UniversalTable t;
  t.k = k;
  t.n = n;
  for (int r : feasible_depths(k)) t.by_depth.emplace_back(r, universal_budget(k, n, r));
  if (!t.by_depth.empty()) {
    t.best_r = best_depth(k, n);
    t.minimum = universal_budget(k, n, t.best_r);
  }
  t.rbm_route = pow2(k + n - 1) - 1;
  const BigInt num = pow2(k) * (pow2(n) - 1) - n;
  const BigInt den = n + k + 1;
  t.necessary = num <= 0 ? BigInt(0) : BigInt((num + den - 1) / den);
  return t;
}

double rbm_divergence_term(int k, int n, long long m) {
  require(m >= 0, ErrorCode::InvalidArgument, "m must be >= 0");
  const int big_n = n + k;
  if (big_n - 1 < 62 && m >= (1LL << (big_n - 1)) - 1) return 0.0;
  const int j = floor_log2(static_cast<unsigned long long>(m) + 1);
  return static_cast<double>(big_n - j) - std::ldexp(static_cast<double>(m + 1), -j);
}

std::pair<int, int> largest_feasible_l(int k, int n, long long m) {
  const BigInt budget = m;
  for (int l = n; l >= 1; --l) {
    for (int r : feasible_depths(k)) {
      if (star_budget(k, r, pow2(l) - 1) <= budget) return {l, r};
    }
  }
  return {0, 0};
}

DivergenceBound divergence_bound(int k, int n, long long m) {
  require(k >= 0 && n >= 1 && m >= 0, ErrorCode::InvalidArgument, "need k >= 0, n >= 1, m >= 0");
  DivergenceBound b;
  const int big_n = n + k;
  b.prop_applies = big_n - 1 >= 62 || m <= (1LL << (big_n - 1)) - 1;
  b.prop_term = rbm_divergence_term(k, n, m);
  std::tie(b.l_star, b.r_star) = largest_feasible_l(k, n, m);
  b.value = std::min({b.prop_term, static_cast<double>(n), static_cast<double>(n - b.l_star)});
  return b;
}

double divergence_upper(int k, int n, long long m) { return divergence_bound(k, n, m).value; }

DeterministicBounds deterministic_m_bounds(int k, int n) {
  require(k >= 1 && n >= 1, ErrorCode::InvalidArgument, "need k, n >= 1");
  require(k <= 200, ErrorCode::TooLarge, "k too large");
  DeterministicBounds out;
  const BigInt num = BigInt(3) * n * pow2(k);
  const BigInt den = k + 2;
  out.sufficient = std::min(BigInt(pow2(k) - 1), BigInt((num + den - 1) / den));
  const double nec = std::ceil(std::exp2(0.5 * k) -
                               static_cast<double>((n + k) * (n + k)) / (2.0 * n));
  out.necessary = nec <= 0.0 ? 0 : static_cast<long long>(nec);
  // Least m with m (n+k)^2 + n m^2 >= n 2^k, by bisection on integers.
  const BigInt target = BigInt(n) * pow2(k);
  const BigInt sq = BigInt(n + k) * (n + k);
  auto ok = [&](const BigInt& m) { return m * sq + BigInt(n) * m * m >= target; };
  BigInt lo = 0;
  BigInt hi = 1;
  while (!ok(hi)) hi *= 2;
  while (lo < hi) {
    const BigInt mid = (lo + hi) / 2;
    if (ok(mid)) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  out.counting_exact = lo;
  return out;
}

BigInt ltf_count_bound(int inputs, int outputs) {
  require(inputs >= 1 && outputs >= 1, ErrorCode::InvalidArgument, "need N, M >= 1");
  return pow2(static_cast<long long>(inputs) * inputs * outputs);
}

}  // namespace crbm
