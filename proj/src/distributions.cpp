// Copyright 2026 The crbmgeo Authors
// SPDX-License-Identifier: Apache-2.0

#include "crbm/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "crbm/error.hpp"

namespace crbm {

Dist Dist::make(int width, std::vector<double> probs) {
  check_width(width);
  require(probs.size() == space_size(width), ErrorCode::ShapeMismatch,
          "distribution length must be 2^width");
  double total = 0.0;
  for (double p : probs) {
    require(std::isfinite(p) && p >= 0.0, ErrorCode::InvalidArgument,
            "probabilities must be finite and non-negative");
    total += p;
  }
  require(std::abs(total - 1.0) <= kSumTolerance * std::max<double>(1.0, static_cast<double>(probs.size())),
          ErrorCode::InvalidArgument, "probabilities must sum to 1");
  return Dist{width, std::move(probs)};
}

Dist Dist::normalized(int width, std::vector<double> weights) {
  check_width(width);
  require(weights.size() == space_size(width), ErrorCode::ShapeMismatch,
          "weight length must be 2^width");
  double total = 0.0;
  for (double w : weights) {
    require(std::isfinite(w) && w >= 0.0, ErrorCode::InvalidArgument,
            "weights must be finite and non-negative");
    total += w;
  }
  require(total > 0.0, ErrorCode::InvalidArgument, "weights sum to zero");
  for (double& w : weights) w /= total;
  return Dist{width, std::move(weights)};
}

Dist Dist::uniform(int width) {
  check_width(width);
  const auto size = space_size(width);
  return Dist{width, std::vector<double>(size, 1.0 / static_cast<double>(size))};
}

Dist Dist::point_mass(int width, Index at) {
  check_width(width);
  require(at < space_size(width), ErrorCode::InvalidArgument, "point mass outside space");
  std::vector<double> probs(space_size(width), 0.0);
  probs[at] = 1.0;
  return Dist{width, std::move(probs)};
}

bool Dist::strictly_positive() const noexcept {
  return std::all_of(probs.begin(), probs.end(), [](double p) { return p > 0.0; });
}

std::size_t Dist::support_size() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(probs.begin(), probs.end(), [](double p) { return p > 0.0; }));
}

ConditionalTable ConditionalTable::make(int k, int n, std::vector<Dist> rows) {
  check_width(k);
  check_width(n);
  require(n >= 1, ErrorCode::InvalidArgument, "output width must be >= 1");
  require(rows.size() == space_size(k), ErrorCode::ShapeMismatch, "table needs 2^k rows");
  for (const auto& r : rows) {
    require(r.width == n, ErrorCode::ShapeMismatch, "row width must equal n");
  }
  return ConditionalTable{k, n, std::move(rows)};
}

ConditionalTable ConditionalTable::uniform(int k, int n) {
  check_width(k);
  return make(k, n, std::vector<Dist>(space_size(k), Dist::uniform(n)));
}

bool ConditionalTable::strictly_positive() const noexcept {
  return std::all_of(rows.begin(), rows.end(), [](const Dist& r) { return r.strictly_positive(); });
}

std::size_t ConditionalTable::nonzeros() const noexcept {
  std::size_t total = 0;
  for (const auto& r : rows) total += r.support_size();
  return total;
}

PartitionModel PartitionModel::make(int n, std::vector<std::vector<Index>> blocks) {
  check_width(n);
  std::vector<int> seen(space_size(n), 0);
  for (const auto& b : blocks) {
    require(!b.empty(), ErrorCode::InvalidArgument, "empty partition block");
    for (Index v : b) {
      require(v < space_size(n), ErrorCode::InvalidArgument, "block state outside space");
      require(seen[v]++ == 0, ErrorCode::InvalidArgument, "state in more than one block");
    }
  }
  require(std::all_of(seen.begin(), seen.end(), [](int s) { return s == 1; }),
          ErrorCode::InvalidArgument, "blocks do not cover the space");
  return PartitionModel{n, std::move(blocks)};
}

PartitionModel PartitionModel::cylinder(int n, int l) {
  check_width(n);
  require(l >= 0 && l <= n, ErrorCode::InvalidArgument, "need 0 <= l <= n");
  std::vector<std::vector<Index>> blocks(space_size(l));
  const Index low = space_size(l) - 1U;
  for (Index y = 0; y < space_size(n); ++y) blocks[y & low].push_back(y);
  return PartitionModel{n, std::move(blocks)};
}

SupportClass SupportClass::make(int k, int n, std::uint64_t d) {
  check_width(k);
  check_width(n);
  const std::uint64_t max_d = (std::uint64_t{1} << k) * ((std::uint64_t{1} << n) - 1);
  require(d <= max_d, ErrorCode::InvalidArgument, "support class parameter out of range");
  return SupportClass{k, n, d};
}

Dist hadamard(const Dist& p, const Dist& q) {
  require(p.width == q.width, ErrorCode::WidthMismatch, "hadamard on unequal widths");
  std::vector<double> out(p.size());
  double total = 0.0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = p.probs[i] * q.probs[i];
    total += out[i];
  }
  require(total > 0.0, ErrorCode::DisjointSupports, "hadamard of disjoint supports");
  for (double& v : out) v /= total;
  return Dist{p.width, std::move(out)};
}

double kl_dist(const Dist& p, const Dist& q) {
  require(p.width == q.width, ErrorCode::WidthMismatch, "kl on unequal widths");
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double a = p.probs[i];
    if (a == 0.0) continue;
    const double b = q.probs[i];
    if (b == 0.0) return std::numeric_limits<double>::infinity();
    total += a * std::log2(a / b);
  }
  return std::max(total, 0.0);
}

double kl_conditional(const ConditionalTable& p, const ConditionalTable& q) {
  require(p.k == q.k && p.n == q.n, ErrorCode::ShapeMismatch, "table shapes differ");
  double total = 0.0;
  for (std::size_t x = 0; x < p.rows.size(); ++x) total += kl_dist(p.rows[x], q.rows[x]);
  return total / static_cast<double>(p.rows.size());
}

double l1_distance(const Dist& p, const Dist& q) {
  require(p.width == q.width, ErrorCode::WidthMismatch, "distance on unequal widths");
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) total += std::abs(p.probs[i] - q.probs[i]);
  return total;
}

double tv_row_distance(const ConditionalTable& p, const ConditionalTable& q) {
  require(p.k == q.k && p.n == q.n, ErrorCode::ShapeMismatch, "table shapes differ");
  double worst = 0.0;
  for (std::size_t x = 0; x < p.rows.size(); ++x) {
    worst = std::max(worst, l1_distance(p.rows[x], q.rows[x]));
  }
  return worst;
}

ConditionalTable conditional_of_joint(const Dist& joint, int k) {
  require(k >= 0 && k < joint.width, ErrorCode::InvalidArgument, "need 0 <= k < joint width");
  const int n = joint.width - k;
  const Index nx = space_size(k);
  std::vector<Dist> rows;
  rows.reserve(nx);
  for (Index x = 0; x < nx; ++x) {
    std::vector<double> row(space_size(n));
    double mass = 0.0;
    for (Index y = 0; y < row.size(); ++y) {
      row[y] = joint.probs[x | (y << k)];
      mass += row[y];
    }
    require(mass > 0.0, ErrorCode::ZeroInputMass, "input state " + std::to_string(x) + " has zero mass");
    for (double& v : row) v /= mass;
    rows.push_back(Dist{n, std::move(row)});
  }
  return ConditionalTable{k, n, std::move(rows)};
}

Dist joint_of(const Dist& input_marginal, const ConditionalTable& p) {
  require(input_marginal.width == p.k, ErrorCode::ShapeMismatch, "marginal width must equal k");
  const int width = p.k + p.n;
  check_width(width);
  std::vector<double> out(space_size(width));
  for (Index x = 0; x < space_size(p.k); ++x) {
    for (Index y = 0; y < space_size(p.n); ++y) {
      out[x | (y << p.k)] = input_marginal.probs[x] * p.rows[x].probs[y];
    }
  }
  return Dist{width, std::move(out)};
}

bool in_support_class(const ConditionalTable& p, const SupportClass& c) {
  require(p.k == c.k && p.n == c.n, ErrorCode::ShapeMismatch, "support class shape");
  return p.nonzeros() <= (std::uint64_t{1} << p.k) + c.d;
}

std::pair<Dist, double> partition_project(const Dist& p, const PartitionModel& m) {
  require(p.width == m.n, ErrorCode::WidthMismatch, "partition width");
  std::vector<double> out(p.size());
  for (const auto& block : m.blocks) {
    double mass = 0.0;
    for (Index v : block) mass += p.probs[v];
    const double each = mass / static_cast<double>(block.size());
    for (Index v : block) out[v] = each;
  }
  Dist proj{p.width, std::move(out)};
  const double d = kl_dist(p, proj);
  return {std::move(proj), d};
}

bool is_block_constant(const Dist& p, const PartitionModel& m, double tol) {
  for (const auto& block : m.blocks) {
    const double first = p.probs[block.front()];
    for (Index v : block) {
      if (std::abs(p.probs[v] - first) > tol) return false;
    }
  }
  return true;
}

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double standard_normal(std::mt19937_64& rng) {
  const double u1 = 1.0 - uniform01(rng);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Dist random_dist(int width, std::mt19937_64& rng) {
  check_width(width);
  std::vector<double> w(space_size(width));
  for (double& v : w) {
    // Unit exponential; the floor keeps entries strictly positive.
    v = std::max(-std::log1p(-uniform01(rng)), std::numeric_limits<double>::min());
  }
  return Dist::normalized(width, std::move(w));
}

ConditionalTable random_conditional(int k, int n, std::uint64_t seed) {
  check_width(k);
  check_width(n);
  require(n >= 1, ErrorCode::InvalidArgument, "output width must be >= 1");
  std::mt19937_64 rng(seed);
  std::vector<Dist> rows;
  rows.reserve(space_size(k));
  for (Index x = 0; x < space_size(k); ++x) rows.push_back(random_dist(n, rng));
  return ConditionalTable{k, n, std::move(rows)};
}

}  // namespace crbm
