// Copyright 2026 The crbmgeo Authors
// SPDX-License-Identifier: Apache-2.0

#include "crbm/packing.hpp"

#include <algorithm>
#include <cmath>

#include "crbm/error.hpp"

namespace crbm {
namespace {

void check_depth(long long r) { require(r >= 1, ErrorCode::InvalidArgument, "depth r must be >= 1"); }

/// First coordinate of block L (1-based) for depth r.
int block_offset(int r, int level) {
  int off = 0;
  for (int t = 1; t < level; ++t) off += r - t + 1;
  return off;
}

int block_size(int r, int level) { return r - level + 1; }

Index place(Index value, int offset) { return value << offset; }

Index block_mask(int r, int level) {
  return place(space_size(block_size(r, level)) - 1U, block_offset(r, level));
}

/// Non-star values of a block of the given size: popcount >= 2, ascending.
std::vector<Index> residue_values(int size) {
  std::vector<Index> out;
  for (Index v = 0; v < space_size(size); ++v) {
    if (popcount(v) >= 2) out.push_back(v);
  }
  return out;
}

}  // namespace

long long seq_S(int r) {
  check_depth(r);
  return static_cast<long long>(r) * (r + 1) / 2;
}

SeqValues seq_values(int r) {
  check_depth(r);
  require(r <= kMaxExactDepth, ErrorCode::TooLarge, "exact sequences limited to r <= 512");
  SeqValues v;
  v.r = r;
  v.S = seq_S(r);
  BigInt f = 1;
  BigInt prod = 1;
  for (int i = 2; i <= r; ++i) {
    const BigInt branch = (BigInt(1) << i) - (i + 1);
    f = (BigInt(1) << static_cast<unsigned>(seq_S(i - 1))) + branch * f;
    prod *= branch;
  }
  v.F = f;
  v.R = prod;
  v.K = seq_K(r);
  v.P = seq_P(r);
  return v;
}

double seq_K(long long r) {
  check_depth(r);
  double k = 0.5;
  for (long long i = 2; i <= r; ++i) {
    const double inv = std::ldexp(1.0, static_cast<int>(-std::min<long long>(i, 2000)));
    k = inv + k * (1.0 - inv * static_cast<double>(i + 1));
  }
  return k;
}

double seq_P(long long r) {
  check_depth(r);
  double p = 0.5;
  for (long long i = 2; i <= r; ++i) {
    const double inv = std::ldexp(1.0, static_cast<int>(-std::min<long long>(i, 2000)));
    const double factor = 1.0 - inv * static_cast<double>(i + 1);
    if (factor == 1.0) break;
    p *= factor;
  }
  return p;
}

BigInt resets_needed(int r) {
  check_depth(r);
  return r == 1 ? BigInt(0) : seq_values(r).R;
}

BigInt resets_constructed(int r) {
  check_depth(r);
  BigInt total = 0;
  BigInt groups = 1;
  for (int level = 1; level < r; ++level) {
    const int size = block_size(r, level);
    groups *= (BigInt(1) << size) - (size + 1);
    total += groups;
  }
  return total;
}

PackingSequence build_packing(int k, int r) {
  check_depth(r);
  check_width(k);
  const long long s = seq_S(r);
  require(k >= s, ErrorCode::InfeasibleDepth,
          "k = " + std::to_string(k) + " is smaller than S(r) = " + std::to_string(s));
  const int work = static_cast<int>(s);
  const int copies_bits = k - work;
  const Index copy_mask = (space_size(k) - 1U) & ~(space_size(work) - 1U);

  PackingSequence seq{k, r, {}, {}};
  // Branch prefixes: values of blocks 1..level-1, each placed at its offset.
  std::vector<Index> prefixes{0};
  for (int level = 1; level <= r; ++level) {
    Index prefix_mask = 0;
    for (int t = 1; t < level; ++t) prefix_mask |= block_mask(r, t);
    Index below_mask = 0;  // blocks level+1..r
    for (int t = level + 1; t <= r; ++t) below_mask |= block_mask(r, t);
    const Index cyl_mask = copy_mask | prefix_mask | below_mask;
    const int below_bits = work - block_offset(r, level + 1);

    for (Index prefix : prefixes) {
      if (level > 1) {
        seq.resets.push_back(
            ResetEntry{seq.stars.size(), CylinderSet::make(k, prefix_mask, prefix)});
      }
      for (Index copy = 0; copy < space_size(copies_bits); ++copy) {
        for (Index below = 0; below < space_size(below_bits); ++below) {
          const Index fixed = place(copy, work) | prefix | place(below, block_offset(r, level + 1));
          const auto cyl = CylinderSet::make(k, cyl_mask, fixed);
          seq.stars.push_back(Star::make(State::make(fixed, k), cyl));
        }
      }
    }
    if (level == r) break;
    std::vector<Index> next;
    const auto residue = residue_values(block_size(r, level));
    for (Index prefix : prefixes) {
      for (Index v : residue) next.push_back(prefix | place(v, block_offset(r, level)));
    }
    prefixes = std::move(next);
  }
  return seq;
}

PackingReport validate_packing(const PackingSequence& seq) {
  const int k = seq.k;
  check_width(k);
  constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  std::vector<std::size_t> owner(space_size(k), kNone);
  auto fail_at = [](std::size_t i, std::string what) { return PackingReport{false, std::move(what), i}; };

  for (std::size_t s = 0; s < seq.stars.size(); ++s) {
    const Star& star = seq.stars[s];
    if (star.cylinder.width != k || star.ball.center.width != k) return fail_at(s, "width mismatch");
    if (!star.cylinder.contains(star.center())) return fail_at(s, "center outside cylinder");
    for (Index v : star.members_in_star_order()) {
      if (owner[v] != kNone) return fail_at(s, "star overlaps star " + std::to_string(owner[v]));
      owner[v] = s;
    }
  }
  if (std::find(owner.begin(), owner.end(), kNone) != owner.end()) {
    return fail_at(seq.stars.size(), "stars do not cover the cube");
  }
  for (std::size_t s = 0; s < seq.stars.size(); ++s) {
    for (const auto& v : cylinder_members(seq.stars[s].cylinder)) {
      if (owner[v.index] < s) {
        return fail_at(s, "cylinder meets earlier star " + std::to_string(owner[v.index]));
      }
    }
  }
  for (std::size_t i = 0; i < seq.resets.size(); ++i) {
    const auto& reset = seq.resets[i];
    if (reset.cylinder.width != k || reset.position > seq.stars.size()) {
      return fail_at(i, "malformed reset");
    }
    for (const auto& v : cylinder_members(reset.cylinder)) {
      if (owner[v.index] < reset.position) return fail_at(i, "reset cylinder meets a processed star");
    }
  }
  return PackingReport{};
}

}  // namespace crbm
