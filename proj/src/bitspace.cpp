// Copyright 2026 The crbmgeo Authors
// SPDX-License-Identifier: Apache-2.0

#include "crbm/bitspace.hpp"

#include <algorithm>

#include "crbm/error.hpp"
#include "crbm/exact_rank.hpp"

namespace crbm {

void check_width(int width) {
  require(width >= 0, ErrorCode::InvalidArgument, "negative width");
  require(width <= kMaxWidth, ErrorCode::CapExceeded,
          "width " + std::to_string(width) + " exceeds cap " + std::to_string(kMaxWidth));
}

State State::make(Index index, int width) {
  check_width(width);
  require(width >= 1, ErrorCode::InvalidArgument, "state width must be >= 1");
  require(index < space_size(width), ErrorCode::InvalidArgument, "state index out of range");
  return State{index, width};
}

State state_from_string(std::string_view bits) {
  require(!bits.empty(), ErrorCode::ParseError, "empty bit string");
  Index v = 0;
  for (std::size_t i = 0; i < bits.size(); ++i) {
    const char ch = bits[i];
    require(ch == '0' || ch == '1', ErrorCode::ParseError, "bit string must contain only 0/1");
    if (ch == '1') v |= Index{1} << i;
  }
  return State::make(v, static_cast<int>(bits.size()));
}

std::string to_string(const State& s) {
  std::string out(static_cast<std::size_t>(s.width), '0');
  for (int i = 0; i < s.width; ++i) {
    if (bit(s.index, i)) out[static_cast<std::size_t>(i)] = '1';
  }
  return out;
}

int hamming_distance(const State& a, const State& b) {
  require(a.width == b.width, ErrorCode::WidthMismatch, "hamming_distance on unequal widths");
  return popcount(a.index ^ b.index);
}

CylinderSet CylinderSet::make(int width, Index fixed_mask, Index fixed_values) {
  check_width(width);
  const Index all = space_size(width) - 1U;
  require((fixed_mask & ~all) == 0, ErrorCode::InvalidArgument, "fixed mask exceeds width");
  require((fixed_values & ~fixed_mask) == 0, ErrorCode::InvalidArgument,
          "fixed values outside fixed mask");
  return CylinderSet{width, fixed_mask, fixed_values};
}

Star Star::make(const State& center, const CylinderSet& cylinder) {
  require(center.width == cylinder.width, ErrorCode::WidthMismatch, "star center/cylinder width");
  require(cylinder.contains(center.index), ErrorCode::CenterNotInCylinder,
          "cylinder does not contain the star center");
  return Star{HammingBall{center}, cylinder};
}

std::vector<Index> Star::members_in_star_order() const {
  std::vector<Index> out{center()};
  const Index free = cylinder.free_mask();
  for (int i = 0; i < cylinder.width; ++i) {
    if (bit(free, i)) out.push_back(center() ^ (Index{1} << i));
  }
  return out;
}

std::vector<State> ball_members(const HammingBall& ball) {
  const State& c = ball.center;
  std::vector<State> out{c};
  for (int i = 0; i < c.width; ++i) out.push_back(State{c.index ^ (Index{1} << i), c.width});
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<State> cylinder_members(const CylinderSet& c) {
  std::vector<State> out;
  out.reserve(c.size());
  // Enumerate submasks of the free mask in ascending order.
  const Index free = c.free_mask();
  Index sub = 0;
  do {
    out.push_back(State{c.fixed_values | sub, c.width});
    sub = (sub - free) & free;
  } while (sub != 0);
  return out;
}

std::vector<Index> star_indices(const Star& s) {
  require(s.cylinder.contains(s.center()), ErrorCode::CenterNotInCylinder,
          "cylinder does not contain the star center");
  auto out = s.members_in_star_order();
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<State> star_members(const Star& s) {
  std::vector<State> out;
  for (Index v : star_indices(s)) out.push_back(State{v, s.cylinder.width});
  return out;
}

int affine_rank(std::span<const Index> points, int width) {
  IntMatrix rows;
  rows.reserve(points.size());
  for (Index p : points) {
    std::vector<std::int64_t> row(static_cast<std::size_t>(width) + 1, 1);
    for (int i = 0; i < width; ++i) row[static_cast<std::size_t>(i)] = bit(p, i) ? 1 : 0;
    rows.push_back(std::move(row));
  }
  return exact_rank(rows);
}

bool affinely_independent(std::span<const Index> points, int width) {
  return affine_rank(points, width) == static_cast<int>(points.size());
}

}  // namespace crbm
