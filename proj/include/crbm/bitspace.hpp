// Copyright 2026 The crbmgeo Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file bitspace.hpp
 * @brief States of {0,1}^N as little-endian bit indices, plus Hamming balls,
 *        cylinder sets and stars.
 *
 * Unit i (1-based, as in the text) is bit i-1 of the index. String forms list
 * unit 1 first, so "100" is index 1 and "001" is index 4.
 */

#pragma once

#include <bit>
#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace crbm {

/// Largest width any enumeration will accept.
inline constexpr int kMaxWidth = 26;

using Index = std::uint32_t;

/// Throws CapExceeded / InvalidArgument unless 0 <= width <= kMaxWidth.
void check_width(int width);

[[nodiscard]] constexpr Index space_size(int width) noexcept { return Index{1} << width; }

[[nodiscard]] constexpr bool bit(Index v, int i) noexcept { return ((v >> i) & 1U) != 0U; }

[[nodiscard]] constexpr int popcount(Index v) noexcept { return std::popcount(v); }

struct State {
  Index index = 0;
  int width = 1;

  /// Validating constructor.
  static State make(Index index, int width);

  friend bool operator==(const State&, const State&) = default;
  friend auto operator<=>(const State&, const State&) = default;
};

/// Parses "0110" with unit 1 first.
State state_from_string(std::string_view bits);
std::string to_string(const State& s);

/// Popcount of XOR. Throws WidthMismatch on unequal widths.
int hamming_distance(const State& a, const State& b);

/// A face of the cube: coordinates in `fixed_mask` carry the bits of `fixed_values`.
struct CylinderSet {
  int width = 1;
  Index fixed_mask = 0;
  Index fixed_values = 0;

  static CylinderSet make(int width, Index fixed_mask, Index fixed_values);
  static CylinderSet full(int width) { return make(width, 0, 0); }

  [[nodiscard]] Index free_mask() const noexcept { return (space_size(width) - 1U) & ~fixed_mask; }
  [[nodiscard]] int dimension() const noexcept { return width - popcount(fixed_mask); }
  [[nodiscard]] bool contains(Index v) const noexcept { return (v & fixed_mask) == fixed_values; }
  [[nodiscard]] Index size() const noexcept { return space_size(dimension()); }
  /// Smallest element, free coordinates at zero.
  [[nodiscard]] Index smallest() const noexcept { return fixed_values; }

  friend bool operator==(const CylinderSet&, const CylinderSet&) = default;
};

struct HammingBall {
  State center;
};

/// Intersection of a radius-1 ball with a cylinder containing its center.
struct Star {
  HammingBall ball;
  CylinderSet cylinder;

  /// Throws CenterNotInCylinder if the cylinder misses the center.
  static Star make(const State& center, const CylinderSet& cylinder);

  /// Center, then center with each free coordinate flipped (ascending coordinate).
  [[nodiscard]] std::vector<Index> members_in_star_order() const;
  [[nodiscard]] Index center() const noexcept { return ball.center.index; }
};

/// Center plus its N neighbours, ascending index order.
std::vector<State> ball_members(const HammingBall& ball);

/// All 2^(N-|fixed|) members, ascending index order.
std::vector<State> cylinder_members(const CylinderSet& c);

/// Ball intersected with cylinder, ascending index order.
std::vector<State> star_members(const Star& s);

/// Indices of the members of a star, ascending.
std::vector<Index> star_indices(const Star& s);

/// True if the points (as real vectors of width `width`) are affinely independent.
bool affinely_independent(std::span<const Index> points, int width);

/// Rank of the member matrix with an appended column of ones.
int affine_rank(std::span<const Index> points, int width);

}  // namespace crbm
