// Copyright 2026 The crbmgeo Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace crbm {

/// Domain error codes shared by every module.
enum class ErrorCode {
  WidthMismatch,
  CapExceeded,
  CenterNotInCylinder,
  InvalidArgument,
  DisjointSupports,
  ZeroInputMass,
  ShapeMismatch,
  DegenerateStep,
  LambdaZero,
  BiasCapExceeded,
  InfeasibleProfile,
  InfeasibleDepth,
  BudgetExceeded,
  SupportTooLarge,
  SupportsDiffer,
  NotBlockConstant,
  TooLarge,
  UnstableRank,
  BudgetMismatch,
  NoBracket,
  TieEncountered,
  NotGeneric,
  ScaleCapExceeded,
  ParseError,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool cond, ErrorCode code, const std::string& what) {
  if (!cond) fail(code, what);
}

}  // namespace crbm
