// Copyright 2026 The crbmgeo Authors
// SPDX-License-Identifier: Apache-2.0

#include "crbm/error.hpp"

namespace crbm {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::WidthMismatch: return "WidthMismatch";
    case ErrorCode::CapExceeded: return "CapExceeded";
    case ErrorCode::CenterNotInCylinder: return "CenterNotInCylinder";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DisjointSupports: return "DisjointSupports";
    case ErrorCode::ZeroInputMass: return "ZeroInputMass";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::DegenerateStep: return "DegenerateStep";
    case ErrorCode::LambdaZero: return "LambdaZero";
    case ErrorCode::BiasCapExceeded: return "BiasCapExceeded";
    case ErrorCode::InfeasibleProfile: return "InfeasibleProfile";
    case ErrorCode::InfeasibleDepth: return "InfeasibleDepth";
    case ErrorCode::BudgetExceeded: return "BudgetExceeded";
    case ErrorCode::SupportTooLarge: return "SupportTooLarge";
    case ErrorCode::SupportsDiffer: return "SupportsDiffer";
    case ErrorCode::NotBlockConstant: return "NotBlockConstant";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::UnstableRank: return "UnstableRank";
    case ErrorCode::BudgetMismatch: return "BudgetMismatch";
    case ErrorCode::NoBracket: return "NoBracket";
    case ErrorCode::TieEncountered: return "TieEncountered";
    case ErrorCode::NotGeneric: return "NotGeneric";
    case ErrorCode::ScaleCapExceeded: return "ScaleCapExceeded";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

}  // namespace crbm
