// Copyright 2026 The crbmgeo Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file serialize.hpp
 * @brief JSON and CSV forms of the library's values and reports.
 *
 * Every document emitted by the CLI carries a "schema" string naming its
 * layout and version; validate_document checks the required fields before
 * anything is written.
 */

#pragma once

#include <json.hpp>

#include <string>
#include <string_view>

#include "crbm/bounds.hpp"
#include "crbm/compiler.hpp"
#include "crbm/dimension.hpp"
#include "crbm/distributions.hpp"
#include "crbm/ltn.hpp"
#include "crbm/machine.hpp"
#include "crbm/mrf.hpp"
#include "crbm/packing.hpp"
#include "crbm/sharing.hpp"

namespace crbm {

using Json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

/// "crbmgeo.<name>.v<kSchemaVersion>"
std::string schema_id(std::string_view name);

/// Throws ParseError naming the first missing or mistyped field.
void validate_document(const Json& doc);

/// 17 significant digits.
std::string format_real(double v);

/// Integer when it fits in 64 bits, decimal string otherwise.
Json bigint_to_json(const BigInt& v);

Json to_json(const Dist& d);
Dist dist_from_json(const Json& j);
Json to_json(const ConditionalTable& t);
ConditionalTable table_from_json(const Json& j);
Json to_json(const CrbmParams& p);
CrbmParams params_from_json(const Json& j);
Json to_json(const ThresholdNet& net);
ThresholdNet net_from_json(const Json& j);
Json to_json(const CylinderSet& c);
Json to_json(const SharingStep& s);
Json to_json(const PackingSequence& seq);
Json to_json(const CompileReport& r);
Json to_json(const DimExpectation& e);
Json to_json(const DimensionReport& r);
Json to_json(const DivergenceBound& b);

/// Faces as lists of 1-based units: {"N": 3, "faces": [[1, 2], [3]]}; closed downward.
SimplicialComplex complex_from_json(const Json& j);
Json to_json(const SimplicialComplex& c);
/// [{"face": [1, 2], "value": 0.5}, ...]; faces not listed get 0.
MrfModel model_from_json(const SimplicialComplex& c, const Json& theta);

/// Header "state,p"; one line per state, unit 1 first.
std::string to_csv(const Dist& d);
Dist dist_from_csv(std::string_view text, int width);
/// Header "x,<y strings>"; one line per input state.
std::string to_csv(const ConditionalTable& t);
ConditionalTable table_from_csv(std::string_view text, int k, int n);

}  // namespace crbm
