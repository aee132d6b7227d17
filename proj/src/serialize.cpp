// Copyright 2026 The crbmgeo Authors
// SPDX-License-Identifier: Apache-2.0

#include "crbm/serialize.hpp"

#include <charconv>
#include <cstdio>
#include <limits>
#include <map>
#include <sstream>
#include <vector>

#include "crbm/error.hpp"

namespace crbm {
namespace {

enum class Kind { Integer, Number, Boolean, String, Array, Object, IntOrString };

struct Field {
  const char* name;
  Kind kind;
};

// Required top-level fields per document name.
const std::map<std::string, std::vector<Field>>& schemas() {
  static const std::map<std::string, std::vector<Field>> table = {
      {"table1", {{"rows", Kind::Array}}},
      {"bounds",
       {{"k", Kind::Integer}, {"n", Kind::Integer}, {"universal", Kind::Object},
        {"deterministic", Kind::Object}}},
      {"pack",
       {{"k", Kind::Integer}, {"r", Kind::Integer}, {"stars", Kind::Array}, {"resets", Kind::Array},
        {"star_count", Kind::Integer}, {"expected_star_count", Kind::IntOrString},
        {"valid", Kind::Boolean}}},
      {"compile",
       {{"params", Kind::Object}, {"report", Kind::Object}, {"seed", Kind::Integer}}},
      {"dim",
       {{"k", Kind::Integer}, {"n", Kind::Integer}, {"m", Kind::Integer}, {"expected", Kind::Object},
        {"numeric", Kind::Integer}, {"tropical", Kind::Integer}, {"agree", Kind::Boolean}}},
      {"divergence",
       {{"k", Kind::Integer}, {"n", Kind::Integer}, {"m", Kind::Integer}, {"bound", Kind::Object},
        {"witnesses", Kind::Array}}},
      {"mrf", {{"params", Kind::Object}, {"tv", Kind::Number}, {"hidden_units", Kind::Integer}}},
      {"ltn",
       {{"params", Kind::Object}, {"t", Kind::Number}, {"alpha", Kind::Number}, {"tv", Kind::Number},
        {"tv_trace", Kind::Array}, {"fixed_point", Kind::Boolean}}},
      {"verify-all", {{"criteria", Kind::Array}, {"all_pass", Kind::Boolean}, {"seed", Kind::Integer}}},
  };
  return table;
}

bool has_kind(const Json& v, Kind kind) {
  switch (kind) {
    case Kind::Integer: return v.is_number_integer();
    case Kind::Number: return v.is_number();
    case Kind::Boolean: return v.is_boolean();
    case Kind::String: return v.is_string();
    case Kind::Array: return v.is_array();
    case Kind::Object: return v.is_object();
    case Kind::IntOrString: return v.is_number_integer() || v.is_string();
  }
  return false;
}

template <class T>
T get_field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) fail(ErrorCode::ParseError, std::string("missing field ") + key);
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception& e) {
    fail(ErrorCode::ParseError, std::string("bad field ") + key + ": " + e.what());
  }
}

Json matrix_to_json(const Eigen::MatrixXd& a) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.push_back(a(i, j));
  }
  return out;
}

Json vector_to_json(const Eigen::VectorXd& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Eigen::MatrixXd matrix_from_json(const Json& j, const char* key, int rows, int cols) {
  const auto flat = get_field<std::vector<double>>(j, key);
  require(flat.size() == static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols),
          ErrorCode::ParseError, std::string("wrong entry count in ") + key);
  Eigen::MatrixXd a(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int c = 0; c < cols; ++c) a(i, c) = flat[static_cast<std::size_t>(i) * cols + c];
  }
  return a;
}

Eigen::VectorXd vector_from_json(const Json& j, const char* key, int size) {
  const auto flat = get_field<std::vector<double>>(j, key);
  require(flat.size() == static_cast<std::size_t>(size), ErrorCode::ParseError,
          std::string("wrong entry count in ") + key);
  return Eigen::Map<const Eigen::VectorXd>(flat.data(), size);
}

FaceMask face_from_json(const Json& face, int N) {
  require(face.is_array(), ErrorCode::ParseError, "face must be a list of units");
  FaceMask a = 0;
  for (const auto& u : face) {
    require(u.is_number_integer(), ErrorCode::ParseError, "units are integers");
    const int i = u.get<int>();
    require(i >= 1 && i <= N, ErrorCode::ParseError, "unit out of range 1..N");
    a |= FaceMask{1} << (i - 1);
  }
  return a;
}

Json face_to_json(FaceMask a, int N) {
  Json out = Json::array();
  for (int i = 0; i < N; ++i) {
    if ((a >> i) & 1U) out.push_back(i + 1);
  }
  return out;
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    out.emplace_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double parse_real(const std::string& s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  require(ec == std::errc() && ptr == s.data() + s.size(), ErrorCode::ParseError, "bad number '" + s + "'");
  return v;
}

std::vector<std::vector<std::string>> csv_records(std::string_view text) {
  std::vector<std::vector<std::string>> out;
  for (auto& line : split(text, '\n')) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) out.push_back(split(line, ','));
  }
  return out;
}

}  // namespace

std::string schema_id(std::string_view name) {
  return "crbmgeo." + std::string(name) + ".v" + std::to_string(kSchemaVersion);
}

void validate_document(const Json& doc) {
  require(doc.is_object(), ErrorCode::ParseError, "document must be an object");
  require(doc.contains("schema") && doc["schema"].is_string(), ErrorCode::ParseError, "missing schema");
  const auto id = doc["schema"].get<std::string>();
  for (const auto& [name, fields] : schemas()) {
    if (id != schema_id(name)) continue;
    for (const auto& f : fields) {
      require(doc.contains(f.name) && has_kind(doc[f.name], f.kind), ErrorCode::ParseError,
              id + ": missing or mistyped field " + f.name);
    }
    return;
  }
  fail(ErrorCode::ParseError, "unknown schema " + id);
}

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Json bigint_to_json(const BigInt& v) {
  if (v >= std::numeric_limits<std::int64_t>::min() && v <= std::numeric_limits<std::int64_t>::max()) {
    return v.convert_to<std::int64_t>();
  }
  return v.str();
}

Json to_json(const Dist& d) { return Json{{"width", d.width}, {"probs", d.probs}}; }

Dist dist_from_json(const Json& j) {
  return Dist::make(get_field<int>(j, "width"), get_field<std::vector<double>>(j, "probs"));
}

Json to_json(const ConditionalTable& t) {
  Json rows = Json::array();
  for (const auto& r : t.rows) rows.push_back(r.probs);
  return Json{{"k", t.k}, {"n", t.n}, {"rows", rows}};
}

ConditionalTable table_from_json(const Json& j) {
  const int k = get_field<int>(j, "k");
  const int n = get_field<int>(j, "n");
  std::vector<Dist> rows;
  for (auto& r : get_field<std::vector<std::vector<double>>>(j, "rows")) rows.push_back(Dist::make(n, std::move(r)));
  return ConditionalTable::make(k, n, std::move(rows));
}

Json to_json(const CrbmParams& p) {
  return Json{{"k", p.k},
              {"n", p.n},
              {"m", p.m},
              {"W", matrix_to_json(p.W)},
              {"V", matrix_to_json(p.V)},
              {"b", vector_to_json(p.b)},
              {"c", vector_to_json(p.c)}};
}

CrbmParams params_from_json(const Json& j) {
  const int k = get_field<int>(j, "k");
  const int n = get_field<int>(j, "n");
  const int m = get_field<int>(j, "m");
  require(k >= 0 && n >= 1 && m >= 0, ErrorCode::ParseError, "need k, m >= 0 and n >= 1");
  CrbmParams p = CrbmParams::zeros(k, n, m);
  p.W = matrix_from_json(j, "W", m, n);
  p.V = matrix_from_json(j, "V", m, k);
  p.b = vector_from_json(j, "b", n);
  p.c = vector_from_json(j, "c", m);
  p.validate();
  return p;
}

Json to_json(const ThresholdNet& net) {
  return Json{{"k", net.k},
              {"m", net.m},
              {"n", net.n},
              {"V", matrix_to_json(net.V)},
              {"c", vector_to_json(net.c)},
              {"W", matrix_to_json(net.W)},
              {"b", vector_to_json(net.b)}};
}

ThresholdNet net_from_json(const Json& j) {
  const int k = get_field<int>(j, "k");
  const int m = get_field<int>(j, "m");
  const int n = get_field<int>(j, "n");
  ThresholdNet net = ThresholdNet::zeros(k, m, n);
  net.V = matrix_from_json(j, "V", m, k);
  net.c = vector_from_json(j, "c", m);
  net.W = matrix_from_json(j, "W", m, n);
  net.b = vector_from_json(j, "b", n);
  net.validate();
  return net;
}

Json to_json(const CylinderSet& c) {
  std::string s(static_cast<std::size_t>(c.width), '*');
  for (int i = 0; i < c.width; ++i) {
    if (bit(c.fixed_mask, i)) s[static_cast<std::size_t>(i)] = bit(c.fixed_values, i) ? '1' : '0';
  }
  return s;
}

Json to_json(const SharingStep& s) {
  return Json{{"width", s.width}, {"lambda", s.lambda()}, {"logit_lambda", s.logit_lambda},
              {"log_odds", s.log_odds}};
}

Json to_json(const PackingSequence& seq) {
  Json stars = Json::array();
  for (const auto& s : seq.stars) {
    stars.push_back(Json{{"center", to_string(s.ball.center)}, {"cylinder", to_json(s.cylinder)}});
  }
  Json resets = Json::array();
  for (const auto& r : seq.resets) {
    resets.push_back(Json{{"before_star", r.position}, {"cylinder", to_json(r.cylinder)}});
  }
  return Json{{"k", seq.k}, {"r", seq.r}, {"stars", stars}, {"resets", resets}};
}

Json to_json(const CompileReport& r) {
  return Json{{"mode", r.mode},
              {"r", r.r},
              {"hidden_units_used", r.hidden_units_used},
              {"resets_used", r.resets_used},
              {"star_steps_used", r.star_steps_used},
              {"stars", r.stars},
              {"resets_scheduled", r.resets_scheduled},
              {"achieved_tv", r.achieved_tv},
              {"clamp_error", r.clamp_error},
              {"tau_final", r.tau_final},
              {"budget_bound", bigint_to_json(r.budget_bound)},
              {"within_budget", r.within_budget}};
}

Json to_json(const DimExpectation& e) {
  return Json{{"value", e.value},
              {"regime", e.regime},
              {"parameter_count", e.parameter_count},
              {"ambient", e.ambient},
              {"exact_codes", e.exact_codes}};
}

Json to_json(const DimensionReport& r) {
  Json centers = Json::array();
  for (Index c : r.centers) centers.push_back(to_string(State::make(c, r.k + r.n)));
  return Json{{"k", r.k},
              {"n", r.n},
              {"m", r.m},
              {"expected", to_json(r.expected)},
              {"numeric", r.numeric},
              {"tropical", r.tropical},
              {"centers", centers},
              {"slicing_condition", r.slicing_condition},
              {"agree", r.agree}};
}

Json to_json(const DivergenceBound& b) {
  return Json{{"value", b.value},
              {"prop_applies", b.prop_applies},
              {"prop_term", b.prop_term},
              {"l", b.l_star},
              {"r", b.r_star}};
}

SimplicialComplex complex_from_json(const Json& j) {
  const int N = get_field<int>(j, "N");
  require(N >= 1 && N <= kMaxWidth, ErrorCode::ParseError, "N out of range");
  std::vector<FaceMask> gens;
  for (const auto& f : get_field<Json>(j, "faces")) gens.push_back(face_from_json(f, N));
  return SimplicialComplex::closure(N, gens);
}

Json to_json(const SimplicialComplex& c) {
  Json faces = Json::array();
  for (FaceMask a : c.faces) faces.push_back(face_to_json(a, c.N));
  return Json{{"N", c.N}, {"faces", faces}};
}

MrfModel model_from_json(const SimplicialComplex& c, const Json& theta) {
  require(theta.is_array(), ErrorCode::ParseError, "theta must be a list of {face, value}");
  std::vector<double> values(c.faces.size(), 0.0);
  for (const auto& entry : theta) {
    const FaceMask a = face_from_json(get_field<Json>(entry, "face"), c.N);
    const double v = get_field<double>(entry, "value");
    bool found = false;
    for (std::size_t i = 0; i < c.faces.size(); ++i) {
      if (c.faces[i] == a) {
        values[i] = v;
        found = true;
      }
    }
    require(found, ErrorCode::ParseError, "theta face not in the complex");
  }
  return MrfModel::make(c, std::move(values));
}

std::string to_csv(const Dist& d) {
  std::ostringstream out;
  out << "state,p\n";
  for (Index v = 0; v < d.size(); ++v) {
    out << to_string(State::make(v, d.width)) << ',' << format_real(d.probs[v]) << '\n';
  }
  return out.str();
}

Dist dist_from_csv(std::string_view text, int width) {
  const auto recs = csv_records(text);
  require(!recs.empty() && recs.front().size() == 2, ErrorCode::ParseError, "expected header state,p");
  std::vector<double> probs(space_size(width), 0.0);
  require(recs.size() == probs.size() + 1, ErrorCode::ParseError, "one line per state");
  for (std::size_t i = 1; i < recs.size(); ++i) {
    require(recs[i].size() == 2, ErrorCode::ParseError, "two columns per line");
    const State s = state_from_string(recs[i][0]);
    require(s.width == width, ErrorCode::ParseError, "state width");
    probs[s.index] = parse_real(recs[i][1]);
  }
  return Dist::make(width, std::move(probs));
}

std::string to_csv(const ConditionalTable& t) {
  std::ostringstream out;
  out << 'x';
  for (Index y = 0; y < space_size(t.n); ++y) out << ',' << to_string(State::make(y, t.n));
  out << '\n';
  for (Index x = 0; x < space_size(t.k); ++x) {
    out << (t.k == 0 ? std::string() : to_string(State::make(x, t.k)));
    for (double p : t.rows[x].probs) out << ',' << format_real(p);
    out << '\n';
  }
  return out.str();
}

ConditionalTable table_from_csv(std::string_view text, int k, int n) {
  check_width(k);
  check_width(n);
  const auto recs = csv_records(text);
  const std::size_t cols = space_size(n) + 1;
  require(recs.size() == space_size(k) + 1, ErrorCode::ParseError, "one line per input state");
  std::vector<Dist> rows(space_size(k));
  for (std::size_t i = 1; i < recs.size(); ++i) {
    require(recs[i].size() == cols, ErrorCode::ParseError, "one column per output state");
    const Index x = k == 0 ? 0 : state_from_string(recs[i][0]).index;
    require(x < rows.size(), ErrorCode::ParseError, "input state");
    std::vector<double> probs;
    for (std::size_t c = 1; c < cols; ++c) probs.push_back(parse_real(recs[i][c]));
    rows[x] = Dist::make(n, std::move(probs));
  }
  return ConditionalTable::make(k, n, std::move(rows));
}

}  // namespace crbm
