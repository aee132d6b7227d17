// Copyright 2026 The crbmgeo Authors
// SPDX-License-Identifier: Apache-2.0

#include "crbm/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <future>
#include <optional>
#include <random>
#include <sstream>

#include "crbm/acceptance.hpp"
#include "crbm/error.hpp"
#include "crbm/serialize.hpp"

namespace crbm {
namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// What a subcommand produced: a JSON document or CSV text.
struct Output {
  std::optional<Json> doc;
  std::string csv;
  int exit_code = kExitOk;
};

Json document(std::string_view name) { return Json{{"schema", schema_id(name)}}; }

/// Inline JSON if the argument starts with '{' or '[', otherwise a file path.
Json load_json(const std::string& arg) {
  const auto first = arg.find_first_not_of(" \t\n");
  std::string text;
  if (first != std::string::npos && (arg[first] == '{' || arg[first] == '[')) {
    text = arg;
  } else {
    std::ifstream in(arg);
    if (!in) throw UsageError("cannot read " + arg);
    std::ostringstream s;
    s << in.rdbuf();
    text = s.str();
  }
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    fail(ErrorCode::ParseError, e.what());
  }
}

std::filesystem::path resolve_out(const std::string& out) {
  std::filesystem::path p(out);
  if (p.is_relative()) {
    if (const char* dir = std::getenv(kOutDirEnv); dir != nullptr && *dir != '\0') p = std::filesystem::path(dir) / p;
  }
  return p;
}

// ---- random targets for compile ---------------------------------------------

std::vector<double> positive_weights(std::size_t count, std::mt19937_64& rng) {
  std::vector<double> w(count);
  for (double& v : w) v = -std::log1p(-uniform01(rng));
  return w;
}

ConditionalTable random_support_target(int k, int n, std::uint64_t d, std::mt19937_64& rng) {
  std::vector<std::vector<double>> w(space_size(k), std::vector<double>(space_size(n), 0.0));
  for (auto& row : w) row[rng() % space_size(n)] = 0.1 + uniform01(rng);
  for (std::uint64_t i = 0; i < d; ++i) w[rng() % space_size(k)][rng() % space_size(n)] += 0.1 + uniform01(rng);
  std::vector<Dist> rows;
  for (auto& row : w) rows.push_back(Dist::normalized(n, std::move(row)));
  return ConditionalTable::make(k, n, std::move(rows));
}

ConditionalTable random_common_target(int k, int n, std::mt19937_64& rng) {
  std::vector<bool> in_support(space_size(n), false);
  in_support[rng() % space_size(n)] = true;
  for (Index y = 0; y < space_size(n); ++y) {
    if (uniform01(rng) < 0.5) in_support[y] = true;
  }
  std::vector<Dist> rows;
  for (Index x = 0; x < space_size(k); ++x) {
    auto w = positive_weights(space_size(n), rng);
    for (Index y = 0; y < space_size(n); ++y) {
      if (!in_support[y]) w[y] = 0.0;
      else w[y] += 1e-3;
    }
    rows.push_back(Dist::normalized(n, std::move(w)));
  }
  return ConditionalTable::make(k, n, std::move(rows));
}

ConditionalTable random_partition_target(int k, int n, int l, std::mt19937_64& rng) {
  const Index mask = space_size(l) - 1U;
  std::vector<Dist> rows;
  for (Index x = 0; x < space_size(k); ++x) {
    const auto blocks = positive_weights(space_size(l), rng);
    std::vector<double> w(space_size(n));
    for (Index y = 0; y < space_size(n); ++y) w[y] = blocks[y & mask];
    rows.push_back(Dist::normalized(n, std::move(w)));
  }
  return ConditionalTable::make(k, n, std::move(rows));
}

// ---- subcommands --------------------------------------------------------------

Output cmd_table1(int rmax, const std::string& format) {
  if (rmax < 1 || rmax > kMaxExactDepth) throw UsageError("--rmax must be in 1.." + std::to_string(kMaxExactDepth));
  Output o;
  if (format == "csv") {
    std::ostringstream s;
    s << "r,two_pow_neg_S,F,R,K,P\n";
    for (int r = 1; r <= rmax; ++r) {
      const auto v = seq_values(r);
      s << r << ',' << format_real(std::ldexp(1.0, -static_cast<int>(seq_S(r)))) << ',' << v.F << ',' << v.R
        << ',' << format_real(v.K) << ',' << format_real(v.P) << '\n';
    }
    o.csv = s.str();
    return o;
  }
  Json doc = document("table1");
  doc["rows"] = Json::array();
  for (int r = 1; r <= rmax; ++r) {
    const auto v = seq_values(r);
    doc["rows"].push_back(Json{{"r", r},
                               {"two_pow_neg_S", std::ldexp(1.0, -static_cast<int>(seq_S(r)))},
                               {"F", bigint_to_json(v.F)},
                               {"R", bigint_to_json(v.R)},
                               {"K", v.K},
                               {"P", v.P}});
  }
  o.doc = std::move(doc);
  return o;
}

Output cmd_bounds(int k, int n, std::optional<long long> m) {
  Json doc = document("bounds");
  doc["k"] = k;
  doc["n"] = n;
  const auto t = universal_m_table(k, n);
  Json by_depth = Json::array();
  for (const auto& [r, budget] : t.by_depth) by_depth.push_back(Json{{"r", r}, {"m", bigint_to_json(budget)}});
  doc["universal"] = Json{{"by_depth", by_depth},
                          {"minimum", t.minimum ? bigint_to_json(*t.minimum) : Json(nullptr)},
                          {"best_r", t.best_r},
                          {"rbm_route", bigint_to_json(t.rbm_route)},
                          {"necessary", bigint_to_json(t.necessary)}};
  const auto d = deterministic_m_bounds(k, n);
  doc["deterministic"] = Json{{"sufficient", bigint_to_json(d.sufficient)},
                              {"necessary", d.necessary},
                              {"counting_exact", bigint_to_json(d.counting_exact)}};
  if (m) {
    if (*m < 0) throw UsageError("--m must be >= 0");
    doc["m"] = *m;
    doc["divergence"] = to_json(divergence_bound(k, n, *m));
    if (*m <= std::numeric_limits<int>::max()) {
      doc["expected_dim"] = to_json(expected_dim(k, n, static_cast<int>(*m)));
      doc["dim_lower_bound"] = dim_lower_bound_small_m(k, n, static_cast<int>(*m));
    }
  }
  return Output{std::move(doc), {}, kExitOk};
}

Output cmd_pack(int k, int r) {
  const auto seq = build_packing(k, r);
  const auto rep = validate_packing(seq);
  Json doc = document("pack");
  const Json body = to_json(seq);
  for (const auto& [key, v] : body.items()) doc[key] = v;
  doc["star_count"] = seq.stars.size();
  doc["expected_star_count"] =
      bigint_to_json((BigInt(1) << static_cast<unsigned>(k - seq_S(r))) * seq_values(r).F);
  doc["resets_needed"] = bigint_to_json(resets_needed(r));
  doc["valid"] = rep.ok;
  if (!rep.ok) doc["violation"] = rep.violation;
  return Output{std::move(doc), {}, rep.ok ? kExitOk : kExitDomainError};
}

struct CompileArgs {
  int k = 1;
  int n = 1;
  std::optional<int> r;
  double eps = 1e-2;
  std::optional<std::uint64_t> seed;
  std::string mode = "universal";
  std::optional<int> l;
  std::uint64_t d = 1;
  std::string target;
  std::string format = "json";
};

Output cmd_compile(const CompileArgs& a) {
  if (a.target.empty() && !a.seed) throw UsageError("--seed is required unless --target is given");
  std::mt19937_64 rng(a.seed.value_or(0));
  const int l = a.l.value_or(std::max(0, a.n - 1));
  ConditionalTable target;
  if (!a.target.empty()) {
    target = table_from_json(load_json(a.target));
  } else if (a.mode == "universal") {
    target = random_conditional(a.k, a.n, *a.seed);
  } else if (a.mode == "support") {
    target = random_support_target(a.k, a.n, a.d, rng);
  } else if (a.mode == "common") {
    target = random_common_target(a.k, a.n, rng);
  } else {
    target = random_partition_target(a.k, a.n, l, rng);
  }
  const int r = a.r.value_or(best_depth(target.k, target.n));
  CompileOptions opts;
  opts.eps = a.eps;
  CompileResult res;
  if (a.mode == "universal") res = compile_universal(target, r, opts);
  else if (a.mode == "support") res = compile_support_points(target, a.d, opts);
  else if (a.mode == "common") res = compile_common_support(target, r, opts);
  else res = compile_partition(target, l, r, opts);

  Output o;
  if (a.format == "csv") {
    o.csv = to_csv(eval_conditional(res.params));
    return o;
  }
  Json doc = document("compile");
  doc["seed"] = a.seed.value_or(0);
  doc["params"] = to_json(res.params);
  doc["report"] = to_json(res.report);
  doc["target_tv"] = tv_row_distance(eval_conditional(res.params), target);
  o.doc = std::move(doc);
  return o;
}

Output cmd_dim(int k, int n, int m, int trials, std::uint64_t seed) {
  if (trials < 1) throw UsageError("--trials must be >= 1");
  Json doc = document("dim");
  const Json body = to_json(certify_dimension(k, n, m, trials, seed));
  for (const auto& [key, v] : body.items()) doc[key] = v;
  doc["seed"] = seed;
  doc["trials"] = trials;
  return Output{std::move(doc), {}, kExitOk};
}

Output cmd_divergence(int k, int n, long long m, int targets, std::uint64_t seed) {
  if (targets < 0) throw UsageError("--targets must be >= 0");
  Json doc = document("divergence");
  doc["k"] = k;
  doc["n"] = n;
  doc["m"] = m;
  doc["seed"] = seed;
  doc["bound"] = to_json(divergence_bound(k, n, m));
  std::vector<std::future<WitnessResult>> jobs;
  for (int i = 0; i < targets; ++i) {
    jobs.push_back(std::async(std::launch::async,
                              [=] { return divergence_witness(random_conditional(k, n, seed + i), m); }));
  }
  doc["witnesses"] = Json::array();
  double worst = 0.0;
  for (int i = 0; i < targets; ++i) {
    const auto w = jobs[static_cast<std::size_t>(i)].get();
    worst = std::max(worst, w.divergence);
    doc["witnesses"].push_back(Json{{"target_seed", seed + i},
                                    {"divergence", w.divergence},
                                    {"l", w.l},
                                    {"r", w.r},
                                    {"hidden_units", w.hidden_units_used}});
  }
  doc["max_divergence"] = worst;
  return Output{std::move(doc), {}, kExitOk};
}

Output cmd_mrf(const std::string& complex_arg, const std::string& theta_arg, std::optional<int> k) {
  const auto complex = complex_from_json(load_json(complex_arg));
  const auto model = model_from_json(complex, load_json(theta_arg));
  Json doc = document("mrf");
  doc["complex"] = to_json(complex);
  const Dist p = mrf_distribution(model);
  if (k) {
    const auto params = compile_conditional_mrf(model, *k);
    doc["k"] = *k;
    doc["params"] = to_json(params);
    doc["hidden_units"] = params.m;
    doc["tv"] = tv_row_distance(eval_conditional(params), conditional_of_joint(p, *k));
  } else {
    const auto res = compile_mrf_to_rbm(model, SimplicialComplex::closure(complex.N, {}));
    doc["params"] = to_json(res.rbm);
    doc["hidden_units"] = res.rbm.m;
    Json faces = Json::array();
    for (FaceMask a : res.unit_faces) {
      Json face = Json::array();
      for (int i = 0; i < complex.N; ++i) {
        if ((a >> i) & 1U) face.push_back(i + 1);
      }
      faces.push_back(std::move(face));
    }
    doc["unit_faces"] = faces;
    doc["tv"] = l1_distance(eval_joint_rbm(res.rbm), p);
  }
  return Output{std::move(doc), {}, kExitOk};
}

Output cmd_ltn(const std::string& mode, std::optional<int> k, const std::string& net_arg, double eps, bool sigmoid,
               bool perturb) {
  ThresholdNet net;
  if (mode == "parity") {
    if (!k) throw UsageError("--k is required for --mode parity");
    net = parity_net(*k);
  } else {
    if (net_arg.empty()) throw UsageError("--net is required for --mode embed");
    net = net_from_json(load_json(net_arg));
  }
  if (perturb && !is_generic(net)) net = perturb_to_generic(net);
  Json doc = document("ltn");
  doc["mode"] = mode;
  doc["net"] = to_json(net);
  const EmbedResult res = sigmoid ? embed_sigmoid_output(net, eps) : embed_ltn_in_crbm(net, eps);
  doc["params"] = to_json(res.params);
  doc["alpha"] = res.alpha;
  doc["t"] = res.t;
  doc["tv_trace"] = res.tv_trace;
  doc["tv"] = res.tv_trace.back();
  doc["output"] = sigmoid ? "sigmoid" : "deterministic";
  doc["fixed_point"] = !sigmoid && check_deter_fixed_point(res.params, ltn_table(net));
  return Output{std::move(doc), {}, kExitOk};
}

Output cmd_verify_all(std::uint64_t seed, bool timing) {
  Json doc = document("verify-all");
  doc["seed"] = seed;
  doc["criteria"] = Json::array();
  bool all = true;
  for (const auto& c : run_acceptance(seed)) {
    Json e{{"id", c.id}, {"name", c.name}, {"pass", c.pass}, {"detail", c.detail}};
    if (timing) {
      e["seconds"] = c.seconds;
      e["limit_seconds"] = c.limit_seconds;
    }
    doc["criteria"].push_back(std::move(e));
    all = all && c.pass;
  }
  // Negative control: a tolerance no sharpness up to tau_max can reach.
  std::string observed = "none";
  try {
    CompileOptions opts;
    opts.eps = 1e-12;
    opts.tau_max = opts.tau0;
    compile_universal(random_conditional(1, 1, seed), 1, opts);
  } catch (const Error& e) {
    observed = std::string(to_string(e.code()));
  }
  doc["negative_control"] =
      Json{{"expected", "BudgetExceeded"}, {"observed", observed}, {"pass", observed == "BudgetExceeded"}};
  all = all && observed == "BudgetExceeded";
  doc["all_pass"] = all;
  return Output{std::move(doc), {}, all ? kExitOk : kExitDomainError};
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"crbm: compile and certify conditional restricted Boltzmann machines", "crbm"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string out_path;
  app.add_option("--out", out_path, "Write output here instead of stdout (relative to $CRBM_OUT_DIR if set)");

  std::function<Output()> action;

  auto* table1 = app.add_subcommand("table1", "Sequences S, F, R, K, P by depth");
  int rmax = 5;
  std::string t1_format = "csv";
  table1->add_option("--rmax", rmax, "Largest depth")->capture_default_str();
  table1->add_option("--format", t1_format)->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  table1->callback([&] { action = [&] { return cmd_table1(rmax, t1_format); }; });

  auto* bounds = app.add_subcommand("bounds", "Hidden-unit, dimension and divergence bounds");
  int bk = 1;
  int bn = 1;
  std::optional<long long> bm;
  bounds->add_option("--k", bk)->required()->check(CLI::Range(0, 64));
  bounds->add_option("--n", bn)->required()->check(CLI::Range(1, 64));
  bounds->add_option("--m", bm);
  bounds->callback([&] { action = [&] { return cmd_bounds(bk, bn, bm); }; });

  auto* pack = app.add_subcommand("pack", "Star packing sequence of {0,1}^k");
  int pk = 1;
  int pr = 1;
  pack->add_option("--k", pk)->required()->check(CLI::Range(1, 20));
  pack->add_option("--r", pr)->required()->check(CLI::Range(1, 6));
  pack->callback([&] { action = [&] { return cmd_pack(pk, pr); }; });

  auto* compile = app.add_subcommand("compile", "Compile a target conditional table into CRBM weights");
  CompileArgs ca;
  compile->add_option("--k", ca.k)->check(CLI::Range(0, 12));
  compile->add_option("--n", ca.n)->check(CLI::Range(1, 12));
  compile->add_option("--r", ca.r);
  compile->add_option("--eps", ca.eps)->check(CLI::PositiveNumber)->capture_default_str();
  compile->add_option("--seed", ca.seed);
  compile->add_option("--mode", ca.mode)
      ->check(CLI::IsMember({"universal", "support", "common", "partition"}))
      ->capture_default_str();
  compile->add_option("--l", ca.l, "Partition depth (default n-1)");
  compile->add_option("--d", ca.d, "Extra support points for --mode support")->capture_default_str();
  compile->add_option("--target", ca.target, "Conditional table JSON (file or inline)");
  compile->add_option("--format", ca.format)->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  compile->callback([&] {
    if (ca.target.empty() && (compile->count("--k") == 0 || compile->count("--n") == 0)) {
      throw CLI::ValidationError("compile", "--k and --n are required without --target");
    }
    action = [&] { return cmd_compile(ca); };
  });

  auto* dim = app.add_subcommand("dim", "Certify the dimension of a CRBM model");
  int dk = 1;
  int dn = 1;
  int dm = 1;
  int trials = 8;
  std::uint64_t dseed = 0;
  dim->add_option("--k", dk)->required()->check(CLI::Range(0, 10));
  dim->add_option("--n", dn)->required()->check(CLI::Range(1, 10));
  dim->add_option("--m", dm)->required()->check(CLI::Range(0, 64));
  dim->add_option("--trials", trials)->capture_default_str();
  dim->add_option("--seed", dseed)->capture_default_str();
  dim->callback([&] { action = [&] { return cmd_dim(dk, dn, dm, trials, dseed); }; });

  auto* div = app.add_subcommand("divergence", "Divergence bound and witnesses on random targets");
  int vk = 1;
  int vn = 1;
  long long vm = 0;
  int targets = 20;
  std::uint64_t vseed = 0;
  div->add_option("--k", vk)->required()->check(CLI::Range(0, 10));
  div->add_option("--n", vn)->required()->check(CLI::Range(1, 10));
  div->add_option("--m", vm)->required()->check(CLI::NonNegativeNumber);
  div->add_option("--targets", targets)->capture_default_str();
  div->add_option("--seed", vseed)->required();
  div->callback([&] { action = [&] { return cmd_divergence(vk, vn, vm, targets, vseed); }; });

  auto* mrf = app.add_subcommand("mrf", "Compile a binary MRF into (C)RBM weights");
  std::string complex_arg;
  std::string theta_arg;
  std::optional<int> mk;
  mrf->add_option("--complex", complex_arg, "{\"N\": .., \"faces\": [[1,2], ..]} (file or inline)")->required();
  mrf->add_option("--theta", theta_arg, "[{\"face\": [1,2], \"value\": ..}, ..] (file or inline)")->required();
  mrf->add_option("--k", mk, "Number of input units for the conditional variant");
  mrf->callback([&] { action = [&] { return cmd_mrf(complex_arg, theta_arg, mk); }; });

  auto* ltn = app.add_subcommand("ltn", "Embed a linear threshold network into a CRBM");
  std::string lmode = "parity";
  std::optional<int> lk;
  std::string net_arg;
  double leps = 1e-3;
  bool sigmoid = false;
  ltn->add_option("--mode", lmode)->check(CLI::IsMember({"parity", "embed"}))->capture_default_str();
  ltn->add_option("--k", lk)->check(CLI::Range(1, 16));
  ltn->add_option("--net", net_arg, "Threshold net JSON (file or inline)");
  ltn->add_option("--eps", leps)->check(CLI::PositiveNumber)->capture_default_str();
  bool perturb = false;
  ltn->add_flag("--sigmoid", sigmoid, "Keep the output layer finite (sigmoid outputs)");
  ltn->add_flag("--perturb", perturb, "Shift tied biases by 1e-9 before embedding");
  ltn->callback([&] { action = [&] { return cmd_ltn(lmode, lk, net_arg, leps, sigmoid, perturb); }; });

  auto* verify = app.add_subcommand("verify-all", "Run the acceptance suite");
  std::uint64_t aseed = kDefaultAcceptanceSeed;
  bool timing = false;
  verify->add_option("--seed", aseed)->capture_default_str();
  verify->add_flag("--timing", timing, "Include wall times (output is then not reproducible)");
  verify->callback([&] { action = [&] { return cmd_verify_all(aseed, timing); }; });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    Output o = action();
    std::string text;
    if (o.doc) {
      validate_document(*o.doc);
      text = o.doc->dump(2) + "\n";
    } else {
      text = o.csv;
    }
    if (out_path.empty()) {
      out << text;
    } else {
      const auto path = resolve_out(out_path);
      std::ofstream f(path, std::ios::binary);
      if (!f) throw UsageError("cannot write " + path.string());
      f << text;
    }
    return o.exit_code;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitDomainError;
  }
}

}  // namespace crbm
