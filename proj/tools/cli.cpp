// Copyright 2026 The antiphase Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "antiphase/energy.hpp"
#include "antiphase/errors.hpp"
#include "antiphase/gamma.hpp"
#include "antiphase/phi.hpp"
#include "antiphase/solver.hpp"
#include "antiphase/specfun.hpp"
#include "antiphase/state.hpp"
#include "antiphase/verify.hpp"

namespace antiphase::cli {

using nlohmann::json;

// ------------------------------------------------------------------ config

void RunConfig::merge(const json& j) {
  if (!j.is_object()) throw ParseError("config: expected a JSON object", j.dump());
  for (const auto& [key, v] : j.items()) {
    try {
      if (key == "p") p = v.get<double>();
      else if (key == "J") J = v.get<double>();
      else if (key == "rel_tol") rel_tol = v.get<double>();
      else if (key == "abs_tol") abs_tol = v.get<double>();
      else if (key == "tail_tol") tail_tol = v.get<double>();
      else if (key == "h_max") h_max = v.get<int>();
      else if (key == "exhaustive_cap") exhaustive_cap = v.get<int>();
      else if (key == "bnb_validation_cap") bnb_validation_cap = v.get<int>();
      else if (key == "d_max") d_max = v.get<int>();
      else if (key == "K") {
        if (v.is_array()) {
          K.clear();
          for (const auto& x : v) K += (K.empty() ? "" : ",") + std::to_string(x.get<int>());
        } else {
          K = v.get<std::string>();
        }
      } else if (key == "cache_path") cache_path = v.get<std::string>();
      else if (key == "format") format = v.get<std::string>();
      else if (key == "threads") threads = v.get<int>();
      else throw ParseError("config: unknown key", key);
    } catch (const json::exception&) {
      throw ParseError("config: wrong type for key", key);
    }
  }
}

json RunConfig::echo() const {
  return {{"p", p},
          {"J", J},
          {"rel_tol", rel_tol},
          {"abs_tol", abs_tol},
          {"tail_tol", tail_tol},
          {"h_max", h_max},
          {"exhaustive_cap", exhaustive_cap},
          {"bnb_validation_cap", bnb_validation_cap},
          {"d_max", d_max},
          {"K", K},
          {"cache_path", cache_path},
          {"format", format}};
}

void RunConfig::validate() const {
  if (format != "json" && format != "csv" && format != "human")
    throw ParseError("format: expected json, csv or human", format);
  if (!(p > 1.0)) throw DomainError("p must exceed 1");
  if (!(J > 0.0)) throw DomainError("J must be positive");
  if (!(rel_tol > 0.0) || !(abs_tol > 0.0) || !(tail_tol > 0.0))
    throw ValidationError("tolerances must be positive");
  if (h_max < 2) throw ValidationError("h_max must be at least 2");
  if (exhaustive_cap < 1 || bnb_validation_cap < 1) throw ValidationError("caps must be positive");
  if (d_max < 0) throw ValidationError("d_max must be nonnegative");
  if (threads < 0) throw ValidationError("threads must be nonnegative");
}

std::vector<int> parse_int_list(std::string_view text, std::string_view what) {
  const auto to_int = [&](std::string_view s) {
    int v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size())
      throw ParseError(std::string(what) + ": not an integer", std::string(s));
    return v;
  };
  std::vector<int> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = std::min(text.find(',', pos), text.size());
    const auto item = text.substr(pos, comma - pos);
    const std::size_t dots = item.find("..");
    if (dots == std::string_view::npos) {
      out.push_back(to_int(item));
    } else {
      const int a = to_int(item.substr(0, dots));
      const int b = to_int(item.substr(dots + 2));
      if (b < a) throw ParseError(std::string(what) + ": empty range", std::string(item));
      for (int v = a; v <= b; ++v) out.push_back(v);
    }
    pos = comma + 1;
  }
  return out;
}

namespace {

// ----------------------------------------------------------------- output

// A command's answer: a JSON object and optionally one table, which is
// also stored in the object under `table_key`.
struct Output {
  json result = json::object();
  std::vector<std::string> columns;
  json rows = json::array();
  std::string table_key;
};

std::string scalar_text(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_null()) return "";
  if (v.is_array()) {
    std::string s;
    for (const auto& x : v) s += (s.empty() ? "" : " ") + scalar_text(x);
    return s;
  }
  return v.dump();
}

std::string csv_cell(const json& v) {
  const std::string s = scalar_text(v);
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

void flatten(const json& v, const std::string& prefix, std::vector<std::pair<std::string, json>>& out) {
  if (v.is_object()) {
    for (const auto& [k, x] : v.items()) flatten(x, prefix.empty() ? k : prefix + "." + k, out);
  } else if (v.is_array() && !v.empty() && (v.front().is_object() || v.front().is_array())) {
    for (std::size_t i = 0; i < v.size(); ++i) flatten(v[i], prefix + "." + std::to_string(i), out);
  } else {
    out.emplace_back(prefix, v);
  }
}

void write_table_csv(const Output& o, std::ostream& os) {
  for (std::size_t c = 0; c < o.columns.size(); ++c) os << (c ? "," : "") << o.columns[c];
  os << "\n";
  for (const auto& row : o.rows) {
    for (std::size_t c = 0; c < o.columns.size(); ++c)
      os << (c ? "," : "") << (row.contains(o.columns[c]) ? csv_cell(row[o.columns[c]]) : "");
    os << "\n";
  }
}

void render(const std::string& command, const RunConfig& cfg, Output o, std::ostream& out) {
  if (!o.table_key.empty()) o.result[o.table_key] = o.rows;
  if (cfg.format == "json") {
    json doc = {{"command", command}, {"version", kVersion}, {"config", cfg.echo()}, {"result", o.result}};
    out << doc.dump(2) << "\n";
    return;
  }
  json scalars = o.result;
  if (!o.table_key.empty()) scalars.erase(o.table_key);
  std::vector<std::pair<std::string, json>> flat;
  flatten(scalars, "", flat);
  if (cfg.format == "csv") {
    if (!o.columns.empty()) {
      write_table_csv(o, out);
    } else {
      out << "key,value\n";
      for (const auto& [k, v] : flat) out << csv_cell(json(k)) << "," << csv_cell(v) << "\n";
    }
    return;
  }
  out << command << "\n";
  std::size_t width = 0;
  for (const auto& kv : flat) width = std::max(width, kv.first.size());
  for (const auto& [k, v] : flat) out << "  " << k << std::string(width - k.size(), ' ') << "  " << scalar_text(v) << "\n";
  if (o.columns.empty()) return;
  std::vector<std::size_t> w(o.columns.size());
  for (std::size_t c = 0; c < w.size(); ++c) {
    w[c] = o.columns[c].size();
    for (const auto& row : o.rows) w[c] = std::max(w[c], scalar_text(row.value(o.columns[c], json())).size());
  }
  auto line = [&](const std::function<std::string(std::size_t)>& cell) {
    out << " ";
    for (std::size_t c = 0; c < w.size(); ++c) {
      const std::string s = cell(c);
      out << " " << std::string(w[c] - s.size(), ' ') << s;
    }
    out << "\n";
  };
  line([&](std::size_t c) { return o.columns[c]; });
  for (const auto& row : o.rows) line([&](std::size_t c) { return scalar_text(row.value(o.columns[c], json())); });
}

void write_csv_file(const std::string& path, const Output& o) {
  std::ofstream f(path);
  if (!f) throw ValidationError("cannot write " + path);
  write_table_csv(o, f);
}

// ---------------------------------------------------------------- helpers

ModelParams model(const RunConfig& cfg) {
  ModelParams m;
  m.p = cfg.p;
  m.J = cfg.J;
  m.quad.rel_tol = cfg.rel_tol;
  m.quad.abs_tol = cfg.abs_tol;
  m.tail_tol = cfg.tail_tol;
  m.validate();
  return m;
}

SolverConfig solver_config(const RunConfig& cfg) {
  SolverConfig s;
  s.exhaustive_cap = cfg.exhaustive_cap;
  s.threads = cfg.threads;
  return s;
}

// h* when it is resolvable and unique.
std::optional<StripeGroundState> try_hstar(const ModelParams& m, const RunConfig& cfg) {
  try {
    auto g = find_hstar(m, cfg.h_max);
    if (g.uniqueness == Uniqueness::unique) return g;
  } catch (const InconclusiveError&) {
  }
  return std::nullopt;
}

StripeGroundState unique_hstar(const ModelParams& m, const RunConfig& cfg) {
  auto g = find_hstar(m, cfg.h_max);
  g.require_unique();
  return g;
}

std::vector<int> k_list(const RunConfig& cfg, const char* fallback) {
  return parse_int_list(cfg.K.empty() ? fallback : cfg.K, "K");
}

json gamma_json(const GammaValue& v) {
  return v.finite ? json(v.value) : json("inf");
}

std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t next = std::min(text.find(sep, pos), text.size());
    out.emplace_back(text.substr(pos, next - pos));
    pos = next + 1;
  }
  return out;
}

json phi_value_row(int j, const PhiValue& v) {
  return {{"j", j},
          {"K", v.K},
          {"N", v.n_sites},
          {"value", v.value},
          {"minimizer", v.minimizer.to_string()},
          {"defect", v.defect.to_string()},
          {"d_max_used", v.d_max_used},
          {"from_cache", v.from_cache}};
}

json phi_estimate_json(const PhiEstimate& e) {
  return {{"j", e.j},
          {"modulus", e.modulus},
          {"extrapolated", e.extrapolated},
          {"error_bound", e.error_bound},
          {"fit_exponent", e.fit_exponent ? json(*e.fit_exponent) : json()},
          {"fit_residual", e.fit_residual},
          {"search_mode", to_string(e.search_mode)},
          {"flagged", e.flagged}};
}

struct PhiOptions {
  std::string mode = "single_defect";
  bool no_escalate = false;
  std::uint64_t node_limit = 50'000'000;
};

PhiConfig phi_config(const RunConfig& cfg, const PhiOptions& po, PhiCache* cache) {
  PhiConfig pc;
  pc.mode = parse_phi_mode(po.mode);
  pc.d_max = cfg.d_max;
  pc.escalate = !po.no_escalate;
  pc.exhaustive_cap = cfg.exhaustive_cap;
  pc.threads = cfg.threads;
  pc.bnb.exhaustive_cap = cfg.bnb_validation_cap;
  pc.bnb.node_limit = po.node_limit;
  pc.bnb.threads = cfg.threads;
  pc.cache = cache;
  return pc;
}

std::vector<PhiEstimate> phi_table(const ModelParams& m, const StripeGroundState& g, const std::vector<int>& Ks,
                                   const PhiConfig& pc) {
  std::vector<PhiEstimate> t;
  for (int j = 0; j < 2 * g.h_star; ++j) t.push_back(phi_estimate(j, m, g, Ks, pc));
  return t;
}

// --------------------------------------------------------------- commands

Output cmd_energy(const RunConfig& cfg, const std::string& state, const std::string& blocks) {
  const auto m = model(cfg);
  const SpinState s = !state.empty() ? SpinState::parse(state) : BlockArray::parse(blocks).to_state();
  const auto canon = to_blocks(s).blocks;
  const auto e = energy_blocks(canon, m);
  Output o;
  o.result = {{"n_sites", s.n_sites()},
              {"blocks", canon.to_string()},
              {"ferro", e.ferro},
              {"antiferro", e.antiferro},
              {"total", e.total},
              {"error_bound", e.error_bound}};
  if (const auto g = try_hstar(m, cfg)) {
    o.result["h_star"] = g->h_star;
    o.result["renormalized"] = e.total - s.n_sites() * g->e_star;
  } else {
    o.result["h_star"] = nullptr;
    o.result["renormalized"] = nullptr;
  }
  return o;
}

Output cmd_hstar(const RunConfig& cfg) {
  const auto m = model(cfg);
  const auto g = find_hstar(m, cfg.h_max);
  const bool decreasing = g.uniqueness == Uniqueness::decreasing_regime;
  Output o;
  o.result = {{"h_star", decreasing ? json() : json(g.h_star)},
              {"e_star", decreasing ? json() : json(g.e_star)},
              {"uniqueness", to_string(g.uniqueness)},
              {"decreasing_regime", decreasing},
              {"J", m.J}};
  if (m.p > 2.0) {
    const double jp = jp_threshold(m.p, m.quad);
    o.result["J_p"] = jp;
    o.result["J_threshold"] = 2.0 * jp;
    o.result["J_vs_threshold"] = m.J > 2.0 * jp ? "above" : "below";
  }
  return o;
}

Output cmd_ecurve(const RunConfig& cfg) {
  const auto m = model(cfg);
  Output o;
  o.columns = {"h", "e"};
  o.table_key = "table";
  std::vector<double> e;
  for (int h = 1; h <= cfg.h_max; ++h) {
    e.push_back(energy_per_site(h, m));
    o.rows.push_back({{"h", h}, {"e", e.back()}});
  }
  const int arg = static_cast<int>(std::min_element(e.begin(), e.end()) - e.begin());
  bool unimodal = true;
  for (int k = 1; k < cfg.h_max; ++k) unimodal = unimodal && (k <= arg ? e[k] < e[k - 1] : e[k] > e[k - 1]);
  o.result = {{"argmin_h", arg + 1},
              {"min_e", e[arg]},
              {"argmin_at_boundary", arg + 1 == cfg.h_max},
              {"unimodal", unimodal},
              {"decreasing_regime", m.p > 2.0 && m.J > 2.0 * jp_threshold(m.p, m.quad)}};
  return o;
}

Output cmd_jp(const RunConfig& cfg) {
  const auto m = model(cfg);
  if (!(m.p > 2.0)) throw DomainError("jp: the threshold exists only for p > 2");
  const double jp = jp_threshold(m.p, m.quad);
  const double z = riemann_zeta(m.p - 1.0);
  Output o;
  o.result = {{"p", m.p},
              {"J_p", jp},
              {"zeta_p_minus_1", z},
              {"abs_diff", std::fabs(jp - z)},
              {"J", m.J},
              {"J_threshold", 2.0 * jp},
              {"decreasing_regime", m.J > 2.0 * jp}};
  return o;
}

struct GroundOptions {
  int N = 0;
  bool exact = false;
  bool bnb = false;
  bool require_certified = false;
  std::optional<double> c_override;
  std::uint64_t node_limit = 50'000'000;
  std::string log_path;
};

Output cmd_ground(const RunConfig& cfg, const GroundOptions& go) {
  const auto m = model(cfg);
  if (go.N < 1) throw DomainError("ground: N must be positive");
  const bool use_bnb = go.bnb || (!go.exact && go.N > cfg.exhaustive_cap);
  const auto g = try_hstar(m, cfg);
  GroundStateResult r;
  if (use_bnb) {
    if (!g) throw PreconditionError("ground: branch and bound needs a unique h*");
    BnbConfig bc;
    bc.exhaustive_cap = cfg.bnb_validation_cap;
    bc.c_override = go.c_override;
    bc.require_certified = go.require_certified;
    bc.node_limit = go.node_limit;
    bc.threads = cfg.threads;
    std::ofstream log;
    if (!go.log_path.empty()) {
      log.open(go.log_path);
      if (!log) throw ValidationError("cannot write " + go.log_path);
      bc.log = &log;
    }
    r = ground_state_bnb(go.N, m, *g, bc);
  } else {
    r = ground_state_exact(go.N, m, solver_config(cfg));
  }
  Output o;
  json mins = json::array();
  for (const auto& b : r.minimizers) mins.push_back(b.to_string());
  o.result = {{"N", go.N},
              {"method", to_string(r.method)},
              {"state", r.state.blocks.to_string()},
              {"energy", r.energy},
              {"certified", r.certified},
              {"nodes_explored", r.nodes_explored},
              {"minimizers", mins},
              {"unique", r.minimizers.size() == 1},
              {"second_energy", r.second_energy ? json(*r.second_energy) : json()},
              {"h_star", g ? json(g->h_star) : json()},
              {"F", g ? json(r.energy - go.N * g->e_star) : json()}};
  return o;
}

Output cmd_gap(const RunConfig& cfg) {
  const auto m = model(cfg);
  const auto g = unique_hstar(m, cfg);
  const auto gap = energy_gap(m, g, k_list(cfg, "2,3,4"), solver_config(cfg));
  Output o;
  o.columns = {"N", "gap"};
  o.table_key = "table";
  for (std::size_t i = 0; i < gap.n_values.size(); ++i) o.rows.push_back({{"N", gap.n_values[i]}, {"gap", gap.gaps[i]}});
  o.result = {{"h_star", g.h_star},
              {"delta", gap.delta},
              {"delta_tilde", gap.delta_tilde},
              {"k0_estimate", gap.k0_estimate}};
  return o;
}

Output cmd_phi(const RunConfig& cfg, const std::string& j_text, const PhiOptions& po) {
  const auto m = model(cfg);
  const auto g = unique_hstar(m, cfg);
  const int mod = 2 * g.h_star;
  std::vector<int> js;
  if (j_text == "all") {
    for (int j = 0; j < mod; ++j) js.push_back(j);
  } else {
    js = parse_int_list(j_text, "j");
  }
  std::unique_ptr<PhiCache> cache;
  if (!cfg.cache_path.empty()) cache = std::make_unique<PhiCache>(cfg.cache_path);
  const auto pc = phi_config(cfg, po, cache.get());
  const auto Ks = k_list(cfg, "3..8");

  Output o;
  o.columns = {"j", "K", "N", "value", "minimizer", "defect", "d_max_used", "from_cache"};
  o.table_key = "table";
  json estimates = json::array();
  std::vector<PhiEstimate> all;
  for (int j : js) {
    all.push_back(phi_estimate(j, m, g, Ks, pc));
    estimates.push_back(phi_estimate_json(all.back()));
    for (const auto& v : all.back().values) o.rows.push_back(phi_value_row(j, v));
  }
  o.result = {{"h_star", g.h_star}, {"modulus", mod}, {"estimates", estimates}};
  if (j_text == "all") {
    const auto sub = check_subadditivity(all);
    json cases = json::array();
    for (const auto& c : sub.cases)
      cases.push_back({{"j", c.j},
                       {"k", c.k},
                       {"sum", c.sum},
                       {"lhs", c.lhs},
                       {"rhs", c.rhs},
                       {"tolerance", c.tolerance},
                       {"margin", c.margin},
                       {"holds", c.holds}});
    o.result["subadditivity"] = {{"cases", cases}, {"passed", sub.passed}};
  }
  return o;
}

Output cmd_gamma(const RunConfig& cfg, const std::string& r_text, int j, const PhiOptions& po) {
  const auto m = model(cfg);
  const auto g = unique_hstar(m, cfg);
  const auto r = PhaseFunction::parse(r_text, 2 * g.h_star);
  if (j < 0 || j >= 2 * g.h_star) throw ValidationError("gamma: j must lie in [0, 2h*)");
  std::unique_ptr<PhiCache> cache;
  if (!cfg.cache_path.empty()) cache = std::make_unique<PhiCache>(cfg.cache_path);
  const auto table = phi_table(m, g, k_list(cfg, "16,32,64,128"), phi_config(cfg, po, cache.get()));
  const auto v = gamma_energy(r, j, table);
  json jumps = json::array();
  for (const auto& jump : r.jumps())
    jumps.push_back({{"x", jump.x}, {"size", jump.size}, {"phi", table[jump.size].extrapolated}});
  Output o;
  o.result = {{"h_star", g.h_star},
              {"modulus", 2 * g.h_star},
              {"r", r.to_string()},
              {"j", j},
              {"winding", r.winding()},
              {"finite", v.finite},
              {"value", gamma_json(v)},
              {"error_bound", v.error_bound},
              {"jumps", jumps}};
  return o;
}

Output cmd_recover(const RunConfig& cfg, const std::string& r_text, int j, int N, const PhiOptions& po) {
  const auto m = model(cfg);
  const auto g = unique_hstar(m, cfg);
  const auto r = PhaseFunction::parse(r_text, 2 * g.h_star);
  std::unique_ptr<PhiCache> cache;
  if (!cfg.cache_path.empty()) cache = std::make_unique<PhiCache>(cfg.cache_path);
  const auto table = phi_table(m, g, k_list(cfg, "16,32,64,128"), phi_config(cfg, po, cache.get()));
  const auto s = recovery_sequence(r, j, N, m, g, table);
  const auto v = gamma_energy(r, j, table);
  const double F = renormalized(to_blocks(s).blocks, m, g);
  Output o;
  o.result = {{"N", N},
              {"state", s.to_string()},
              {"blocks", to_blocks(s).blocks.to_string()},
              {"phase_function", phase_function(decompose_defects(s, g.h_star)).to_string()},
              {"F", F},
              {"gamma", gamma_json(v)},
              {"deviation", std::fabs(F - v.value)}};
  return o;
}

struct VerifyOptions {
  std::string lemma;
  int h = 0;  // 0: h* if resolvable, else 1
  std::string M;
  std::string defects = "+2,-2;+2,-2";
  std::string defect = "+1";
  std::string pairs;
  std::string states;
  int random_states = 100;
  unsigned seed = 1;
  int N_max = 12;
  std::string other_N;
  bool iterated = false;
};

std::vector<SpinState> random_states(int count, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_int_distribution<int> size(1, 10), bit(0, 1);
  std::vector<SpinState> out;
  for (int i = 0; i < count; ++i) {
    std::vector<int> spins(size(rng));
    for (auto& x : spins) x = bit(rng) ? +1 : -1;
    out.emplace_back(spins);
  }
  return out;
}

Output cmd_verify(const RunConfig& cfg, const VerifyOptions& vo, bool& passed) {
  const auto m = model(cfg);
  const auto id = parse_lemma_id(vo.lemma);
  int h = vo.h;
  if (h == 0) {
    const auto g = try_hstar(m, cfg);
    h = g ? g->h_star : 1;
  }
  if (h < 1) throw ValidationError("verify: h must be positive");
  std::vector<Fragment> defects;
  for (const auto& t : split(vo.defects, ';')) defects.push_back(Fragment::parse(t));

  LemmaReport rep;
  switch (id) {
    case LemmaId::scaling: {
      std::vector<SpinState> states;
      if (vo.states.empty()) {
        states = random_states(vo.random_states, vo.seed);
      } else {
        for (const auto& t : split(vo.states, ';')) states.push_back(SpinState::parse(t));
      }
      rep = verify_scaling(states, parse_int_list(vo.M.empty() ? "2,3,5" : vo.M, "M"), m, cfg.threads);
      break;
    }
    case LemmaId::decoupling: {
      const auto Ms = parse_int_list(vo.M.empty() ? "8,16,32,64" : vo.M, "M");
      rep = vo.iterated ? verify_decoupling_iterated(h, defects, Ms, m, cfg.threads)
                        : verify_decoupling(h, defects, Ms, m, cfg.threads);
      break;
    }
    case LemmaId::localization: {
      std::vector<std::pair<int, int>> pairs;
      if (vo.pairs.empty()) {
        for (int M : parse_int_list(vo.M.empty() ? "8,16,32" : vo.M, "M")) pairs.emplace_back(M, 2 * M);
      } else {
        for (const auto& t : split(vo.pairs, ',')) {
          const auto colon = t.find(':');
          if (colon == std::string::npos) throw ParseError("pairs: expected M:M'", t);
          pairs.emplace_back(parse_int_list(t.substr(0, colon), "M").at(0),
                             parse_int_list(t.substr(colon + 1), "M'").at(0));
        }
      }
      rep = verify_localization(Fragment::parse(vo.defect), pairs, h, m, cfg.threads);
      break;
    }
    case LemmaId::lower_bound:
      rep = verify_lower_bound(vo.N_max, m, solver_config(cfg));
      break;
    case LemmaId::gap: {
      const auto g = unique_hstar(m, cfg);
      std::vector<int> other;
      if (!vo.other_N.empty()) other = parse_int_list(vo.other_N, "other-N");
      rep = verify_gap(m, g, k_list(cfg, "2,3,4"), other, solver_config(cfg));
      break;
    }
  }
  passed = rep.passed;
  Output o;
  o.result = rep.to_json();
  return o;
}

// ------------------------------------------------------------------ driver

int report(std::ostream& err, int code, const std::string& kind, const std::string& what) {
  err << "error (" << kind << "): " << what << "\n";
  return code;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Ground states, anti-phase energies and limit functionals of long-range Ising chains"};
  app.name("antiphase");
  app.set_help_flag("--help", "print this help and exit");
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", kVersion);

  std::optional<double> p, J, rel_tol, abs_tol, tail_tol;
  std::optional<int> h_max, exhaustive_cap, bnb_cap, d_max, threads;
  std::optional<std::string> K, cache_path, format;
  std::string config_path;
  app.add_option("--config", config_path, "JSON config file (flags override it)");
  app.add_option("--p", p, "interaction exponent, > 1");
  app.add_option("--J", J, "ferromagnetic coupling, > 0");
  app.add_option("--rel-tol", rel_tol, "quadrature relative tolerance");
  app.add_option("--abs-tol", abs_tol, "quadrature absolute tolerance");
  app.add_option("--tail-tol", tail_tol, "series tail tolerance");
  app.add_option("--h-max", h_max, "largest stripe width scanned");
  app.add_option("--exhaustive-cap", exhaustive_cap, "largest N searched exhaustively");
  app.add_option("--bnb-cap", bnb_cap, "largest N used to validate the branch-and-bound bound");
  app.add_option("--d-max", d_max, "single-defect length cap (0: 4h*+j)");
  app.add_option("--K", K, "K values: 3..8 or 16,32,64");
  app.add_option("--cache", cache_path, "phi cache file");
  app.add_option("--format", format, "json, csv or human");
  app.add_option("--threads", threads, "worker threads (0: all)");

  std::string state, blocks;
  auto* energy = app.add_subcommand("energy", "energy of one state");
  auto* o_state = energy->add_option("--state", state, "spin string such as ++--+--+");
  auto* o_blocks = energy->add_option("--blocks", blocks, "signed run lengths such as +3,-2,+1,-2");
  o_state->excludes(o_blocks);
  energy->require_option(1);

  auto* hstar = app.add_subcommand("hstar", "optimal stripe width h*");
  std::string csv_path;
  auto* ecurve = app.add_subcommand("ecurve", "e(h) for h = 1..h_max");
  ecurve->add_option("--csv", csv_path, "also write the table here");
  auto* jp = app.add_subcommand("jp", "threshold coupling J_p against zeta(p-1)");

  GroundOptions go;
  auto* ground = app.add_subcommand("ground", "ground state on N sites");
  ground->add_option("--N", go.N, "number of sites")->required();
  auto* o_exact = ground->add_flag("--exact", go.exact, "exhaustive search");
  ground->add_flag("--bnb", go.bnb, "branch and bound")->excludes(o_exact);
  ground->add_flag("--require-certified", go.require_certified, "refuse an uncertified bound");
  ground->add_option("--c-override", go.c_override, "lower-bound constant (never certified)");
  ground->add_option("--node-limit", go.node_limit, "branch-and-bound node budget");
  ground->add_option("--log", go.log_path, "branch-and-bound log (JSON lines)");

  auto* gap = app.add_subcommand("gap", "energy gap above the stripe at N = 2h*K");

  std::string j_text = "1";
  PhiOptions po;
  auto* phi = app.add_subcommand("phi", "anti-phase energy phi(j)");
  phi->add_option("--j", j_text, "residue, list, or all");
  phi->add_option("--mode", po.mode, "single_defect, exhaustive or bnb");
  phi->add_flag("--no-escalate", po.no_escalate, "do not widen d_max on a mismatch");
  phi->add_option("--node-limit", po.node_limit, "branch-and-bound node budget");
  phi->add_option("--csv", csv_path, "also write the table here");

  std::string r_text;
  int j = 0, N = 0;
  auto* gamma = app.add_subcommand("gamma", "limit functional of a phase function");
  gamma->add_option("--r", r_text, "phase function such as 0:0.5;1:1.0")->required();
  gamma->add_option("--j", j, "residue of N modulo 2h*")->required();
  gamma->add_option("--mode", po.mode, "phi search mode");

  auto* recover = app.add_subcommand("recover", "recovery state for a phase function");
  recover->add_option("--r", r_text, "phase function")->required();
  recover->add_option("--j", j, "residue of N modulo 2h*")->required();
  recover->add_option("--N", N, "number of sites")->required();
  recover->add_option("--mode", po.mode, "phi search mode");

  VerifyOptions vo;
  auto* verify = app.add_subcommand("verify", "numerical check of one structural estimate");
  verify->set_help_flag("--help", "print this help and exit");
  verify->add_option("lemma", vo.lemma, "scaling, lower_bound, gap, decoupling or localization")->required();
  verify->add_option("--h", vo.h, "stripe width of the periodic parts (default h*)");
  verify->add_option("--M", vo.M, "block counts or repetition factors");
  verify->add_option("--defects", vo.defects, "decoupling defects, ';'-separated fragments");
  verify->add_flag("--iterated", vo.iterated, "decouple all defects at once");
  verify->add_option("--defect", vo.defect, "localization defect");
  verify->add_option("--pairs", vo.pairs, "localization pairs M:M',...");
  verify->add_option("--states", vo.states, "scaling states, ';'-separated");
  verify->add_option("--random", vo.random_states, "number of random scaling states");
  verify->add_option("--seed", vo.seed, "seed for the random scaling states");
  verify->add_option("--N-max", vo.N_max, "lower_bound: largest N");
  verify->add_option("--other-N", vo.other_N, "gap: sizes checked against delta_tilde");

  std::vector<std::string> argv(args.rbegin(), args.rend());
  try {
    app.parse(argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return kOk;
    }
    return report(err, kParse, "parse", e.what());
  }

  bool passed = true;
  try {
    RunConfig cfg;
    if (!config_path.empty()) {
      std::ifstream f(config_path);
      if (!f) throw ParseError("config: cannot read file", config_path);
      json doc;
      try {
        doc = json::parse(f);
      } catch (const json::parse_error& e) {
        throw ParseError(std::string("config: ") + e.what(), config_path);
      }
      cfg.merge(doc);
    }
    if (p) cfg.p = *p;
    if (J) cfg.J = *J;
    if (rel_tol) cfg.rel_tol = *rel_tol;
    if (abs_tol) cfg.abs_tol = *abs_tol;
    if (tail_tol) cfg.tail_tol = *tail_tol;
    if (h_max) cfg.h_max = *h_max;
    if (exhaustive_cap) cfg.exhaustive_cap = *exhaustive_cap;
    if (bnb_cap) cfg.bnb_validation_cap = *bnb_cap;
    if (d_max) cfg.d_max = *d_max;
    if (threads) cfg.threads = *threads;
    if (K) cfg.K = *K;
    if (cache_path) cfg.cache_path = *cache_path;
    if (format) cfg.format = *format;
    cfg.validate();

    std::string name;
    Output o;
    if (energy->parsed()) {
      name = "energy";
      o = cmd_energy(cfg, state, blocks);
    } else if (hstar->parsed()) {
      name = "hstar";
      o = cmd_hstar(cfg);
    } else if (ecurve->parsed()) {
      name = "ecurve";
      o = cmd_ecurve(cfg);
    } else if (jp->parsed()) {
      name = "jp";
      o = cmd_jp(cfg);
    } else if (ground->parsed()) {
      name = "ground";
      o = cmd_ground(cfg, go);
    } else if (gap->parsed()) {
      name = "gap";
      o = cmd_gap(cfg);
    } else if (phi->parsed()) {
      name = "phi";
      o = cmd_phi(cfg, j_text, po);
    } else if (gamma->parsed()) {
      name = "gamma";
      o = cmd_gamma(cfg, r_text, j, po);
    } else if (recover->parsed()) {
      name = "recover";
      o = cmd_recover(cfg, r_text, j, N, po);
    } else {
      name = "verify";
      o = cmd_verify(cfg, vo, passed);
    }
    if (!csv_path.empty()) write_csv_file(csv_path, o);
    render(name, cfg, std::move(o), out);
  } catch (const ParseError& e) {
    return report(err, kParse, "parse", std::string(e.what()) + ": '" + e.token() + "'");
  } catch (const ValidationError& e) {
    return report(err, kParse, "invalid input", e.what());
  } catch (const CapError& e) {
    return report(err, kCap, "cap", std::string(e.what()) + " (cap " + std::to_string(e.cap()) + ")");
  } catch (const DomainError& e) {
    return report(err, kDomain, "domain", e.what());
  } catch (const PreconditionError& e) {
    return report(err, kDomain, "precondition", e.what());
  } catch (const InconclusiveError& e) {
    return report(err, kDomain, "inconclusive", e.what());
  } catch (const AccuracyError& e) {
    return report(err, kAccuracy, "accuracy", e.what());
  } catch (const std::exception& e) {
    return report(err, kAccuracy, "internal", e.what());
  }
  if (!passed) {
    err << "verification failed: see the report\n";
    return kAccuracy;
  }
  return kOk;
}

}  // namespace antiphase::cli
