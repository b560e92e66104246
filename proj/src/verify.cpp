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

#include "antiphase/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "antiphase/errors.hpp"
#include "antiphase/parallel.hpp"

namespace antiphase {

namespace {

constexpr double kTolerance = 1e-9;
// One state in this many is re-priced with energy_direct.
constexpr std::size_t kSpotEvery = 20;

double energy_of(const SpinState& s, const ModelParams& m) { return energy_blocks(to_blocks(s).blocks, m).total; }

struct SpotCheck {
  double max_diff = 0.0;
  int count = 0;
};

void spot(SpotCheck& sc, std::size_t index, const SpinState& s, double energy, const ModelParams& m) {
  if (index % kSpotEvery) return;
  sc.max_diff = std::max(sc.max_diff, std::fabs(energy_direct(s, m).total - energy));
  ++sc.count;
}

void record_spots(LemmaReport& rep, const std::vector<SpotCheck>& spots) {
  SpotCheck all;
  for (const auto& s : spots) {
    all.max_diff = std::max(all.max_diff, s.max_diff);
    all.count += s.count;
  }
  rep.details["direct_spot_checks"] = all.count;
  rep.details["direct_spot_max_diff"] = all.max_diff;
  if (all.max_diff > 1e-8) rep.passed = false;
}

// Defect lengths; each defect must have an even block count so that all
// periodic parts start with the same sign.
std::vector<int> fragment_blocks(const std::vector<Fragment>& defects) {
  std::vector<int> out;
  for (const auto& d : defects) {
    if (d.n_blocks() % 2)
      throw ValidationError("decoupling: defect " + d.to_string() +
                            " has an odd block count; periodic parts would not all start with the same sign");
    out.push_back(d.n_sites());
  }
  return out;
}

// Fits the slope on every point but the first; nullopt if some residual
// is at the noise floor.
std::optional<double> rate_without_first(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() < 3) return std::nullopt;
  for (double v : y)
    if (!(v > kTolerance)) return std::nullopt;
  return loglog_slope({x.begin() + 1, x.end()}, {y.begin() + 1, y.end()});
}

}  // namespace

std::string to_string(LemmaId id) {
  switch (id) {
    case LemmaId::scaling:
      return "scaling";
    case LemmaId::lower_bound:
      return "lower_bound";
    case LemmaId::gap:
      return "gap";
    case LemmaId::decoupling:
      return "decoupling";
    case LemmaId::localization:
      return "localization";
  }
  return "?";
}

LemmaId parse_lemma_id(std::string_view text) {
  for (auto id : {LemmaId::scaling, LemmaId::lower_bound, LemmaId::gap, LemmaId::decoupling, LemmaId::localization})
    if (text == to_string(id)) return id;
  throw ParseError("lemma: expected scaling, lower_bound, gap, decoupling or localization", std::string(text));
}

void LemmaReport::settle() {
  passed = true;
  for (const auto& c : cases) passed = passed && c.residual <= c.bound + tolerance_used;
}

nlohmann::json LemmaReport::to_json() const {
  nlohmann::json out;
  out["lemma_id"] = to_string(lemma_id);
  out["cases"] = nlohmann::json::array();
  for (const auto& c : cases)
    out["cases"].push_back(
        {{"parameters", c.parameters}, {"lhs", c.lhs}, {"rhs", c.rhs}, {"residual", c.residual}, {"bound", c.bound}});
  out["fitted_rate"] = fitted_rate ? nlohmann::json(*fitted_rate) : nlohmann::json(nullptr);
  out["passed"] = passed;
  out["tolerance_used"] = tolerance_used;
  out["details"] = details;
  return out;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw ValidationError("loglog_slope: need two or more points");
  double mx = 0.0, my = 0.0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw DomainError("loglog_slope: values must be positive");
    mx += std::log(x[i]) / n;
    my += std::log(y[i]) / n;
  }
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(y[i]) - my);
  }
  return sxy / sxx;
}

// ---------------------------------------------------------------- scaling

LemmaReport verify_scaling(const std::vector<SpinState>& states, const std::vector<int>& M_list, const ModelParams& m,
                           int threads) {
  m.validate();
  for (int M : M_list)
    if (M < 1) throw ValidationError("verify_scaling: M must be positive");
  LemmaReport rep;
  rep.lemma_id = LemmaId::scaling;
  rep.tolerance_used = kTolerance;
  const std::size_t n = states.size() * M_list.size();
  rep.cases.resize(n);
  std::vector<SpotCheck> spots(n);
  parallel_for(n, threads, [&](std::size_t k) {
    const auto& s = states[k / M_list.size()];
    const int M = M_list[k % M_list.size()];
    std::vector<int> spins;
    for (int r = 0; r < M; ++r) spins.insert(spins.end(), s.spins().begin(), s.spins().end());
    const SpinState big(spins);
    const double e_big = energy_of(big, m);
    const double e_small = energy_of(s, m);
    spot(spots[k], k, big, e_big, m);
    auto& c = rep.cases[k];
    c.parameters = {{"state", s.to_string()}, {"M", M}};
    c.lhs = e_big;
    c.rhs = M * e_small;
    c.residual = std::fabs(c.lhs - c.rhs);
    c.bound = 0.0;
  });
  rep.settle();
  record_spots(rep, spots);
  return rep;
}

// ------------------------------------------------------------- decoupling

DecouplingGeometry decoupling_geometry(int h, const std::vector<int>& defect_lengths,
                                       const std::vector<int>& run_blocks) {
  if (h < 1) throw ValidationError("decoupling: h must be positive");
  const std::size_t S = defect_lengths.size();
  if (S < 2 || run_blocks.size() != S)
    throw ValidationError("decoupling: need S >= 2 defects and as many periodic parts");
  for (int d : defect_lengths)
    if (d < 0) throw ValidationError("decoupling: defect lengths must be nonnegative");
  for (int M : run_blocks)
    if (M < 2 || M % 2) throw ValidationError("decoupling: each periodic part needs an even, positive block count");

  const auto fl = [h](int x) { return x / (2 * h); };
  DecouplingGeometry g;
  g.h = h;
  g.defect_lengths = defect_lengths;
  g.run_blocks = run_blocks;
  g.M = std::accumulate(run_blocks.begin(), run_blocks.end(), 0);
  g.D = std::accumulate(defect_lengths.begin(), defect_lengths.end(), 0);
  g.N = g.M * h + g.D;
  const int DS = defect_lengths.back();
  g.M_prime_prev = run_blocks[S - 2] + run_blocks[S - 1] + 2 * fl(DS);
  g.N_prime = (g.M + 2 * fl(DS)) * h + g.D - DS;
  g.M_prime_S = g.M + 2 * fl(g.D - DS);
  g.N_S = g.M_prime_S * h + DS;
  g.M_second_S = g.M + 2 * fl(DS) + 2 * fl(g.D - DS);

  for (std::size_t i = 0; i < S; ++i) {
    int after = 0, before = 0, from_i = 0;
    for (std::size_t j = i + 1; j < S; ++j) after += fl(defect_lengths[j]);
    for (std::size_t j = 0; j < i; ++j) before += defect_lengths[j];
    for (std::size_t j = i; j < S; ++j) from_i += fl(defect_lengths[j]);
    g.N_i.push_back(g.M * h + 2 * h * after + defect_lengths[i] + 2 * h * fl(before));
    g.M_second_i.push_back(g.M + 2 * from_i + 2 * fl(before));
  }
  return g;
}

SpinState defect_state(int h, const std::vector<Fragment>& defects, const std::vector<int>& run_blocks) {
  if (defects.size() != run_blocks.size()) throw ValidationError("defect_state: one periodic part per defect");
  std::vector<int> spins;
  int next = +1;
  auto put = [&](int len) {
    spins.insert(spins.end(), len, next);
    next = -next;
  };
  for (std::size_t i = 0; i < defects.size(); ++i) {
    for (int len : defects[i].lengths) put(len);
    if (run_blocks[i] < 0) throw ValidationError("defect_state: negative block count");
    for (int k = 0; k < run_blocks[i]; ++k) put(h);
  }
  if (spins.empty()) throw ValidationError("defect_state: empty state");
  return SpinState(spins);
}

LemmaReport verify_decoupling(int h, const std::vector<Fragment>& defects, const std::vector<int>& M_grid,
                              const ModelParams& m, int threads) {
  m.validate();
  if (M_grid.empty()) throw ValidationError("verify_decoupling: empty M grid");
  const std::size_t S = defects.size();
  const auto lens = fragment_blocks(defects);
  const double eh = energy_per_site(h, m);

  LemmaReport rep;
  rep.lemma_id = LemmaId::decoupling;
  rep.tolerance_used = kTolerance;
  rep.cases.resize(M_grid.size());
  std::vector<SpotCheck> spots(M_grid.size());
  parallel_for(M_grid.size(), threads, [&](std::size_t k) {
    const int M = M_grid[k];
    const auto geo = decoupling_geometry(h, lens, std::vector<int>(S, M));
    const auto sigma = defect_state(h, defects, geo.run_blocks);

    std::vector<Fragment> head(defects.begin(), defects.end() - 1);
    std::vector<int> head_runs(geo.run_blocks.begin(), geo.run_blocks.end() - 2);
    head_runs.push_back(geo.M_prime_prev);
    const auto sigma_prime = defect_state(h, head, head_runs);
    const auto delta_S = defect_state(h, {defects.back()}, {geo.M_prime_S});
    if (sigma.n_sites() != geo.N || sigma_prime.n_sites() != geo.N_prime || delta_S.n_sites() != geo.N_S)
      throw ValidationError("verify_decoupling: inconsistent site counts");

    const double e_sigma = energy_of(sigma, m);
    spot(spots[k], k, sigma, e_sigma, m);
    auto& c = rep.cases[k];
    c.parameters = {{"M", M}, {"N", geo.N}, {"N_prime", geo.N_prime}, {"N_S", geo.N_S}, {"M_second_S", geo.M_second_S}};
    c.lhs = e_sigma - energy_of(sigma_prime, m);
    c.rhs = energy_of(delta_S, m) - geo.M_second_S * h * eh;
    c.residual = std::fabs(c.lhs - c.rhs);
  });

  const double p = m.p;
  const double c_fit = rep.cases.front().residual * std::pow(M_grid.front(), p - 1.0);
  std::vector<double> xs, ys;
  for (std::size_t k = 0; k < M_grid.size(); ++k) {
    rep.cases[k].bound = c_fit * std::pow(M_grid[k], 1.0 - p);
    xs.push_back(M_grid[k]);
    ys.push_back(rep.cases[k].residual);
  }
  rep.fitted_rate = rate_without_first(xs, ys);
  rep.details["C_fit"] = c_fit;
  rep.details["h"] = h;
  rep.details["defects"] = nlohmann::json::array();
  for (const auto& d : defects) rep.details["defects"].push_back(d.to_string());
  rep.details["form"] = "single_step";
  rep.settle();
  record_spots(rep, spots);
  return rep;
}

LemmaReport verify_decoupling_iterated(int h, const std::vector<Fragment>& defects, const std::vector<int>& M_grid,
                                       const ModelParams& m, int threads) {
  m.validate();
  if (M_grid.empty()) throw ValidationError("verify_decoupling: empty M grid");
  const std::size_t S = defects.size();
  const auto lens = fragment_blocks(defects);
  const double eh = energy_per_site(h, m);

  LemmaReport rep;
  rep.lemma_id = LemmaId::decoupling;
  rep.tolerance_used = kTolerance;
  rep.cases.resize(M_grid.size());
  std::vector<SpotCheck> spots(M_grid.size());
  std::vector<double> form_gap(M_grid.size(), 0.0);
  std::vector<int> bookkeeping_ok(M_grid.size(), 1);
  parallel_for(M_grid.size(), threads, [&](std::size_t k) {
    const int M = M_grid[k];
    const auto geo = decoupling_geometry(h, lens, std::vector<int>(S, M));
    const auto sigma = defect_state(h, defects, geo.run_blocks);
    const double e_sigma = energy_of(sigma, m);
    spot(spots[k], k, sigma, e_sigma, m);

    double sum_f = 0.0, sum_e = 0.0;
    int sites = geo.N_i[0];
    for (std::size_t i = 0; i < S; ++i) {
      const int runs = (geo.N_i[i] - lens[i]) / h;
      const double e_i = energy_of(defect_state(h, {defects[i]}, {runs}), m);
      sum_f += e_i - geo.N_i[i] * eh;
      sum_e += e_i;
      if (i > 0) {
        sum_e -= geo.M_second_i[i] * h * eh;
        sites += geo.N_i[i] - geo.M_second_i[i] * h;
      }
    }
    bookkeeping_ok[k] = sites == geo.N;
    auto& c = rep.cases[k];
    c.parameters = {{"M", M}, {"N", geo.N}, {"N_i", geo.N_i}, {"M_second_i", geo.M_second_i}};
    c.lhs = e_sigma - geo.N * eh;
    c.rhs = sum_f;
    c.residual = std::fabs(c.lhs - c.rhs);
    form_gap[k] = std::fabs(std::fabs(e_sigma - sum_e) - c.residual);
  });

  const double p = m.p;
  const double c_fit = rep.cases.front().residual * std::pow(M_grid.front(), p - 1.0);
  std::vector<double> xs, ys;
  for (std::size_t k = 0; k < M_grid.size(); ++k) {
    rep.cases[k].bound = c_fit * std::pow(M_grid[k], 1.0 - p);
    xs.push_back(M_grid[k]);
    ys.push_back(rep.cases[k].residual);
  }
  rep.fitted_rate = rate_without_first(xs, ys);
  rep.details["C_fit"] = c_fit;
  rep.details["h"] = h;
  rep.details["form"] = "iterated";
  rep.details["defects"] = nlohmann::json::array();
  for (const auto& d : defects) rep.details["defects"].push_back(d.to_string());
  const double worst_gap = *std::max_element(form_gap.begin(), form_gap.end());
  const bool sites_ok = std::all_of(bookkeeping_ok.begin(), bookkeeping_ok.end(), [](int x) { return x; });
  rep.details["energy_form_max_diff"] = worst_gap;
  rep.details["site_bookkeeping_exact"] = sites_ok;
  rep.settle();
  if (worst_gap > 1e-8 || !sites_ok) rep.passed = false;
  record_spots(rep, spots);
  return rep;
}

// ----------------------------------------------------------- localization

LemmaReport verify_localization(const Fragment& defect, const std::vector<std::pair<int, int>>& M_pairs, int h,
                                const ModelParams& m, int threads) {
  m.validate();
  if (M_pairs.empty()) throw ValidationError("verify_localization: no (M, M') pairs");
  for (auto [M, Mp] : M_pairs)
    if (M < 2 || M % 2 || Mp % 2 || Mp <= M)
      throw ValidationError("verify_localization: M and M' must be even with 2 <= M < M'");
  const double eh = energy_per_site(h, m);

  LemmaReport rep;
  rep.lemma_id = LemmaId::localization;
  rep.tolerance_used = kTolerance;
  rep.cases.resize(M_pairs.size());
  std::vector<SpotCheck> spots(M_pairs.size());
  parallel_for(M_pairs.size(), threads, [&](std::size_t k) {
    const auto [M, Mp] = M_pairs[k];
    const auto small = defect_state(h, {defect}, {M});
    const auto large = defect_state(h, {defect}, {Mp});
    const double e_small = energy_of(small, m);
    spot(spots[k], k, small, e_small, m);
    auto& c = rep.cases[k];
    c.parameters = {{"M", M}, {"M_prime", Mp}, {"N", small.n_sites()}, {"N_prime", large.n_sites()}};
    c.lhs = e_small - small.n_sites() * eh;
    c.rhs = energy_of(large, m) - large.n_sites() * eh;
    c.residual = std::fabs(c.lhs - c.rhs);
  });

  const double p = m.p;
  const auto [M0, Mp0] = M_pairs.front();
  const double c_fit = rep.cases.front().residual / (std::pow(M0, -p) * Mp0);
  std::vector<double> xs, ys;
  for (std::size_t k = 0; k < M_pairs.size(); ++k) {
    const auto [M, Mp] = M_pairs[k];
    rep.cases[k].bound = c_fit * std::pow(M, -p) * Mp;
    xs.push_back(M);
    ys.push_back(rep.cases[k].residual);
  }
  rep.fitted_rate = rate_without_first(xs, ys);
  rep.details["C_fit"] = c_fit;
  rep.details["h"] = h;
  rep.details["defect"] = defect.to_string();
  rep.settle();
  record_spots(rep, spots);
  return rep;
}

// ------------------------------------------------------------ lower bound

LemmaReport verify_lower_bound(int N_max, const ModelParams& m, const SolverConfig& cfg) {
  m.validate();
  if (N_max < 1) throw ValidationError("verify_lower_bound: N_max must be positive");
  if (N_max > cfg.exhaustive_cap)
    throw CapError("verify_lower_bound: N_max exceeds the exhaustive cap", cfg.exhaustive_cap);
  std::vector<double> e(N_max + 1, 0.0);
  for (int h = 1; h <= N_max; ++h) e[h] = energy_per_site(h, m);

  LemmaReport rep;
  rep.lemma_id = LemmaId::lower_bound;
  rep.tolerance_used = kTolerance;
  rep.cases.resize(N_max);
  std::vector<double> c_N(N_max, 0.0);
  std::vector<std::string> worst(N_max);
  parallel_for(N_max, cfg.threads, [&](std::size_t k) {
    const int N = static_cast<int>(k) + 1;
    const double scale = std::pow(static_cast<double>(N), m.p);
    double best = -std::numeric_limits<double>::infinity();
    enumerate_canonical(
        N,
        [&](const BlockArray& b) {
          double local = 0.0;
          for (int h : b.lengths) local += h * e[h];
          const double c = (local - energy_fast(b, m).total) * scale;
          if (c > best) {
            best = c;
            worst[k] = b.to_string();
          }
        },
        cfg.exhaustive_cap);
    c_N[k] = best;
  });
  const double c_fit = std::max(0.0, *std::max_element(c_N.begin(), c_N.end()));
  for (int k = 0; k < N_max; ++k) {
    auto& c = rep.cases[k];
    c.parameters = {{"N", k + 1}, {"extremal_class", worst[k]}};
    c.lhs = c_N[k];
    c.rhs = c_fit;
    c.residual = c_N[k];
    c.bound = c_fit;
  }
  rep.details["c_fit"] = c_fit;
  rep.details["N_max"] = N_max;
  rep.settle();
  return rep;
}

// -------------------------------------------------------------------- gap

LemmaReport verify_gap(const ModelParams& m, const StripeGroundState& g, const std::vector<int>& K_list,
                       std::vector<int> other_N, const SolverConfig& cfg) {
  const auto gap = energy_gap(m, g, K_list, cfg);
  const int mod = 2 * g.h_star;
  if (other_N.empty())
    for (int K : K_list)
      for (int r = 1; r < mod; ++r)
        if (mod * K + r <= cfg.exhaustive_cap) other_N.push_back(mod * K + r);
  std::sort(other_N.begin(), other_N.end());
  other_N.erase(std::unique(other_N.begin(), other_N.end()), other_N.end());

  LemmaReport rep;
  rep.lemma_id = LemmaId::gap;
  rep.tolerance_used = kTolerance;
  const auto F = [&](const ClassEnergy& c, int N) { return c.energy - N * g.e_star; };
  const auto stripe = [&](const BlockArray& b) {
    return b.lengths.size() >= 2 &&
           std::all_of(b.lengths.begin(), b.lengths.end(), [&](int x) { return x == g.h_star; });
  };
  for (int K : K_list) {
    const int N = mod * K;
    const auto low = lowest_classes(N, m, 2, cfg);
    double f_stripe = 0.0, f_other = std::numeric_limits<double>::infinity();
    bool seen_stripe = false;
    for (const auto& c : low) {
      if (stripe(c.blocks)) {
        seen_stripe = true;
        f_stripe = F(c, N);
      } else {
        f_other = std::min(f_other, F(c, N));
      }
    }
    LemmaCase zero;
    zero.parameters = {{"N", N}, {"class", "stripe"}};
    zero.lhs = f_stripe;
    zero.rhs = 0.0;
    zero.residual = seen_stripe ? std::fabs(f_stripe) : std::numeric_limits<double>::max();
    rep.cases.push_back(zero);
    if (std::isfinite(f_other)) {
      LemmaCase c;
      c.parameters = {{"N", N}, {"class", "non_stripe"}};
      c.lhs = f_other;
      c.rhs = gap.delta_tilde;
      c.residual = std::max(0.0, c.rhs - c.lhs);
      rep.cases.push_back(c);
    }
  }
  for (int N : other_N) {
    const auto low = lowest_classes(N, m, 1, cfg);
    LemmaCase c;
    c.parameters = {{"N", N}, {"class", "all"}, {"minimizer", low.front().blocks.to_string()}};
    c.lhs = F(low.front(), N);
    c.rhs = gap.delta_tilde;
    c.residual = std::max(0.0, c.rhs - c.lhs);
    rep.cases.push_back(c);
  }
  rep.details["delta"] = gap.delta;
  rep.details["delta_tilde"] = gap.delta_tilde;
  rep.details["k0_estimate"] = gap.k0_estimate;
  rep.details["n_values"] = gap.n_values;
  rep.details["gaps"] = gap.gaps;
  rep.settle();
  return rep;
}

}  // namespace antiphase
