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

#include "antiphase/phi.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <limits>

#include "antiphase/errors.hpp"
#include "antiphase/parallel.hpp"
#include "json.hpp"

namespace antiphase {

namespace {

std::string shortest(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

bool is_pure_stripe(const BlockArray& b, int h) {
  if (b.lengths.size() < 2) return false;
  return std::all_of(b.lengths.begin(), b.lengths.end(), [h](int x) { return x == h; });
}

double ferro_part(int N, int n_blocks, double J) { return n_blocks >= 2 ? -J * N + 2.0 * J * n_blocks : -J * N; }

int default_d_max(int j, int h_star) { return 4 * h_star + j; }

// Best state of the form (D, P) with P made of h-blocks and D a fragment
// of even block count, length <= d_max and length = j mod 2h.
struct SingleDefectSearch {
  int N, h, modulus;
  const ModelParams& m;
  const KernelTable& table;

  double best_energy = std::numeric_limits<double>::infinity();
  std::vector<int> best_defect;
  bool found = false;

  // Scratch for one defect length L.
  int L = 0, M = 0;
  double background = 0.0;  // P-P part
  std::vector<int> d;
  std::vector<std::int64_t> start;
  std::vector<double> acc;

  // Interaction of a block (start s, length v, sign +1 at even index
  // `idx`) with all of P, summed with signs, counted once.
  double cross_with_background(std::int64_t s, int v, std::size_t idx) const {
    double sum = 0.0;
    for (int k = 0; k < M; ++k) {
      const double b = table.block_sum(L + static_cast<std::int64_t>(k) * h - s, v, h);
      // P block k has global index |D| + k with |D| even at leaves, so the
      // sign parity is just idx + k.
      sum += (idx + k) % 2 ? -b : b;
    }
    return sum;
  }

  void offer(double energy) {
    if (!found || energy < best_energy - tie_tolerance(best_energy)) {
      best_energy = energy;
      best_defect = d;
      found = true;
    }
  }

  void descend() {
    const int used = start.empty() ? 0 : static_cast<int>(start.back() + d.back());
    if (used == L) {
      if (d.size() % 2 == 0) {
        const int blocks = static_cast<int>(d.size()) + M;
        offer(ferro_part(N, blocks, m.J) + background + acc.back());
      }
      return;
    }
    for (int v = 1; v <= L - used; ++v) {
      const std::size_t idx = d.size();
      double delta = table.block_sum(0, v, v);
      double cross = 0.0;
      for (std::size_t i = 0; i < idx; ++i) {
        const double b = table.block_sum(used - start[i], d[i], v);
        cross += (idx - i) % 2 ? -b : b;
      }
      cross += cross_with_background(used, v, idx);
      delta += 2.0 * cross;
      d.push_back(v);
      start.push_back(used);
      acc.push_back(acc.back() + delta);
      descend();
      d.pop_back();
      start.pop_back();
      acc.pop_back();
    }
  }

  void run(int j, int d_max) {
    for (L = j; L <= std::min(d_max, N); L += modulus) {
      if ((N - L) % h) continue;
      M = (N - L) / h;
      if (L == 0) {
        d.clear();
        offer(ferro_part(N, M, m.J) + table.antiferro(1, std::vector<int>(M, h)));
        continue;
      }
      background = 0.0;
      for (int a = 0; a < M; ++a) {
        background += table.block_sum(0, h, h);
        for (int b = a + 1; b < M; ++b) {
          const double x = table.block_sum(static_cast<std::int64_t>(b - a) * h, h, h);
          background += 2.0 * ((b - a) % 2 ? -x : x);
        }
      }
      d.clear();
      start.clear();
      acc.assign(1, 0.0);
      descend();
    }
  }
};

std::optional<PhiValue> search_single_defect(int j, int K, int N, int d_max, const ModelParams& m,
                                             const StripeGroundState& g) {
  const auto table = KernelTable::get(m.p, N);
  SingleDefectSearch s{N, g.h_star, 2 * g.h_star, m, *table, {}, {}, false, 0, 0, 0.0, {}, {}, {}};
  s.run(j, d_max);
  if (!s.found) return std::nullopt;
  PhiValue out;
  out.K = K;
  out.n_sites = N;
  out.d_max_used = d_max;
  out.defect.first_sign = +1;
  out.defect.lengths = s.best_defect;
  std::vector<int> lengths = s.best_defect;
  const int M = (N - out.defect.n_sites()) / g.h_star;
  lengths.insert(lengths.end(), M, g.h_star);
  const BlockArray full(1, lengths);
  out.minimizer = to_blocks(full.to_state()).blocks;
  out.value = is_pure_stripe(full, g.h_star) ? 0.0 : s.best_energy - N * g.e_star;
  return out;
}

double exhaustive_value(int N, const ModelParams& m, const StripeGroundState& g, const PhiConfig& cfg,
                        BlockArray* minimizer) {
  SolverConfig sc;
  sc.exhaustive_cap = cfg.exhaustive_cap;
  sc.threads = cfg.threads;
  const auto r = ground_state_exact(N, m, sc);
  if (minimizer) *minimizer = r.state.blocks;
  return is_pure_stripe(r.state.blocks, g.h_star) ? 0.0 : r.energy - N * g.e_star;
}

double value_error(int N, const ModelParams& m) {
  // Pairwise block sums plus N copies of the quadrature error in e(h*).
  return static_cast<double>(N) * N * KernelTable::get(m.p, N)->block_error() + N * m.tail_tol;
}

}  // namespace

std::string to_string(PhiMode m) {
  switch (m) {
    case PhiMode::exhaustive:
      return "exhaustive";
    case PhiMode::single_defect:
      return "single_defect";
    case PhiMode::bnb:
      return "bnb";
  }
  return "?";
}

PhiMode parse_phi_mode(std::string_view text) {
  if (text == "exhaustive") return PhiMode::exhaustive;
  if (text == "single_defect") return PhiMode::single_defect;
  if (text == "bnb") return PhiMode::bnb;
  throw ParseError("phi mode: expected exhaustive, single_defect or bnb", std::string(text));
}

// ------------------------------------------------------------------ cache

PhiCache::PhiCache(std::string path) : path_(std::move(path)) {
  if (path_.empty() || !std::filesystem::exists(path_)) return;
  std::ifstream in(path_);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("phi cache: ") + e.what(), path_);
  }
  if (!doc.is_object()) throw ParseError("phi cache: expected a JSON object", path_);
  for (const auto& [key, rec] : doc.items()) {
    PhiCacheEntry e;
    e.value = rec.at("value").get<double>();
    e.error_bound = rec.at("error_bound").get<double>();
    e.minimizer = rec.value("minimizer", "");
    e.defect = rec.value("defect", "");
    e.d_max_used = rec.value("d_max_used", 0);
    entries_[key] = e;
    stamps_[key] = rec.value("timestamp", "");
  }
}

std::string PhiCache::key(const ModelParams& m, int h_star, int j, int K, PhiMode mode, int d_max) {
  return "p=" + shortest(m.p) + "|J=" + shortest(m.J) + "|h=" + std::to_string(h_star) + "|j=" + std::to_string(j) +
         "|K=" + std::to_string(K) + "|mode=" + to_string(mode) + "|dmax=" + std::to_string(d_max);
}

std::optional<PhiCacheEntry> PhiCache::get(const std::string& key) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void PhiCache::put(const std::string& key, const PhiCacheEntry& entry) {
  std::lock_guard<std::mutex> lock(mu_);
  entries_[key] = entry;
  stamps_[key] = utc_now();
  flush_locked();
}

std::size_t PhiCache::size() const {
  std::lock_guard<std::mutex> lock(mu_);
  return entries_.size();
}

void PhiCache::flush_locked() const {
  if (path_.empty()) return;
  nlohmann::json doc = nlohmann::json::object();
  for (const auto& [key, e] : entries_) {
    doc[key] = {{"value", e.value},
                {"error_bound", e.error_bound},
                {"timestamp", stamps_.at(key)},
                {"version", kVersion},
                {"minimizer", e.minimizer},
                {"defect", e.defect},
                {"d_max_used", e.d_max_used}};
  }
  const std::string tmp = path_ + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw std::runtime_error("phi cache: cannot write " + tmp);
    out << doc.dump(2) << '\n';
  }
  std::filesystem::rename(tmp, path_);
}

// -------------------------------------------------------------- phi_at_K

PhiValue phi_at_K(int j, int K, const ModelParams& m, const StripeGroundState& g, const PhiConfig& cfg) {
  m.validate();
  g.require_unique();
  const int modulus = 2 * g.h_star;
  if (j < 0 || j >= modulus)
    throw ValidationError("phi: residue j must lie in [0, " + std::to_string(modulus) + ")");
  if (K < 0) throw ValidationError("phi: K must be nonnegative");
  const int N = modulus * K + j;
  if (N < 1) throw DomainError("phi: N = 2Kh* + j must be positive");

  int d_max = 0;
  if (cfg.mode == PhiMode::single_defect) {
    if (K == 0) throw DomainError("phi: single-defect search needs K >= 1 (no room for a periodic background)");
    d_max = cfg.d_max > 0 ? cfg.d_max : default_d_max(j, g.h_star);
    if (d_max < j)
      throw DomainError("phi: d_max=" + std::to_string(d_max) + " is below j=" + std::to_string(j) +
                        "; no defect of the right winding fits");
  }

  const std::string key = PhiCache::key(m, g.h_star, j, K, cfg.mode, d_max);
  if (cfg.cache) {
    if (auto hit = cfg.cache->get(key)) {
      PhiValue v;
      v.K = K;
      v.n_sites = N;
      v.value = hit->value;
      if (!hit->minimizer.empty()) v.minimizer = BlockArray::parse(hit->minimizer);
      v.defect = Fragment::parse(hit->defect);
      v.d_max_used = hit->d_max_used;
      v.from_cache = true;
      return v;
    }
  }

  PhiValue v;
  switch (cfg.mode) {
    case PhiMode::exhaustive:
      if (N > cfg.exhaustive_cap)
        throw CapError("phi: exhaustive mode at N=" + std::to_string(N) + " exceeds the cap of " +
                           std::to_string(cfg.exhaustive_cap),
                       cfg.exhaustive_cap);
      v.K = K;
      v.n_sites = N;
      v.value = exhaustive_value(N, m, g, cfg, &v.minimizer);
      break;
    case PhiMode::bnb: {
      const auto r = ground_state_bnb(N, m, g, cfg.bnb);
      v.K = K;
      v.n_sites = N;
      v.minimizer = r.state.blocks;
      v.value = is_pure_stripe(r.state.blocks, g.h_star) ? 0.0 : r.energy - N * g.e_star;
      break;
    }
    case PhiMode::single_defect: {
      auto found = search_single_defect(j, K, N, d_max, m, g);
      if (cfg.escalate && N <= cfg.exhaustive_cap) {
        const double exact = exhaustive_value(N, m, g, cfg, nullptr);
        const double tol = 1e-9 * std::max(1.0, std::fabs(exact));
        int widened = d_max;
        while ((!found || found->value > exact + tol) && widened < N) {
          widened += modulus;
          found = search_single_defect(j, K, N, widened, m, g);
        }
        if (!found || found->value > exact + tol)
          throw AccuracyError("phi: single-defect minimum does not reach the exhaustive one",
                              found ? found->value : std::numeric_limits<double>::infinity(),
                              found ? found->value - exact : std::numeric_limits<double>::infinity());
      }
      if (!found)
        throw DomainError("phi: no defect of length <= " + std::to_string(d_max) + " with an even block count fits N=" +
                          std::to_string(N));
      v = *found;
      break;
    }
  }

  if (cfg.cache) {
    PhiCacheEntry e;
    e.value = v.value;
    e.error_bound = value_error(N, m);
    e.minimizer = v.minimizer.lengths.empty() ? "" : v.minimizer.to_string();
    e.defect = v.defect.to_string();
    e.d_max_used = v.d_max_used;
    cfg.cache->put(key, e);
  }
  return v;
}

// ----------------------------------------------------------- extrapolation

namespace {

struct PowerFit {
  double limit = 0.0;
  double amplitude = 0.0;
  double q = 0.0;
  double sse = 0.0;
  double max_residual = 0.0;
};

// Least squares of y ~ c + a x^{-q} at fixed q.
PowerFit fit_at(const std::vector<double>& x, const std::vector<double>& y, double q) {
  const std::size_t n = x.size();
  std::vector<double> t(n);
  double tm = 0.0, ym = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    t[i] = std::pow(x[i], -q);
    tm += t[i];
    ym += y[i];
  }
  tm /= n;
  ym /= n;
  double stt = 0.0, sty = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    stt += (t[i] - tm) * (t[i] - tm);
    sty += (t[i] - tm) * (y[i] - ym);
  }
  PowerFit f;
  f.q = q;
  f.amplitude = stt > 0 ? sty / stt : 0.0;
  f.limit = ym - f.amplitude * tm;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - f.limit - f.amplitude * t[i];
    f.sse += r * r;
    f.max_residual = std::max(f.max_residual, std::fabs(r));
  }
  return f;
}

PowerFit fit_power(const std::vector<double>& x, const std::vector<double>& y) {
  constexpr double q_lo = 0.05, q_hi = 8.0, step = 0.01;
  PowerFit best = fit_at(x, y, q_lo);
  for (double q = q_lo + step; q <= q_hi; q += step) {
    PowerFit f = fit_at(x, y, q);
    if (f.sse < best.sse) best = f;
  }
  // Golden-section polish around the grid minimum.
  double a = std::max(q_lo, best.q - step), b = std::min(q_hi, best.q + step);
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int it = 0; it < 60; ++it) {
    const double c = b - r * (b - a), d = a + r * (b - a);
    if (fit_at(x, y, c).sse < fit_at(x, y, d).sse)
      b = d;
    else
      a = c;
  }
  PowerFit polished = fit_at(x, y, 0.5 * (a + b));
  return polished.sse <= best.sse ? polished : best;
}

}  // namespace

PhiEstimate phi_estimate(int j, const ModelParams& m, const StripeGroundState& g, std::vector<int> K_range,
                         const PhiConfig& cfg) {
  std::sort(K_range.begin(), K_range.end());
  K_range.erase(std::unique(K_range.begin(), K_range.end()), K_range.end());
  if (K_range.size() < 3) throw ValidationError("phi_estimate: need at least three distinct K values");

  PhiEstimate est;
  est.j = j;
  est.modulus = 2 * g.h_star;
  est.search_mode = cfg.mode;
  est.values.resize(K_range.size());
  PhiConfig inner = cfg;
  inner.threads = 1;
  parallel_for(K_range.size(), cfg.threads,
               [&](std::size_t i) { est.values[i] = phi_at_K(j, K_range[i], m, g, inner); });

  std::vector<double> x, y;
  for (const auto& v : est.values) {
    x.push_back(v.K);
    y.push_back(v.value);
  }
  const double noise = 1e-10;
  for (std::size_t i = 2; i < y.size(); ++i) {
    const double d0 = y[i - 1] - y[i - 2], d1 = y[i] - y[i - 1];
    if (d0 * d1 < 0 && std::min(std::fabs(d0), std::fabs(d1)) > noise) est.flagged = true;
  }

  const double spread = *std::max_element(y.begin(), y.end()) - *std::min_element(y.begin(), y.end());
  if (j == 0 || spread <= 1e-12 * std::max(1.0, std::fabs(y.back()))) {
    est.extrapolated = y.back();
    est.error_bound = spread;
    return est;
  }
  const PowerFit f = fit_power(x, y);
  est.fit_exponent = f.q;
  est.fit_residual = f.max_residual;
  est.extrapolated = f.limit;
  est.error_bound = std::max(std::fabs(y.back() - f.limit), f.max_residual);
  if (est.extrapolated < 0.0) {
    est.error_bound = std::max(est.error_bound, -est.extrapolated);
    est.extrapolated = 0.0;
  }
  return est;
}

SubadditivityReport check_subadditivity(const std::vector<PhiEstimate>& table) {
  if (table.empty()) throw ValidationError("check_subadditivity: empty table");
  const int modulus = table.front().modulus;
  std::vector<const PhiEstimate*> by_residue(modulus, nullptr);
  for (const auto& e : table) {
    if (e.modulus != modulus) throw ValidationError("check_subadditivity: mixed moduli");
    if (e.j < 0 || e.j >= modulus || by_residue[e.j])
      throw ValidationError("check_subadditivity: residue " + std::to_string(e.j) + " missing or repeated");
    by_residue[e.j] = &e;
  }
  for (int r = 0; r < modulus; ++r)
    if (!by_residue[r]) throw ValidationError("check_subadditivity: residue " + std::to_string(r) + " missing");

  SubadditivityReport rep;
  for (int j = 0; j < modulus; ++j)
    for (int k = j; k < modulus; ++k) {
      SubadditivityCase c;
      c.j = j;
      c.k = k;
      c.sum = (j + k) % modulus;
      const auto& a = *by_residue[j];
      const auto& b = *by_residue[k];
      const auto& s = *by_residue[c.sum];
      c.lhs = s.extrapolated;
      c.rhs = a.extrapolated + b.extrapolated;
      c.tolerance = a.error_bound + b.error_bound + s.error_bound;
      c.margin = c.rhs + c.tolerance - c.lhs;
      c.holds = c.margin >= 0.0;
      rep.passed = rep.passed && c.holds;
      rep.cases.push_back(c);
    }
  return rep;
}

}  // namespace antiphase
