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

#include "antiphase/energy.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <tuple>

#include "antiphase/errors.hpp"

namespace antiphase {

namespace {

constexpr double kKernelTol = 1e-13;
// Runs at least this long go through the run closed forms.
constexpr int kRunThreshold = 8;

std::int64_t pmod(std::int64_t a, std::int64_t n) {
  const std::int64_t r = a % n;
  return r < 0 ? r + n : r;
}

using PairKey = std::tuple<double, std::int64_t, std::int64_t, std::int64_t, std::int64_t, double, double>;

std::mutex g_pair_mutex;
std::map<PairKey, IntegralResult> g_pair_cache;

template <class F>
IntegralResult memo(const PairKey& key, F&& compute) {
  {
    std::lock_guard<std::mutex> lock(g_pair_mutex);
    auto it = g_pair_cache.find(key);
    if (it != g_pair_cache.end()) return it->second;
  }
  const IntegralResult r = compute();
  std::lock_guard<std::mutex> lock(g_pair_mutex);
  g_pair_cache.emplace(key, r);
  return r;
}

IntegralResult pair_integral(std::int64_t h_mu, std::int64_t h_nu, std::int64_t d, std::int64_t N,
                             const ModelParams& m) {
  const std::int64_t d2 = N - h_mu - h_nu - d;
  if (h_mu < 1 || h_nu < 1 || d < 0 || d2 < 0)
    throw DomainError("block_pair_af: blocks do not fit on the torus (h_mu=" + std::to_string(h_mu) +
                      ", h_nu=" + std::to_string(h_nu) + ", d=" + std::to_string(d) + ", N=" + std::to_string(N) +
                      ")");
  const PairKey key{m.p, N, std::min(h_mu, h_nu), std::max(h_mu, h_nu), std::min(d, d2), m.quad.abs_tol,
                    m.quad.rel_tol};
  return memo(key, [&] {
    KernelIntegrand k(m.p, ExpPolynomial::one_minus(h_mu), N);
    k.factors.push_back(ExpPolynomial::one_minus(h_nu));
    k.factors.push_back(ExpPolynomial{{+1, d}, {+1, d2}});
    return kernel_integral(k, m.quad);
  });
}

IntegralResult self_integral(std::int64_t h, std::int64_t N, const ModelParams& m) {
  if (h < 1 || h > N) throw DomainError("block_self_af: need 1 <= h <= N");
  const PairKey key{m.p, N, h, -1, -1, m.quad.abs_tol, m.quad.rel_tol};
  return memo(key, [&] {
    KernelIntegrand k(m.p, ExpPolynomial::one_minus(h), N);
    k.factors.push_back(ExpPolynomial::one_minus(h));
    k.factors.push_back(ExpPolynomial::monomial(1, N - h));
    IntegralResult r = kernel_integral(k, m.quad);
    r.value += in_block_sum(h, m.p);
    r.error_bound += 1e-15 * static_cast<double>(h) * std::fabs(r.value);
    return r;
  });
}

// A stretch of consecutive blocks of one length: a single block or a run.
struct Segment {
  std::int64_t start;
  std::int64_t h;
  std::int64_t count;
  int first_sign;
  std::int64_t length() const { return h * count; }
  int last_sign() const { return count % 2 ? first_sign : -first_sign; }
};

// 1 - (-e^{-alpha h})^M
ExpPolynomial alternating_numerator(std::int64_t h, std::int64_t M) {
  return ExpPolynomial(std::vector<ExpPolynomial::Term>{{1, 0}, {M % 2 ? 1 : -1, M * h}});
}

// Signed pair energy of two disjoint segments; `gap` is the number of sites
// from the end of a to the start of b.
IntegralResult segment_pair(const Segment& a, const Segment& b, std::int64_t gap, std::int64_t N,
                            const ModelParams& m) {
  const std::int64_t gap2 = N - a.length() - b.length() - gap;
  if (gap < 0 || gap2 < 0) throw DomainError("run_pair_af: runs overlap on the torus");
  if (a.count == 1 && b.count == 1) {
    IntegralResult r = pair_integral(a.h, b.h, gap, N, m);
    r.value *= a.first_sign * b.first_sign;
    return r;
  }
  const int s0 = a.last_sign() * b.first_sign;
  const int s1 = b.last_sign() * a.first_sign;
  KernelIntegrand k(m.p, ExpPolynomial::one_minus(a.h), N);
  k.factors.push_back(ExpPolynomial::one_minus(b.h));
  k.factors.push_back(ExpPolynomial(std::vector<ExpPolynomial::Term>{{s0, gap}, {s1, gap2}}));
  for (const Segment* s : {&a, &b}) {
    if (s->count > 1) {
      k.factors.push_back(alternating_numerator(s->h, s->count));
      k.alternating_shifts.push_back(s->h);
    }
  }
  return kernel_integral(k, m.quad);
}

IntegralResult run_self_integral(std::int64_t M, std::int64_t h, std::int64_t N, const ModelParams& m) {
  // sum_{c=1}^{M-1} (-1)^c x^{c-1} [(M-c) + (-1)^M c z], x = e^{-alpha h},
  // z = e^{-alpha (N - M h)}, summed in closed form over (1 + x)^2.
  const std::int64_t sg = M % 2 ? -1 : 1;
  std::vector<ExpPolynomial::Term> t = {
      {1 - M, 0}, {-M, h}, {-sg, M * h}, {-sg, N - M * h}, {-M, N - h}, {-(M - 1), N},
  };
  KernelIntegrand k(m.p, ExpPolynomial::one_minus(h), N);
  k.factors.push_back(ExpPolynomial::one_minus(h));
  k.factors.push_back(ExpPolynomial(std::move(t)));
  k.alternating_shifts = {h, h};
  return kernel_integral(k, m.quad);
}

double ferro_energy(std::int64_t N, std::int64_t M, double J) {
  return M >= 2 ? -J * static_cast<double>(N) + 2.0 * J * static_cast<double>(M) : -J * static_cast<double>(N);
}

}  // namespace

void ModelParams::validate() const {
  if (!(p > 1.0)) throw ValidationError("ModelParams: p must be > 1");
  if (!(J > 0.0)) throw ValidationError("ModelParams: J must be > 0");
  if (!(tail_tol > 0.0)) throw ValidationError("ModelParams: tail_tol must be > 0");
  quad.validate();
}

double wrapped_kernel(std::int64_t N, std::int64_t d, double p, KernelPath path) {
  if (N < 1) throw DomainError("wrapped_kernel: N must be positive");
  if (d < 0 || d >= N) throw DomainError("wrapped_kernel: need 0 <= d < N");
  if (!(p > 1.0)) throw DomainError("wrapped_kernel: requires p > 1");
  const double Nd = static_cast<double>(N);
  if (path == KernelPath::truncated) {
    // |n| <= n_max, then the remaining images by the midpoint rule.
    const std::int64_t n_max = 200000;
    long double s = 0.0L;
    for (std::int64_t n = n_max; n >= 1; --n) {
      s += std::pow(static_cast<long double>(d + n * N), -static_cast<long double>(p));
      s += std::pow(static_cast<long double>(n * N - d), -static_cast<long double>(p));
    }
    if (d > 0) s += std::pow(static_cast<long double>(d), -static_cast<long double>(p));
    const double a = static_cast<double>(n_max) * Nd + 0.5 * Nd;
    const double tail = (std::pow(a + d, 1.0 - p) + std::pow(a - d, 1.0 - p)) / (Nd * (p - 1.0));
    return static_cast<double>(s) + tail;
  }
  const double scale = std::pow(Nd, -p);
  if (d == 0) return 2.0 * scale * riemann_zeta(p);
  const double x = static_cast<double>(d) / Nd;
  return scale * (hurwitz_zeta(p, x, kKernelTol) + hurwitz_zeta(p, 1.0 - x, kKernelTol));
}

EnergyBreakdown energy_direct(const SpinState& s, const ModelParams& m) {
  m.validate();
  const std::int64_t n = s.n_sites();
  std::vector<double> k(n);
  for (std::int64_t d = 0; d < n; ++d) k[d] = wrapped_kernel(n, d, m.p);
  EnergyBreakdown out;
  double ferro = 0.0;
  for (std::int64_t i = 0; i < n; ++i) ferro += s[i] * s.at(i + 1);
  out.ferro = -m.J * ferro;
  // Row by row: sum_j sigma_j K((j - i) mod N), site i's own term being the
  // self-image constant.
  double af = 0.0;
  for (std::int64_t i = 0; i < n; ++i) {
    double row = 0.0;
    for (std::int64_t j = 0; j < n; ++j) row += s[j] * k[pmod(j - i, n)];
    af += s[i] * row;
  }
  out.antiferro = af;
  out.total = out.ferro + out.antiferro;
  double kmax = 0.0;
  for (double v : k) kmax = std::max(kmax, v);
  out.error_bound = static_cast<double>(n * n) * (kKernelTol + 1e-16 * kmax);
  return out;
}

double in_block_sum(std::int64_t h, double p) {
  long double s = 0.0L;
  for (std::int64_t k = h - 1; k >= 1; --k)
    s += static_cast<long double>(h - k) * std::pow(static_cast<long double>(k), -static_cast<long double>(p));
  return static_cast<double>(s);
}

double block_pair_af(std::int64_t h_mu, std::int64_t h_nu, std::int64_t d, std::int64_t N, const ModelParams& m) {
  m.validate();
  return pair_integral(h_mu, h_nu, d, N, m).value;
}

double block_self_af(std::int64_t h, std::int64_t N, const ModelParams& m) {
  m.validate();
  return self_integral(h, N, m).value;
}

double run_pair_af(const Run& run_i, const Run& run_j, std::int64_t h, std::int64_t N, const ModelParams& m) {
  m.validate();
  if (h < 1 || run_i.n_blocks < 1 || run_j.n_blocks < 1)
    throw DomainError("run_pair_af: runs need at least one block of positive length");
  if (std::abs(run_i.first_sign) != 1 || std::abs(run_j.first_sign) != 1)
    throw ValidationError("run_pair_af: first_sign must be +1 or -1");
  const Segment a{pmod(run_i.origin, N), h, run_i.n_blocks, run_i.first_sign};
  const Segment b{pmod(run_j.origin, N), h, run_j.n_blocks, run_j.first_sign};
  if (a.length() + b.length() > N) throw DomainError("run_pair_af: runs overlap on the torus");
  const std::int64_t gap = pmod(b.start - (a.start + a.length()), N);
  return segment_pair(a, b, gap, N, m).value;
}

double run_self_af(std::int64_t M, std::int64_t h, std::int64_t N, const ModelParams& m) {
  m.validate();
  if (M < 2) throw DomainError("run_self_af: need at least two blocks");
  if (h < 1 || M * h > N) throw DomainError("run_self_af: run does not fit on the torus");
  return run_self_integral(M, h, N, m).value;
}

EnergyBreakdown energy_blocks(const BlockArray& c, const ModelParams& m) {
  m.validate();
  const BlockArray b(c.first_sign, c.lengths);
  const std::int64_t N = b.n_sites();
  const std::int64_t M = b.n_blocks();

  std::vector<Segment> segs;
  {
    std::int64_t start = 0;
    int sign = b.first_sign;
    std::size_t i = 0;
    while (i < b.lengths.size()) {
      std::size_t j = i;
      while (j < b.lengths.size() && b.lengths[j] == b.lengths[i]) ++j;
      const std::int64_t h = b.lengths[i];
      const std::int64_t len = static_cast<std::int64_t>(j - i);
      if (len >= kRunThreshold) {
        segs.push_back(Segment{start, h, len, sign});
      } else {
        for (std::int64_t q = 0; q < len; ++q) {
          segs.push_back(Segment{start + q * h, h, 1, q % 2 ? -sign : sign});
        }
      }
      start += h * len;
      if (len % 2) sign = -sign;
      i = j;
    }
  }

  long double half = 0.0L;
  double err = 0.0;
  for (const auto& s : segs) {
    const IntegralResult self = self_integral(s.h, N, m);
    half += static_cast<long double>(s.count) * self.value;
    err += static_cast<double>(s.count) * self.error_bound;
    if (s.count > 1) {
      const IntegralResult r = run_self_integral(s.count, s.h, N, m);
      half += r.value;
      err += r.error_bound;
    }
  }
  for (std::size_t i = 0; i < segs.size(); ++i) {
    for (std::size_t j = i + 1; j < segs.size(); ++j) {
      const std::int64_t gap = segs[j].start - (segs[i].start + segs[i].length());
      const IntegralResult r = segment_pair(segs[i], segs[j], gap, N, m);
      half += r.value;
      err += r.error_bound;
    }
  }
  EnergyBreakdown out;
  out.ferro = ferro_energy(N, M, m.J);
  out.antiferro = 2.0 * static_cast<double>(half);
  out.total = out.ferro + out.antiferro;
  out.error_bound = 2.0 * err + 1e-15 * std::fabs(out.antiferro);
  return out;
}

EnergyBreakdown energy_fast(const BlockArray& c, const ModelParams& m) {
  m.validate();
  const BlockArray b(c.first_sign, c.lengths);
  const std::int64_t N = b.n_sites();
  const auto table = KernelTable::get(m.p, N);
  EnergyBreakdown out;
  out.ferro = ferro_energy(N, b.n_blocks(), m.J);
  out.antiferro = table->antiferro(b.first_sign, b.lengths);
  out.total = out.ferro + out.antiferro;
  out.error_bound = static_cast<double>(N) * static_cast<double>(N) * table->block_error();
  return out;
}

double energy_per_site(std::int64_t h, const ModelParams& m) {
  if (h < 1) throw DomainError("energy_per_site: h must be positive");
  const int hi = static_cast<int>(h);
  return energy_blocks(BlockArray(1, {hi, hi}), m).total / static_cast<double>(2 * h);
}

std::string to_string(Uniqueness u) {
  switch (u) {
    case Uniqueness::unique:
      return "unique";
    case Uniqueness::tie_with_next:
      return "tie_with_next";
    case Uniqueness::decreasing_regime:
      return "decreasing_regime";
  }
  return "unknown";
}

void StripeGroundState::require_unique() const {
  if (uniqueness != Uniqueness::unique)
    throw PreconditionError("stripe ground state is not a unique finite minimizer (" + to_string(uniqueness) +
                            "); defect energies are undefined");
}

StripeGroundState find_hstar(const ModelParams& m, int h_max) {
  m.validate();
  if (h_max < 2) throw ValidationError("find_hstar: h_max must be >= 2");
  StripeGroundState g;
  g.e_curve.reserve(h_max);
  for (int h = 1; h <= h_max; ++h) g.e_curve.push_back(energy_per_site(h, m));
  const auto it = std::min_element(g.e_curve.begin(), g.e_curve.end());
  g.h_star = static_cast<int>(it - g.e_curve.begin()) + 1;
  g.e_star = *it;
  if (m.p > 2.0 && m.J > 2.0 * jp_threshold(m.p, m.quad)) {
    g.uniqueness = Uniqueness::decreasing_regime;
    return g;
  }
  if (g.h_star == h_max)
    throw InconclusiveError("find_hstar: minimum of e(h) at the scan boundary h_max=" + std::to_string(h_max) +
                            "; increase h_max");
  const double tol = 1e-9 * std::max(1.0, std::fabs(g.e_star));
  for (int h = 1; h <= h_max; ++h) {
    if (h != g.h_star && std::fabs(g.e_curve[h - 1] - g.e_star) <= tol) {
      g.uniqueness = Uniqueness::tie_with_next;
      break;
    }
  }
  return g;
}

double renormalized(const BlockArray& c, const ModelParams& m, const StripeGroundState& g) {
  g.require_unique();
  return energy_blocks(c, m).total - static_cast<double>(c.n_sites()) * g.e_star;
}

double renormalized_fast(const BlockArray& c, const ModelParams& m, const StripeGroundState& g) {
  g.require_unique();
  return energy_fast(c, m).total - static_cast<double>(c.n_sites()) * g.e_star;
}

// ------------------------------------------------------------ KernelTable

KernelTable::KernelTable(double p, std::int64_t N) : p_(p), n_(N) {
  if (!(p > 1.0)) throw DomainError("KernelTable: requires p > 1");
  if (N < 1) throw DomainError("KernelTable: N must be positive");
  k_.resize(N);
  long double total = 0.0L;
  double kmax = 0.0;
  for (std::int64_t d = 0; d < N; ++d) {
    k_[d] = wrapped_kernel(N, d, p);
    total += k_[d];
    kmax = std::max(kmax, k_[d]);
  }
  mean_ = static_cast<double>(total / N);
  // p1[t] = sum_{u < t} (K - mean); periodic because the mean is removed.
  p2_.assign(3 * N + 1, 0.0L);
  long double p1 = 0.0L;
  long double p1max = 0.0L;
  for (std::int64_t t = 0; t < 3 * N; ++t) {
    p2_[t + 1] = p2_[t] + p1;
    p1 += static_cast<long double>(k_[t % N]) - mean_;
    p1max = std::max(p1max, std::fabs(p1));
  }
  block_err_ = kKernelTol + 1e-16 * kmax + 1e-18 * static_cast<double>(p1max) * 3.0;
}

std::shared_ptr<const KernelTable> KernelTable::get(double p, std::int64_t N) {
  static std::mutex mu;
  static std::map<std::pair<double, std::int64_t>, std::shared_ptr<const KernelTable>> cache;
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find({p, N});
    if (it != cache.end()) return it->second;
  }
  auto t = std::make_shared<const KernelTable>(p, N);
  std::lock_guard<std::mutex> lock(mu);
  return cache.emplace(std::make_pair(p, N), t).first->second;
}

double KernelTable::block_sum(std::int64_t delta, std::int64_t h_mu, std::int64_t h_nu) const {
  const std::int64_t base = pmod(delta - h_mu + 1, n_);
  const long double v = p2_[base + h_mu + h_nu] - p2_[base + h_nu] - p2_[base + h_mu] + p2_[base];
  return static_cast<double>(v + static_cast<long double>(h_mu) * h_nu * mean_);
}

double KernelTable::antiferro(int first_sign, const std::vector<int>& lengths) const {
  const std::size_t m = lengths.size();
  std::vector<std::int64_t> start(m);
  std::int64_t pos = 0;
  for (std::size_t i = 0; i < m; ++i) {
    start[i] = pos;
    pos += lengths[i];
  }
  if (pos != n_) throw ValidationError("KernelTable::antiferro: block lengths do not add up to N");
  long double diag = 0.0L;
  long double off = 0.0L;
  for (std::size_t i = 0; i < m; ++i) {
    diag += block_sum(0, lengths[i], lengths[i]);
    for (std::size_t j = i + 1; j < m; ++j) {
      const double v = block_sum(start[j] - start[i], lengths[i], lengths[j]);
      off += (j - i) % 2 ? -v : v;
    }
  }
  (void)first_sign;  // the energy is even in the global sign
  return static_cast<double>(diag + 2.0L * off);
}

}  // namespace antiphase
