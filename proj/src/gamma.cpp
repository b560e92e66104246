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

#include "antiphase/gamma.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <optional>

#include "antiphase/errors.hpp"

namespace antiphase {

namespace {

int pmod(long a, long n) { return static_cast<int>(((a % n) + n) % n); }

// One estimate per residue, indexed by residue.
std::vector<const PhiEstimate*> index_table(const std::vector<PhiEstimate>& table, int modulus) {
  std::vector<const PhiEstimate*> out(modulus, nullptr);
  for (const auto& e : table) {
    if (e.modulus != modulus)
      throw PreconditionError("gamma: phi table has modulus " + std::to_string(e.modulus) +
                              ", phase function has " + std::to_string(modulus));
    if (e.j < 0 || e.j >= modulus) throw PreconditionError("gamma: phi table residue out of range");
    out[e.j] = &e;
  }
  for (int r = 0; r < modulus; ++r)
    if (!out[r]) throw PreconditionError("gamma: phi table has no entry for residue " + std::to_string(r));
  return out;
}

Fragment defect_for(int a, const PhiEstimate& est, const ModelParams& m, const StripeGroundState& g) {
  const int mod = 2 * g.h_star;
  if (!est.values.empty()) {
    const auto& last = est.values.back();
    if (last.defect.n_sites() > 0 && last.defect.n_sites() % mod == a) return last.defect;
    PhiConfig cfg;
    cfg.escalate = false;
    return phi_at_K(a, last.K, m, g, cfg).defect;
  }
  PhiConfig cfg;
  cfg.escalate = false;
  return phi_at_K(a, 8, m, g, cfg).defect;
}

// Start sites b_k of the defects, or nothing if some stripe run would be
// shorter than two periods.
std::optional<std::vector<long>> layout(const std::vector<PhaseFunction::Jump>& jumps, const std::vector<int>& lens,
                                        int first_value, int N, int h) {
  const int period = 2 * h;
  const std::size_t S = jumps.size();
  std::vector<long> b(S);
  long target = std::lround(jumps[0].x * N - lens[0] / 2.0);
  long shift = pmod(first_value - target, period);
  if (shift > h) shift -= period;
  b[0] = target + shift;
  for (std::size_t k = 1; k < S; ++k) {
    const long t = b[k - 1] + lens[k - 1];
    const double want = jumps[k].x * N - lens[k] / 2.0;
    const long periods = std::max<long>(2, std::lround((want - t) / period));
    b[k] = t + periods * period;
  }
  const long wrap = b[0] + N - (b[S - 1] + lens[S - 1]);
  if (wrap < 2 * period) return std::nullopt;
  return b;
}

}  // namespace

std::string GammaValue::to_string() const {
  if (!finite) return "inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

GammaValue gamma_energy(const PhaseFunction& r, int j, const std::vector<PhiEstimate>& phi_table) {
  const int mod = r.modulus();
  if (j < 0 || j >= mod) throw ValidationError("gamma: residue j must lie in [0, " + std::to_string(mod) + ")");
  const auto phi = index_table(phi_table, mod);
  if (r.winding() != j) return GammaValue::infinity();
  GammaValue out;
  for (const auto& jump : r.jumps()) {
    out.value += phi[jump.size]->extrapolated;
    out.error_bound += phi[jump.size]->error_bound;
  }
  return out;
}

SpinState recovery_sequence(const PhaseFunction& r, int j, int N, const ModelParams& m, const StripeGroundState& g,
                            const std::vector<PhiEstimate>& phi_table) {
  g.require_unique();
  const int h = g.h_star;
  const int mod = 2 * h;
  if (r.modulus() != mod)
    throw ValidationError("recovery: phase function modulus must be 2h* = " + std::to_string(mod));
  if (!gamma_energy(r, j, phi_table).finite)
    throw DomainError("recovery: the jumps of r do not add up to j modulo 2h*; the limit functional is infinite");
  if (N < 1 || pmod(N, mod) != j) throw DomainError("recovery: N must be positive and congruent to j modulo 2h*");

  const int first_value = r.pieces().front().value;
  const auto jumps = r.jumps();
  if (jumps.empty()) {
    std::vector<int> spins(N);
    for (int i = 0; i < N; ++i) spins[i] = pmod(i - first_value, mod) < h ? +1 : -1;
    return SpinState(spins);
  }

  const auto phi = index_table(phi_table, mod);
  std::vector<Fragment> defects;
  std::vector<int> lens;
  for (const auto& jump : jumps) {
    defects.push_back(defect_for(jump.size, *phi[jump.size], m, g));
    lens.push_back(defects.back().n_sites());
  }

  auto b = layout(jumps, lens, first_value, N, h);
  if (!b) {
    int n_min = N;
    for (int step = 0; step < 1000000 && !layout(jumps, lens, first_value, n_min, h); ++step) n_min += mod;
    throw DomainError("recovery: N=" + std::to_string(N) + " is too small to separate the jumps; use N >= " +
                      std::to_string(n_min));
  }

  std::vector<int> spins(N, 0);
  long pos = (*b)[0];
  auto put = [&](int len, int sign) {
    for (int i = 0; i < len; ++i) spins[pmod(pos++, N)] = sign;
  };
  const std::size_t S = jumps.size();
  for (std::size_t k = 0; k < S; ++k) {
    int sign = +1;
    for (int len : defects[k].lengths) {
      put(len, sign);
      sign = -sign;
    }
    const long run_end = k + 1 < S ? (*b)[k + 1] : (*b)[0] + N;
    const long blocks = (run_end - pos) / h;
    for (long q = 0; q < blocks; ++q) put(h, q % 2 ? -1 : +1);
  }
  return SpinState(spins);
}

bool check_convergence(const std::vector<std::pair<int, SpinState>>& states, const PhaseFunction& r, double eps,
                       int h_star) {
  if (r.modulus() != 2 * h_star) throw ValidationError("check_convergence: modulus must be 2h*");
  if (!(eps > 0.0)) throw DomainError("check_convergence: eps must be positive");
  const auto jumps = r.jumps();
  double gap = 1.0;
  for (std::size_t k = 0; k < jumps.size(); ++k) {
    const double next = k + 1 < jumps.size() ? jumps[k + 1].x : jumps[0].x + 1.0;
    if (jumps.size() > 1) gap = std::min(gap, next - jumps[k].x);
  }
  if (eps >= 0.5 * gap)
    throw DomainError("check_convergence: eps must be below half the smallest gap between jumps");
  if (states.empty()) throw ValidationError("check_convergence: no states");
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (states[i].first != states[i].second.n_sites()) throw ValidationError("check_convergence: N does not match");
    if (i && states[i].first <= states[i - 1].first)
      throw ValidationError("check_convergence: N must increase strictly");
  }

  for (std::size_t i = states.size() / 2; i < states.size(); ++i) {
    const int N = states[i].first;
    const auto rN = phase_function(decompose_defects(states[i].second, h_star));
    for (int site = 0; site < N; ++site) {
      const double x = (site + 0.5) / N;
      bool near = false;
      for (const auto& jump : jumps) {
        const double d = std::fabs(x - jump.x);
        near = near || std::min(d, 1.0 - d) < eps;
      }
      if (!near && rN.value_at(x) != r.value_at(x)) return false;
    }
  }
  return true;
}

}  // namespace antiphase
