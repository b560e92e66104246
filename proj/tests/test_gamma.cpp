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

#include <cmath>
#include <functional>

#include "antiphase/errors.hpp"
#include "antiphase/gamma.hpp"
#include "doctest.h"

using namespace antiphase;

namespace {

ModelParams params(double p, double J) {
  ModelParams m;
  m.p = p;
  m.J = J;
  return m;
}

// Made-up phi values; only the bookkeeping is under test.
std::vector<PhiEstimate> fake_table(int modulus) {
  std::vector<PhiEstimate> t(modulus);
  for (int j = 0; j < modulus; ++j) {
    t[j].j = j;
    t[j].modulus = modulus;
    t[j].extrapolated = j == 0 ? 0.0 : 1.0 + 0.25 * j;
    t[j].error_bound = 1e-3 * j;
  }
  return t;
}

std::vector<PhiEstimate> real_table(const ModelParams& m, const StripeGroundState& g) {
  std::vector<PhiEstimate> t;
  for (int j = 0; j < 2 * g.h_star; ++j) t.push_back(phi_estimate(j, m, g, {16, 32, 64, 128, 256}));
  return t;
}

}  // namespace

TEST_CASE("limit functional on simple phase functions") {
  const auto table = fake_table(2);
  const auto flat = PhaseFunction::constant(2, 0);
  CHECK(gamma_energy(flat, 0, table).finite);
  CHECK(gamma_energy(flat, 0, table).value == 0.0);
  CHECK_FALSE(gamma_energy(flat, 1, table).finite);
  CHECK(gamma_energy(flat, 1, table).to_string() == "inf");

  const auto one = PhaseFunction::parse("0:0.5;1:1.0", 2);
  CHECK(gamma_energy(one, 1, table).value == 1.25);
  CHECK(gamma_energy(one, 1, table).to_string() == "1.25");
  CHECK_FALSE(gamma_energy(one, 0, table).finite);

  const auto t6 = fake_table(6);
  const auto pair = PhaseFunction::parse("0:0.25;2:0.75;0:1", 6);  // jumps 2 and 4
  const auto v = gamma_energy(pair, 0, t6);
  CHECK(v.finite);
  CHECK(v.value == doctest::Approx(t6[2].extrapolated + t6[4].extrapolated));
  CHECK(v.error_bound == doctest::Approx(t6[2].error_bound + t6[4].error_bound));

  CHECK_THROWS_AS(gamma_energy(pair, 0, table), PreconditionError);
  auto missing = t6;
  missing.erase(missing.begin() + 3);
  CHECK_THROWS_AS(gamma_energy(pair, 0, missing), PreconditionError);
  CHECK_THROWS_AS(gamma_energy(pair, 6, t6), ValidationError);
}

TEST_CASE("finite exactly when the jumps add up to j") {
  const std::vector<double> xs{0.2, 0.5, 0.8, 1.0};
  for (int h = 1; h <= 3; ++h) {
    const int mod = 2 * h;
    const auto table = fake_table(mod);
    for (int S = 0; S <= 3; ++S) {
      // Every value sequence r_0..r_S with distinct neighbours.
      std::vector<int> vals(S + 1);
      std::function<void(int)> rec = [&](int k) {
        if (k == S + 1) {
          std::vector<PhaseFunction::Piece> pieces;
          for (int i = 0; i <= S; ++i) pieces.push_back({vals[i], i == S ? 1.0 : xs[i + (3 - S) / 2]});
          const PhaseFunction r(mod, pieces);
          int total = 0;
          double expect = 0.0;
          for (int i = 1; i <= S; ++i) {
            const int a = ((vals[i] - vals[i - 1]) % mod + mod) % mod;
            total += a;
            expect += table[a].extrapolated;
          }
          for (int j = 0; j < mod; ++j) {
            const auto g = gamma_energy(r, j, table);
            CHECK(g.finite == (total % mod == j));
            if (g.finite) CHECK(g.value == doctest::Approx(expect));
          }
          return;
        }
        for (int v = 0; v < mod; ++v) {
          if (k > 0 && v == vals[k - 1]) continue;
          vals[k] = v;
          rec(k + 1);
        }
      };
      rec(0);
    }
  }
}

TEST_CASE("limit functional is translation invariant") {
  const auto table = fake_table(4);
  const auto r = PhaseFunction::parse("1:0.3;2:0.55;3:0.9;1:1", 4);
  const int j = r.winding();
  for (double t : {0.05, 0.2, 0.37, 0.61, 0.83}) {
    const auto a = gamma_energy(r, j, table);
    const auto b = gamma_energy(r.rotated(t), j, table);
    CHECK(b.finite);
    CHECK(a.value == doctest::Approx(b.value));
  }
}

TEST_CASE("recovery of a constant phase is the shifted stripe") {
  const auto m = params(3, 2);
  const auto g = find_hstar(m, 40);
  REQUIRE(g.h_star == 2);
  const auto table = fake_table(4);
  for (int v = 0; v < 4; ++v) {
    const auto r = PhaseFunction::constant(4, v);
    const auto s = recovery_sequence(r, 0, 24, m, g, table);
    CHECK(renormalized(to_blocks(s).blocks, m, g) == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(phase_function(decompose_defects(s, 2)) == r);
  }
  CHECK_THROWS_AS(recovery_sequence(PhaseFunction::constant(4, 0), 1, 25, m, g, table), DomainError);
  CHECK_THROWS_AS(recovery_sequence(PhaseFunction::constant(4, 0), 0, 26, m, g, table), DomainError);
}

TEST_CASE("recovery energies approach the limit functional") {
  const auto m = params(2, 0.05);
  const auto g = find_hstar(m, 40);
  const auto table = real_table(m, g);

  const auto single = PhaseFunction::parse("0:0.5;1:1", 2);
  const auto two = PhaseFunction::parse("0:0.3;1:0.7;0:1", 2);
  for (const auto& [r, j] : {std::pair{single, 1}, std::pair{two, 0}}) {
    const auto target = gamma_energy(r, j, table);
    REQUIRE(target.finite);
    double last = 1e300;
    std::vector<std::pair<int, SpinState>> seq;
    for (int K : {8, 16, 32, 64}) {
      const int N = 2 * K + j;
      const auto s = recovery_sequence(r, j, N, m, g, table);
      CHECK(s.n_sites() == N);
      const double dev = std::fabs(renormalized(to_blocks(s).blocks, m, g) - target.value);
      CHECK(dev < last);
      last = dev;
      seq.emplace_back(N, s);
    }
    CHECK(last < 0.02);
    CHECK(check_convergence(seq, r, 0.1, 1));
  }
}

TEST_CASE("recovery at h*=2 follows the phase function") {
  const auto m = params(3, 2);
  const auto g = find_hstar(m, 40);
  const auto table = real_table(m, g);
  for (const auto& [text, j] : {std::pair{"0:0.25;1:0.6;0:1", 0}, std::pair{"2:0.4;3:0.8;1:1", 3},
                                std::pair{"0:0.5;2:1", 2}}) {
    const auto r = PhaseFunction::parse(text, 4);
    std::vector<std::pair<int, SpinState>> seq;
    for (int K : {16, 32, 64}) {
      const int N = 4 * K + j;
      seq.emplace_back(N, recovery_sequence(r, j, N, m, g, table));
    }
    CHECK(check_convergence(seq, r, 0.05, 2));
  }
  const auto r = PhaseFunction::parse("0:0.25;1:0.3;0:1", 4);
  try {
    recovery_sequence(r, 0, 20, m, g, table);
    FAIL("expected a refusal");
  } catch (const DomainError& e) {
    CHECK(std::string(e.what()).find("N >=") != std::string::npos);
  }
}

TEST_CASE("convergence rejects drifting defects") {
  const auto m = params(2, 0.05);
  const auto g = find_hstar(m, 40);
  const auto table = real_table(m, g);
  const auto here = PhaseFunction::parse("0:0.5;1:1", 2);
  const auto there = PhaseFunction::parse("0:0.25;1:1", 2);
  std::vector<std::pair<int, SpinState>> seq;
  for (int K : {16, 32, 64, 128}) {
    const int N = 2 * K + 1;
    seq.emplace_back(N, recovery_sequence(K < 64 ? here : there, 1, N, m, g, table));
  }
  CHECK_FALSE(check_convergence(seq, here, 0.05, 1));
  CHECK(check_convergence(seq, there, 0.05, 1));

  std::vector<std::pair<int, SpinState>> stripes;
  for (int N : {8, 16, 32}) stripes.emplace_back(N, SpinState::stripe(1, N, 0));
  CHECK(check_convergence(stripes, PhaseFunction::constant(2, 0), 0.49, 1));

  CHECK_THROWS_AS(check_convergence(seq, PhaseFunction::parse("0:0.5;1:0.6;0:1", 2), 0.2, 1), DomainError);
  CHECK_THROWS_AS(check_convergence(seq, here, 0.0, 1), DomainError);
  auto backwards = seq;
  std::swap(backwards[0], backwards[1]);
  CHECK_THROWS_AS(check_convergence(backwards, there, 0.05, 1), ValidationError);
}
