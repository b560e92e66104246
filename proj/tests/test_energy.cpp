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

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "antiphase/energy.hpp"
#include "antiphase/errors.hpp"
#include "doctest.h"

using namespace antiphase;

namespace {

ModelParams params(double p, double J) {
  ModelParams m;
  m.p = p;
  m.J = J;
  return m;
}

SpinState from_bits(unsigned bits, int n) {
  std::vector<int> s(n);
  for (int i = 0; i < n; ++i) s[i] = (bits >> i) & 1u ? 1 : -1;
  return SpinState(s);
}

// e(h) from the stripe's spin autocorrelation, a triangle wave of period 2h:
// e(h) = -J (1 - 2/h) + 2 sum_{r=1}^{2h} c(r) (2h)^{-p} zeta(p, r/2h).
double e_triangle(int h, double p, double J) {
  const int period = 2 * h;
  double af = 0.0;
  for (int r = 1; r <= period; ++r) {
    const int rm = r % period;
    const double c = 1.0 - 2.0 * std::min(rm, period - rm) / h;
    af += c * hurwitz_zeta(p, static_cast<double>(r) / period);
  }
  return -J * (1.0 - 2.0 / h) + 2.0 * af * std::pow(period, -p);
}

// Signed pairwise sum over the blocks of two runs (or one run with itself).
double pairwise_runs(const Run& a, const Run& b, std::int64_t h, std::int64_t N, const ModelParams& m) {
  double s = 0.0;
  for (std::int64_t i = 0; i < a.n_blocks; ++i) {
    for (std::int64_t j = 0; j < b.n_blocks; ++j) {
      const std::int64_t start_i = a.origin + i * h;
      const std::int64_t start_j = b.origin + j * h;
      const std::int64_t gap = ((start_j - start_i - h) % N + N) % N;
      const int sign = (i % 2 ? -a.first_sign : a.first_sign) * (j % 2 ? -b.first_sign : b.first_sign);
      s += sign * block_pair_af(h, h, gap, N, m);
    }
  }
  return s;
}

}  // namespace

TEST_CASE("wrapped kernel: self-image constant, symmetry and truncated-sum check") {
  for (double p : {1.5, 2.0, 3.0}) {
    CHECK(wrapped_kernel(7, 0, p) == doctest::Approx(2.0 * std::pow(7.0, -p) * riemann_zeta(p)).epsilon(1e-15));
    for (int N : {2, 5, 10, 33}) {
      for (int d = 1; d < N; ++d) CHECK(std::fabs(wrapped_kernel(N, d, p) - wrapped_kernel(N, N - d, p)) <= 1e-12);
    }
  }
  CHECK(std::fabs(wrapped_kernel(10, 5, 2.0) - wrapped_kernel(10, 5, 2.0, KernelPath::truncated)) <= 1e-10);
  // p = 2 has a closed form: sum_n (d + nN)^{-2} = (pi / N)^2 / sin^2(pi d / N)
  const double pi = std::numbers::pi;
  CHECK(wrapped_kernel(10, 3, 2.0) == doctest::Approx(std::pow(pi / 10, 2) / std::pow(std::sin(pi * 0.3), 2)).epsilon(1e-13));
  CHECK_THROWS_AS(wrapped_kernel(5, 5, 2.0), DomainError);
  CHECK_THROWS_AS(wrapped_kernel(5, -1, 2.0), DomainError);
}

TEST_CASE("energy_direct closed forms") {
  for (double p : {1.5, 2.0, 3.0}) {
    const auto m = params(p, 0.7);
    const auto ones = energy_direct(SpinState::constant(9), m);
    CHECK(ones.total == doctest::Approx(9 * (2 * riemann_zeta(p) - 0.7)).epsilon(1e-12));
    const auto alt = energy_direct(SpinState::stripe(1, 10), m);
    CHECK(alt.total / 10 == doctest::Approx(0.7 - 2 * dirichlet_eta(p)).epsilon(1e-12));
    CHECK(alt.total == doctest::Approx(alt.ferro + alt.antiferro).epsilon(1e-15));
  }
  const double pi = std::numbers::pi;
  CHECK(energy_direct(SpinState::stripe(1, 8), params(2.0, 0.5)).total / 8 ==
        doctest::Approx(0.5 - pi * pi / 6).epsilon(1e-12));
  const auto s = SpinState::parse("++--+--+");
  const auto m = params(2.0, 1.0);
  CHECK(energy_direct(s, m).total == doctest::Approx(energy_direct(s.rotated(1), m).total).epsilon(1e-13));
}

TEST_CASE("energy_blocks matches the direct oracle on every state up to 10 sites") {
  for (double p : {1.5, 2.0, 3.0}) {
    const auto m = params(p, 1.0);
    for (int n = 1; n <= 10; ++n) {
      for (unsigned bits = 0; bits < (1u << n); ++bits) {
        const auto s = from_bits(bits, n);
        const auto c = to_blocks(s);
        const double direct = energy_direct(s, m).total;
        REQUIRE(std::fabs(energy_blocks(c.blocks, m).total - direct) <= 1e-8);
        REQUIRE(std::fabs(energy_fast(c.blocks, m).total - direct) <= 1e-9);
      }
    }
  }
}

TEST_CASE("energy_blocks examples") {
  const auto m = params(2.0, 1.0);
  const auto c = BlockArray(1, {3, 2, 1, 2});
  CHECK(std::fabs(energy_blocks(c, m).total - energy_direct(SpinState::parse("++--+--+"), m).total) <= 1e-8);
  const auto single = energy_blocks(BlockArray(1, {7}), m);
  CHECK(single.antiferro == doctest::Approx(7 * 2 * riemann_zeta(2.0)).epsilon(1e-10));
  CHECK(single.ferro == -7.0);
  CHECK(energy_blocks(BlockArray(1, {3, 3}), m).total == doctest::Approx(6 * energy_per_site(3, m)).epsilon(1e-14));
  const auto b = energy_blocks(c, m);
  CHECK(b.total == b.ferro + b.antiferro);
  CHECK(b.error_bound > 0.0);
  CHECK(b.error_bound < 1e-8);
}

TEST_CASE("run closed forms used by energy_blocks agree with the oracle on long runs") {
  std::mt19937 rng(11);
  for (double p : {1.5, 2.0, 3.0}) {
    const auto m = params(p, 1.0);
    for (int trial = 0; trial < 6; ++trial) {
      const int h = 1 + static_cast<int>(rng() % 3);
      std::vector<int> lengths;
      for (int i = 0; i < 10; ++i) lengths.push_back(h);
      lengths.push_back(h + 1 + static_cast<int>(rng() % 2));
      lengths.push_back(1 + static_cast<int>(rng() % 3));
      for (int i = 0; i < 8; ++i) lengths.push_back(h + (trial % 2));
      const BlockArray c(1, lengths);
      const double direct = energy_direct(c.to_state(), m).total;
      CHECK(std::fabs(energy_blocks(c, m).total - direct) <= 1e-8);
      CHECK(std::fabs(energy_fast(c, m).total - direct) <= 1e-9);
    }
  }
}

TEST_CASE("run_pair_af equals its pairwise sum") {
  const auto m = params(2.0, 1.0);
  // two runs of 4 blocks each on a 32-site torus
  const Run a{4, 0, 1}, b{4, 16, 1};
  const double closed = run_pair_af(a, b, 2, 32, m);
  CHECK(std::fabs(closed - pairwise_runs(a, b, 2, 32, m)) <= 1e-9);
  CHECK(std::fabs(closed - run_pair_af(b, a, 2, 32, m)) <= 1e-12);
  // degenerate runs
  CHECK(std::fabs(run_pair_af(Run{1, 0, 1}, Run{1, 5, -1}, 3, 12, m) + block_pair_af(3, 3, 2, 12, m)) <= 1e-12);

  std::mt19937 rng(5);
  for (double p : {1.5, 2.0, 3.0}) {
    const auto mp = params(p, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
      const std::int64_t h = 1 + rng() % 3;
      const Run ra{static_cast<std::int64_t>(1 + rng() % 7), static_cast<std::int64_t>(rng() % 50),
                   rng() % 2 ? 1 : -1};
      const std::int64_t gap = rng() % 5;
      const Run rb{static_cast<std::int64_t>(1 + rng() % 7), ra.origin + ra.n_blocks * h + gap,
                   rng() % 2 ? 1 : -1};
      const std::int64_t N = (ra.n_blocks + rb.n_blocks) * h + gap + static_cast<std::int64_t>(rng() % 6);
      const double closed_r = run_pair_af(ra, rb, h, N, mp);
      CHECK(std::fabs(closed_r - pairwise_runs(ra, rb, h, N, mp)) <= 1e-9);
    }
  }
  CHECK_THROWS_AS(run_pair_af(Run{4, 0, 1}, Run{4, 6, 1}, 2, 32, m), DomainError);
  CHECK_THROWS_AS(run_pair_af(Run{10, 0, 1}, Run{10, 20, 1}, 2, 32, m), DomainError);
}

TEST_CASE("run_self_af equals its pairwise sum") {
  auto pairwise_self = [](std::int64_t M, std::int64_t h, std::int64_t N, const ModelParams& m) {
    double s = 0.0;
    for (std::int64_t a = 0; a < M; ++a)
      for (std::int64_t b = a + 1; b < M; ++b) s += ((b - a) % 2 ? -1 : 1) * block_pair_af(h, h, (b - a - 1) * h, N, m);
    return s;
  };
  const auto m2 = params(2.0, 1.0);
  CHECK(std::fabs(run_self_af(2, 3, 10, m2) + block_pair_af(3, 3, 0, 10, m2)) <= 1e-12);
  const auto m3 = params(3.0, 1.0);
  CHECK(std::fabs(run_self_af(6, 2, 24, m3) - pairwise_self(6, 2, 24, m3)) <= 1e-9);
  for (double p : {1.5, 2.0, 3.0}) {
    const auto m = params(p, 1.0);
    for (std::int64_t M : {2, 3, 4, 5, 8, 11}) {
      for (std::int64_t h : {1, 2, 3}) {
        for (std::int64_t extra : {0, 1, 4}) {
          const std::int64_t N = M * h + extra;
          CHECK(std::fabs(run_self_af(M, h, N, m) - pairwise_self(M, h, N, m)) <= 1e-9);
        }
      }
    }
  }
  // full torus: stripe AF energy = 2 (M self blocks + run pairs)
  const auto m = params(2.0, 1.0);
  const double stripe_af = energy_direct(SpinState::stripe(2, 16), m).antiferro;
  CHECK(std::fabs(stripe_af - 2 * (8 * block_self_af(2, 16, m) + run_self_af(8, 2, 16, m))) <= 1e-9);
  CHECK_THROWS_AS(run_self_af(1, 2, 8, m), DomainError);
  CHECK_THROWS_AS(run_self_af(5, 2, 8, m), DomainError);
}

TEST_CASE("scaling: repeating a state M times multiplies its energy by M") {
  std::mt19937 rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 10);
    std::vector<int> sp(n);
    for (int& v : sp) v = rng() % 2 ? 1 : -1;
    const auto m = params(trial % 3 == 0 ? 1.5 : (trial % 3 == 1 ? 2.0 : 3.0), 1.0);
    const double e1 = energy_direct(SpinState(sp), m).total;
    for (int M : {2, 3, 5}) {
      std::vector<int> rep;
      for (int k = 0; k < M; ++k) rep.insert(rep.end(), sp.begin(), sp.end());
      const SpinState big(rep);
      CHECK(std::fabs(energy_direct(big, m).total - M * e1) <= 1e-9);
      CHECK(std::fabs(energy_fast(to_blocks(big).blocks, m).total - M * e1) <= 1e-9);
    }
  }
}

TEST_CASE("symmetries of the energy") {
  std::mt19937 rng(17);
  const auto m = params(2.0, 0.8);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 3 + static_cast<int>(rng() % 12);
    std::vector<int> sp(n);
    for (int& v : sp) v = rng() % 2 ? 1 : -1;
    const SpinState s(sp);
    const double e = energy_direct(s, m).total;
    CHECK(std::fabs(energy_direct(s.rotated(rng() % n), m).total - e) <= 1e-10);
    CHECK(std::fabs(energy_direct(s.reflected(), m).total - e) <= 1e-10);
    CHECK(std::fabs(energy_direct(s.flipped(), m).total - e) <= 1e-10);
  }
}

TEST_CASE("energy per site against the autocorrelation oracle") {
  const double pi = std::numbers::pi;
  CHECK(energy_per_site(1, params(2.0, 0.5)) == doctest::Approx(0.5 - pi * pi / 6).epsilon(1e-12));
  for (double p : {1.5, 2.0, 3.0}) {
    for (double J : {0.05, 1.0, 3.0}) {
      const auto m = params(p, J);
      for (int h = 1; h <= 12; ++h) CHECK(std::fabs(energy_per_site(h, m) - e_triangle(h, p, J)) <= 1e-10);
    }
  }
  const auto m = params(2.0, 1.0);
  for (int h : {1, 2, 3}) {
    for (int M : {2, 3}) {
      std::vector<int> lengths(2 * M, h);
      CHECK(energy_blocks(BlockArray(1, lengths), m).total == doctest::Approx(M * 2 * h * energy_per_site(h, m)).epsilon(1e-11));
    }
  }
}

TEST_CASE("find_hstar") {
  auto oracle_argmin = [](double p, double J, int h_max) {
    int best = 1;
    for (int h = 2; h <= h_max; ++h)
      if (e_triangle(h, p, J) < e_triangle(best, p, J)) best = h;
    return best;
  };
  const auto g = find_hstar(params(2.0, 0.05), 40);
  CHECK(g.h_star == 1);
  CHECK(g.uniqueness == Uniqueness::unique);
  CHECK(g.h_star == oracle_argmin(2.0, 0.05, 100));
  CHECK(g.e_star == doctest::Approx(0.05 - 2 * dirichlet_eta(2.0)).epsilon(1e-12));

  const auto g3 = find_hstar(params(2.0, 3.0), 40);
  CHECK(g3.h_star == oracle_argmin(2.0, 3.0, 100));
  CHECK(g3.h_star >= 2);
  CHECK(g3.e_curve[g3.h_star - 1] < g3.e_curve[g3.h_star]);
  CHECK(g3.e_curve[g3.h_star - 1] < g3.e_curve[g3.h_star - 2]);

  const auto gp = find_hstar(params(3.0, 2.0), 40);
  CHECK(gp.h_star == oracle_argmin(3.0, 2.0, 100));
  CHECK(gp.uniqueness == Uniqueness::unique);

  const auto gd = find_hstar(params(3.0, 4.0), 30);
  CHECK(gd.uniqueness == Uniqueness::decreasing_regime);
  CHECK_THROWS_AS(gd.require_unique(), PreconditionError);

  CHECK_THROWS_AS(find_hstar(params(2.0, 3.0), 3), InconclusiveError);
  CHECK_THROWS_AS(find_hstar(params(2.0, 1.0), 1), ValidationError);
}

TEST_CASE("renormalized energy") {
  const auto m = params(2.0, 3.0);
  const auto g = find_hstar(m, 40);
  const int h = g.h_star;
  std::vector<int> lengths(6, h);
  CHECK(std::fabs(renormalized(BlockArray(1, lengths), m, g)) <= 1e-10);
  CHECK(std::fabs(renormalized_fast(BlockArray(1, lengths), m, g)) <= 1e-10);
  lengths[0] += 1;
  lengths[1] += 1;
  CHECK(renormalized(BlockArray(1, lengths), m, g) > 0.0);
  StripeGroundState bad = g;
  bad.uniqueness = Uniqueness::tie_with_next;
  CHECK_THROWS_AS(renormalized(BlockArray(1, lengths), m, bad), PreconditionError);
}

TEST_CASE("kernel table block sums") {
  const auto t = KernelTable::get(2.0, 17);
  CHECK(KernelTable::get(2.0, 17) == t);
  std::mt19937 rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    const int hm = 1 + static_cast<int>(rng() % 17);
    const int hn = 1 + static_cast<int>(rng() % 17);
    const int delta = static_cast<int>(rng() % 40) - 20;
    double direct = 0.0;
    for (int i = 0; i < hm; ++i)
      for (int j = 0; j < hn; ++j) direct += t->kernel(((delta + j - i) % 17 + 17) % 17);
    CHECK(std::fabs(t->block_sum(delta, hm, hn) - direct) <= 1e-12);
  }
}

TEST_CASE("model parameter validation") {
  CHECK_THROWS_AS(energy_direct(SpinState::constant(3), params(1.0, 1.0)), ValidationError);
  CHECK_THROWS_AS(energy_blocks(BlockArray(1, {3}), params(2.0, 0.0)), ValidationError);
}
