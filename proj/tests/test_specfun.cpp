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
#include <numbers>
#include <random>

#include "antiphase/errors.hpp"
#include "antiphase/specfun.hpp"
#include "doctest.h"

using namespace antiphase;

namespace {

// Truncated sum plus an Euler-Maclaurin tail: sum_{n>=0} f(x+n) equals
// int_x^inf f + f(x)/2 up to |f'(x)|/12, which is returned in `width`.
double truncated_hurwitz(double p, double a, long terms, double* width) {
  long double s = 0.0L;
  for (long n = terms - 1; n >= 0; --n) s += std::pow(static_cast<long double>(n) + a, -static_cast<long double>(p));
  const double x = static_cast<double>(terms) + a;
  const double tail = std::pow(x, 1.0 - p) / (p - 1.0) + 0.5 * std::pow(x, -p);
  *width = p * std::pow(x, -p - 1.0) / 12.0 + 1e-15 * std::fabs(static_cast<double>(s));
  return static_cast<double>(s) + tail;
}

// Direct lattice sum of the block-pair interaction on the infinite line.
double line_pair_sum(double p, int h1, int h2, int d) {
  double s = 0.0;
  for (int i = 1; i <= h1; ++i)
    for (int j = 1; j <= h2; ++j) s += std::pow(static_cast<double>(i + j + d - 1), -p);
  return s;
}

}  // namespace

TEST_CASE("riemann_zeta closed forms") {
  const double pi = std::numbers::pi;
  CHECK(riemann_zeta(2.0) == doctest::Approx(pi * pi / 6).epsilon(1e-14));
  CHECK(riemann_zeta(4.0) == doctest::Approx(pi * pi * pi * pi / 90).epsilon(1e-14));
  CHECK(riemann_zeta(3.0) == doctest::Approx(1.2020569031595942).epsilon(1e-14));
}

TEST_CASE("riemann_zeta against truncated sum with tail bracket") {
  double width = 0.0;
  const double oracle = truncated_hurwitz(1.5, 1.0, 10'000'000, &width);
  CHECK(std::fabs(riemann_zeta(1.5) - oracle) <= width + 1e-12);
}

TEST_CASE("riemann_zeta near p = 1 stays accurate") {
  // Laurent series with the first Stieltjes constants
  const double p = 1.0 + 1e-3;
  const double eps = p - 1.0;  // exact in binary
  CHECK(riemann_zeta(p) == doctest::Approx(1.0 / eps + 0.5772156649015329 + 0.0728158454836767 * eps - 0.0048452131417 * eps * eps).epsilon(1e-14));
}

TEST_CASE("riemann_zeta domain errors") {
  CHECK_THROWS_AS(riemann_zeta(1.0), DomainError);
  CHECK_THROWS_AS(riemann_zeta(0.5), DomainError);
}

TEST_CASE("hurwitz_zeta identities and oracle") {
  for (double p : {1.5, 2.0, 2.5, 3.0, 4.0}) CHECK(std::fabs(hurwitz_zeta(p, 1.0) - riemann_zeta(p)) <= 1e-12);
  const double pi = std::numbers::pi;
  CHECK(hurwitz_zeta(2.0, 0.5) == doctest::Approx(pi * pi / 2).epsilon(1e-14));
  double width = 0.0;
  const double oracle = truncated_hurwitz(3.0, 0.25, 1'000'000, &width);
  CHECK(std::fabs(hurwitz_zeta(3.0, 0.25) - oracle) <= width + 1e-12);
  // zeta(p, a) = a^{-p} + zeta(p, a + 1)
  CHECK(hurwitz_zeta(2.5, 0.3) == doctest::Approx(std::pow(0.3, -2.5) + hurwitz_zeta(2.5, 1.3)).epsilon(1e-14));
  CHECK_THROWS_AS(hurwitz_zeta(2.0, 0.0), DomainError);
  CHECK_THROWS_AS(hurwitz_zeta(2.0, 2.5), DomainError);
  CHECK_THROWS_AS(hurwitz_zeta(1.0, 0.5), DomainError);
}

TEST_CASE("dirichlet_eta") {
  const double pi = std::numbers::pi;
  CHECK(dirichlet_eta(2.0) == doctest::Approx(pi * pi / 12).epsilon(1e-14));
  CHECK(std::fabs(dirichlet_eta(3.0) - 0.75 * riemann_zeta(3.0)) <= 1e-12);
  CHECK(std::fabs(dirichlet_eta(3.0) - 0.9015426773696957) <= 1e-12);
  for (double p : {1.5, 2.0, 2.5, 3.0, 4.0, 7.5})
    CHECK(std::fabs(dirichlet_eta(p) - (1.0 - std::pow(2.0, 1.0 - p)) * riemann_zeta(p)) <= 1e-12);
  CHECK(std::fabs(dirichlet_eta(20.0) - 1.0) <= 1e-6);
  double prev = 0.0;
  for (double p = 2.0; p <= 30.0; p += 1.0) {
    const double e = dirichlet_eta(p);
    CHECK(e > prev);
    CHECK(e < 1.0);
    prev = e;
  }
  CHECK_THROWS_AS(dirichlet_eta(1.0), DomainError);
}

TEST_CASE("ExpPolynomial vanishing order") {
  CHECK(ExpPolynomial{{+1, 0}}.vanishing_order() == 0);
  CHECK(ExpPolynomial::one_minus(3).vanishing_order() == 1);
  const auto sq = ExpPolynomial::one_minus(2) * ExpPolynomial::one_minus(5);
  CHECK(sq.vanishing_order() == 2);
  CHECK((ExpPolynomial{{+1, 4}, {-1, 4}}).empty());
  // Near zero: (1 - e^{-a h}) / a -> h
  CHECK(ExpPolynomial::one_minus(3).evaluate(1e-9, 1) == doctest::Approx(3.0).epsilon(1e-8));
  CHECK(sq.evaluate(1e-7, 2) == doctest::Approx(10.0).epsilon(1e-6));
  // Away from zero the order-stripped value is P(a)/a^m.
  const double a = 0.7;
  CHECK(sq.evaluate(a, 2) == doctest::Approx((1 - std::exp(-2 * a)) * (1 - std::exp(-5 * a)) / (a * a)).epsilon(1e-13));
  CHECK(sq.evaluate(a, 0) == doctest::Approx((1 - std::exp(-2 * a)) * (1 - std::exp(-5 * a))).epsilon(1e-13));
}

TEST_CASE("jp_threshold equals zeta(p-1)") {
  CHECK(std::fabs(jp_threshold(3.0) - riemann_zeta(2.0)) <= 1e-8);
  CHECK(std::fabs(jp_threshold(4.0) - riemann_zeta(3.0)) <= 1e-8);
  CHECK(std::fabs(jp_threshold(2.5) - riemann_zeta(1.5)) <= 1e-8);
  CHECK(std::fabs(jp_threshold(2.5) - 2.6123753486854883) <= 1e-8);
  CHECK_THROWS_AS(jp_threshold(2.0), DomainError);
  CHECK_THROWS_AS(jp_threshold(1.5), DomainError);
}

TEST_CASE("kernel_integral examples") {
  // numerator 1, no period: J_3 = zeta(2)
  auto r = kernel_integral(KernelIntegrand(3.0, ExpPolynomial{{+1, 0}}));
  CHECK(std::fabs(r.value - riemann_zeta(2.0)) <= 1e-9);
  CHECK(r.error_bound < 1e-8);

  // (1-e^-a)^2 e^{-a d} as four signed terms; p = 2, d = 5.
  const int d = 5;
  ExpPolynomial num{{+1, d}, {-1, d + 1}, {-1, d + 1}, {+1, d + 2}};
  r = kernel_integral(KernelIntegrand(2.0, num));
  CHECK(std::fabs(r.value - line_pair_sum(2.0, 1, 1, d)) <= 1e-10);

  // sign flip negates
  auto neg = kernel_integral(KernelIntegrand(2.0, -num));
  CHECK(neg.value == doctest::Approx(-r.value).epsilon(1e-12));
}

TEST_CASE("kernel_integral block pairs on the line match direct sums") {
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> len(1, 6), dist(0, 8);
  for (double p : {1.5, 2.0, 3.0}) {
    for (int trial = 0; trial < 6; ++trial) {
      const int h1 = len(rng), h2 = len(rng), d = dist(rng);
      KernelIntegrand k;
      k.p = p;
      k.factors = {ExpPolynomial::one_minus(h1), ExpPolynomial::one_minus(h2), ExpPolynomial::monomial(1, d)};
      const double got = kernel_integral(k).value;
      double direct = line_pair_sum(p, h1, h2, d);
      if (p == 1.5) {
        // The line sum converges; it is finite because both blocks are finite.
        CHECK(got == doctest::Approx(direct).epsilon(1e-9));
      } else {
        CHECK(std::fabs(got - direct) <= 1e-10 * std::max(1.0, direct));
      }
    }
  }
}

TEST_CASE("kernel_integral with period reproduces wrapped sums") {
  // Two unit blocks at gap d on an N-torus: sum_n |d+1+nN|^{-p} over the
  // ring images, written as e^{-a d} + e^{-a d'} with d' = N - d - 2.
  const int N = 9, d = 2;
  const double p = 2.0;
  KernelIntegrand k;
  k.p = p;
  k.factors = {ExpPolynomial::one_minus(1), ExpPolynomial::one_minus(1),
               ExpPolynomial{{+1, d}, {+1, N - d - 2}}};
  k.period = N;
  double direct = 0.0;
  const int n0 = 200000;
  for (int n = -n0; n <= n0; ++n) direct += std::pow(std::fabs(static_cast<double>(d + 1 + n * N)), -p);
  // midpoint-rule tail of the images beyond n0
  direct += (std::pow(n0 * N + d + 1 + 0.5 * N, 1.0 - p) + std::pow(n0 * N - d - 1 + 0.5 * N, 1.0 - p)) / (N * (p - 1.0));
  CHECK(std::fabs(kernel_integral(k).value - direct) <= 1e-9);
}

TEST_CASE("kernel_integral linearity in the numerator") {
  const ExpPolynomial a{{+1, 0}, {-1, 3}};
  const ExpPolynomial b{{-1, 1}, {+1, 4}};
  KernelIntegrand whole;
  whole.p = 2.5;
  whole.factors = {ExpPolynomial::one_minus(2), a + b};
  whole.period = 11;
  KernelIntegrand left = whole, right = whole;
  left.factors[1] = a;
  right.factors[1] = b;
  const double sum = kernel_integral(left).value + kernel_integral(right).value;
  CHECK(std::fabs(kernel_integral(whole).value - sum) <= 1e-10);
}

TEST_CASE("kernel_integral rejects non-integrable integrands") {
  // numerator 1 with a period: alpha^{p-4}, needs p > 3
  CHECK_THROWS_AS(kernel_integral(KernelIntegrand(2.5, ExpPolynomial{{+1, 0}}, 5)), DomainError);
  CHECK_THROWS_AS(kernel_integral(KernelIntegrand(1.8, ExpPolynomial{{+1, 0}})), DomainError);
  CHECK_THROWS_AS(kernel_integral(KernelIntegrand(1.5, ExpPolynomial::one_minus(2), 4)), DomainError);
  CHECK_NOTHROW(kernel_integral(KernelIntegrand(2.5, ExpPolynomial::one_minus(2))));
}

TEST_CASE("kernel_integral reports accuracy failures") {
  QuadratureSpec tight;
  tight.rel_tol = 1e-16;
  tight.abs_tol = 1e-300;
  tight.max_subdivisions = 2;
  try {
    kernel_integral(KernelIntegrand(2.2, ExpPolynomial{{+1, 0}}), tight);
    FAIL("expected AccuracyError");
  } catch (const AccuracyError& e) {
    CHECK(std::isfinite(e.estimate()));
    CHECK(e.bound() > 0.0);
  }
}
