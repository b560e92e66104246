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

#include "antiphase/specfun.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <queue>
#include <string>

#include "antiphase/errors.hpp"

namespace antiphase {

void QuadratureSpec::validate() const {
  if (!(rel_tol > 0) || !(abs_tol > 0) || max_subdivisions < 1)
    throw ValidationError("QuadratureSpec: tolerances must be positive and max_subdivisions >= 1");
}

namespace {

// B_2, B_4, ..., B_28
constexpr std::array<long double, 14> kBernoulli = {
    1.0L / 6.0L,
    -1.0L / 30.0L,
    1.0L / 42.0L,
    -1.0L / 30.0L,
    5.0L / 66.0L,
    -691.0L / 2730.0L,
    7.0L / 6.0L,
    -3617.0L / 510.0L,
    43867.0L / 798.0L,
    -174611.0L / 330.0L,
    854513.0L / 138.0L,
    -236364091.0L / 2730.0L,
    8553103.0L / 6.0L,
    -23749461029.0L / 870.0L,
};

constexpr int kEulerMaclaurinOrder = 12;

}  // namespace

double hurwitz_zeta(double p, double a, double abs_tol) {
  if (!(p > 1.0)) throw DomainError("hurwitz_zeta: requires p > 1, got " + std::to_string(p));
  if (!(a > 0.0) || a > 2.0)
    throw DomainError("hurwitz_zeta: requires 0 < a <= 2, got " + std::to_string(a));

  const long double s = p;
  int n = std::max(0, static_cast<int>(std::ceil(10.0 - a)));
  for (;;) {
    const long double x = static_cast<long double>(n) + a;
    // Corrections T_j = B_{2j}/(2j)! * s(s+1)...(s+2j-2) * x^{-s-2j+1}.
    long double coeff = s / x;  // s * x^{-1}, running Pochhammer / power
    long double fact = 2.0L;    // (2j)!
    const long double xs = std::pow(x, -s);
    long double corr = 0.0L;
    long double omitted = 0.0L;
    for (int j = 1; j <= kEulerMaclaurinOrder + 1; ++j) {
      const long double term = kBernoulli[j - 1] / fact * coeff * xs;
      if (j <= kEulerMaclaurinOrder)
        corr += term;
      else
        omitted = std::fabs(term);
      coeff *= (s + 2 * j - 1) * (s + 2 * j) / (x * x);
      fact *= static_cast<long double>(2 * j + 1) * (2 * j + 2);
    }
    if (2.0L * omitted <= 0.1L * abs_tol || n > 100000) {
      long double head = 0.0L;
      for (int k = n - 1; k >= 0; --k) head += std::pow(static_cast<long double>(k) + a, -s);
      const long double tail = std::pow(x, 1.0L - s) / (s - 1.0L) + 0.5L * xs + corr;
      return static_cast<double>(head + tail);
    }
    n += 8;
  }
}

double riemann_zeta(double p, double abs_tol) {
  if (!(p > 1.0)) throw DomainError("riemann_zeta: requires p > 1, got " + std::to_string(p));
  return hurwitz_zeta(p, 1.0, abs_tol);
}

double dirichlet_eta(double p) {
  if (!(p > 1.0)) throw DomainError("dirichlet_eta: requires p > 1, got " + std::to_string(p));
  // Cohen, Rodriguez Villegas, Zagier: error <= 2 (3+sqrt 8)^{-n} sum |a_k|.
  constexpr int n = 40;
  const long double d0 = std::pow(3.0L + std::sqrt(8.0L), n);
  const long double d = (d0 + 1.0L / d0) / 2.0L;
  long double b = -1.0L;
  long double c = -d;
  long double sum = 0.0L;
  for (int k = 0; k < n; ++k) {
    c = b - c;
    sum += c * std::pow(static_cast<long double>(k) + 1.0L, -static_cast<long double>(p));
    b = b * (static_cast<long double>(k) + n) * (static_cast<long double>(k) - n) /
        ((static_cast<long double>(k) + 0.5L) * (static_cast<long double>(k) + 1.0L));
  }
  return static_cast<double>(sum / d);
}

// ---------------------------------------------------------------------------
// ExpPolynomial

ExpPolynomial::ExpPolynomial(std::initializer_list<std::pair<int, std::int64_t>> signed_shifts) {
  for (const auto& [sign, shift] : signed_shifts) {
    if (sign != 1 && sign != -1) throw ValidationError("ExpPolynomial: signs must be +1 or -1");
    terms_.push_back({sign, shift});
  }
  normalize();
}

ExpPolynomial::ExpPolynomial(std::vector<Term> terms) : terms_(std::move(terms)) { normalize(); }

ExpPolynomial ExpPolynomial::monomial(std::int64_t coef, std::int64_t shift) {
  return ExpPolynomial(std::vector<Term>{{coef, shift}});
}

ExpPolynomial ExpPolynomial::one_minus(std::int64_t h) {
  return ExpPolynomial(std::vector<Term>{{1, 0}, {-1, h}});
}

void ExpPolynomial::normalize() {
  std::map<std::int64_t, std::int64_t> by_shift;
  for (const auto& t : terms_) {
    if (t.shift < 0) throw ValidationError("ExpPolynomial: shifts must be non-negative");
    by_shift[t.shift] += t.coef;
  }
  terms_.clear();
  for (const auto& [shift, coef] : by_shift)
    if (coef != 0) terms_.push_back({coef, shift});
}

ExpPolynomial ExpPolynomial::operator*(const ExpPolynomial& other) const {
  std::vector<Term> out;
  out.reserve(terms_.size() * other.terms_.size());
  for (const auto& a : terms_)
    for (const auto& b : other.terms_) out.push_back({a.coef * b.coef, a.shift + b.shift});
  return ExpPolynomial(std::move(out));
}

ExpPolynomial ExpPolynomial::operator+(const ExpPolynomial& other) const {
  std::vector<Term> out = terms_;
  out.insert(out.end(), other.terms_.begin(), other.terms_.end());
  return ExpPolynomial(std::move(out));
}

ExpPolynomial ExpPolynomial::operator-() const {
  std::vector<Term> out = terms_;
  for (auto& t : out) t.coef = -t.coef;
  return ExpPolynomial(std::move(out));
}

int ExpPolynomial::vanishing_order() const {
  if (terms_.empty()) return -1;
  // A nonzero sum with T distinct shifts has a nonzero moment of order < T.
  const int max_order = static_cast<int>(terms_.size()) - 1;
  for (int m = 0; m <= max_order; ++m) {
    __int128 moment = 0;
    bool overflow = false;
    for (const auto& t : terms_) {
      __int128 pw = 1;
      for (int r = 0; r < m; ++r) {
        pw *= t.shift;
        if (pw > (static_cast<__int128>(1) << 100)) overflow = true;
      }
      moment += pw * t.coef;
    }
    if (overflow) return m;
    if (moment != 0) return m;
  }
  return max_order;
}

namespace {

// (e^{-x} - sum_{r<order} (-x)^r/r!) / x^order for x >= 0.
double stripped_exp(double x, int order) {
  if (order == 0) return std::exp(-x);
  if (x < 2.0) {
    // sum_{r>=order} (-1)^r x^{r-order} / r!
    double fact = 1.0;
    for (int r = 2; r <= order; ++r) fact *= r;
    double term = ((order % 2) ? -1.0 : 1.0) / fact;
    double sum = term;
    for (int r = order + 1; r < order + 40; ++r) {
      term *= -x / r;
      sum += term;
      if (std::fabs(term) < 1e-19 * std::fabs(sum)) break;
    }
    return sum;
  }
  double poly = 0.0;
  double term = 1.0;
  for (int r = 0; r < order; ++r) {
    poly += term;
    term *= -x / (r + 1);
  }
  return (std::exp(-x) - poly) / std::pow(x, order);
}

}  // namespace

double ExpPolynomial::evaluate(double alpha, int order) const {
  // Returns P(alpha) / alpha^order.
  double sum = 0.0;
  for (const auto& t : terms_) {
    if (t.shift == 0) {
      if (order == 0) sum += static_cast<double>(t.coef);
      continue;
    }
    const double k = static_cast<double>(t.shift);
    sum += static_cast<double>(t.coef) * std::pow(k, order) * stripped_exp(alpha * k, order);
  }
  return sum;
}

// ---------------------------------------------------------------------------
// Adaptive Gauss-Kronrod (7/15)

namespace {

constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a, b, value, error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

template <class F>
Segment gk15(const F& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double k = fc * kWgk[7];
  double g = fc * kWg[3];
  for (int i = 0; i < 7; ++i) {
    const double dx = h * kXgk[i];
    const double f1 = f(c - dx);
    const double f2 = f(c + dx);
    k += kWgk[i] * (f1 + f2);
    if (i % 2 == 1) g += kWg[i / 2] * (f1 + f2);
  }
  return {a, b, k * h, std::fabs((k - g) * h)};
}

template <class F>
IntegralResult adaptive(const F& f, double a, double b, double abs_tol, double rel_tol,
                        int max_subdivisions) {
  std::priority_queue<Segment> heap;
  Segment first = gk15(f, a, b);
  double total = first.value;
  double error = first.error;
  heap.push(first);
  int splits = 0;
  while (error > std::max(abs_tol, rel_tol * std::fabs(total))) {
    if (splits >= max_subdivisions)
      throw AccuracyError("kernel_integral: subdivision limit reached", total, error);
    Segment s = heap.top();
    heap.pop();
    const double m = 0.5 * (s.a + s.b);
    if (!(m > s.a && m < s.b)) {
      // Interval exhausted at machine resolution; accept what we have.
      heap.push(s);
      break;
    }
    Segment l = gk15(f, s.a, m);
    Segment r = gk15(f, m, s.b);
    total += l.value + r.value - s.value;
    error += l.error + r.error - s.error;
    heap.push(l);
    heap.push(r);
    ++splits;
  }
  // Re-sum in a fixed order to avoid drift from the running update.
  double sum = 0.0;
  double err = 0.0;
  std::vector<Segment> parts;
  while (!heap.empty()) {
    parts.push_back(heap.top());
    heap.pop();
  }
  std::sort(parts.begin(), parts.end(), [](const Segment& x, const Segment& y) { return x.a < y.a; });
  for (const auto& s : parts) {
    sum += s.value;
    err += s.error;
  }
  return {sum, err};
}

// x / (1 - e^{-x}) for x >= 0
double x_over_one_minus_exp(double x) {
  if (x < 1e-12) return 1.0 + 0.5 * x;
  return x / -std::expm1(-x);
}

}  // namespace

IntegralResult kernel_integral(const KernelIntegrand& k, const QuadratureSpec& q) {
  q.validate();
  if (!(k.p > 1.0)) throw DomainError("kernel_integral: requires p > 1");
  if (k.factors.empty()) throw ValidationError("kernel_integral: at least one numerator factor required");
  if (k.period && *k.period < 1) throw ValidationError("kernel_integral: period must be >= 1");
  for (auto sh : k.alternating_shifts)
    if (sh < 1) throw ValidationError("kernel_integral: alternating divisor shifts must be >= 1");

  std::vector<int> orders;
  int total_order = 0;
  for (const auto& f : k.factors) {
    if (f.empty()) return {0.0, 0.0};
    orders.push_back(f.vanishing_order());
    total_order += orders.back();
  }
  const int period_order = k.period ? 1 : 0;
  // Near 0 the integrand behaves like alpha^beta.
  const double beta = k.p - 3.0 + total_order - period_order;
  if (!(beta > -1.0))
    throw DomainError("kernel_integral: integrand not integrable at 0 (numerator vanishes to order " +
                      std::to_string(total_order) + ", p = " + std::to_string(k.p) + ")");

  const double lg = std::lgamma(k.p);
  const double period = k.period ? static_cast<double>(*k.period) : 0.0;

  // Integrand as a function of log(alpha); avoids underflow near 0.
  auto integrand_log = [&](double log_alpha) {
    const double alpha = std::exp(log_alpha);
    double v = std::exp(beta * log_alpha - alpha - lg);
    const double r = x_over_one_minus_exp(alpha);
    v *= r * r;
    for (std::size_t i = 0; i < k.factors.size(); ++i) v *= k.factors[i].evaluate(alpha, orders[i]);
    if (k.period) v *= x_over_one_minus_exp(alpha * period) / period;
    for (auto sh : k.alternating_shifts) v /= 1.0 + std::exp(-alpha * static_cast<double>(sh));
    return v;
  };

  // [0, 1]: alpha = u^gamma makes the algebraic singularity bounded.
  const double gamma = beta < 0.0 ? 1.0 / (beta + 1.0) : 1.0;
  auto head_integrand = [&](double u) {
    if (u <= 0.0) return 0.0;
    const double lu = std::log(u);
    return integrand_log(gamma * lu) * gamma * std::exp((gamma - 1.0) * lu);
  };
  auto body_integrand = [&](double alpha) { return integrand_log(std::log(alpha)); };

  // Truncation point for the exponential tail.
  double lambda = 1.0;
  double magnitude = std::exp(-lg);
  for (const auto& f : k.factors) {
    std::int64_t min_shift = f.terms().front().shift;
    double abs_sum = 0.0;
    for (const auto& t : f.terms()) abs_sum += std::fabs(static_cast<double>(t.coef));
    lambda += static_cast<double>(min_shift);
    magnitude *= abs_sum;
  }
  if (k.period) magnitude /= -std::expm1(-period);
  const double tail_target = 0.01 * q.abs_tol;
  double upper = 8.0;
  double tail_bound = 0.0;
  for (;;) {
    const double denom = lambda - (k.p - 1.0) / upper;
    if (denom > 0.0) {
      const double den2 = -std::expm1(-upper);
      tail_bound = magnitude * std::pow(upper, k.p - 1.0) * std::exp(-lambda * upper) / denom / (den2 * den2);
      if (tail_bound <= tail_target) break;
    }
    upper *= 1.5;
  }

  const double part_tol = 0.5 * q.abs_tol;
  IntegralResult head = adaptive(head_integrand, 0.0, 1.0, part_tol, q.rel_tol, q.max_subdivisions);
  IntegralResult body = adaptive(body_integrand, 1.0, upper, part_tol, q.rel_tol, q.max_subdivisions);
  return {head.value + body.value, head.error_bound + body.error_bound + tail_bound};
}

double jp_threshold(double p, const QuadratureSpec& q) {
  if (!(p > 2.0)) throw DomainError("jp_threshold: integral diverges for p <= 2");
  return kernel_integral(KernelIntegrand(p, ExpPolynomial{{+1, 0}}), q).value;
}

}  // namespace antiphase
