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

#ifndef ANTIPHASE_SPECFUN_HPP
#define ANTIPHASE_SPECFUN_HPP

#include <cstdint>
#include <initializer_list>
#include <optional>
#include <utility>
#include <vector>

namespace antiphase {

struct QuadratureSpec {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  int max_subdivisions = 4000;

  // Throws ValidationError unless all fields are positive.
  void validate() const;
};

/// Riemann zeta for real p > 1, absolute error below `abs_tol`.
double riemann_zeta(double p, double abs_tol = 1e-13);

/// Hurwitz zeta sum_{n>=0} (n+a)^{-p} for p > 1, 0 < a <= 2.
///
/// Euler-Maclaurin with a fixed number of Bernoulli corrections; the
/// summation start is shifted up until the first omitted correction is
/// below `abs_tol`.
double hurwitz_zeta(double p, double a, double abs_tol = 1e-13);

/// Alternating zeta sum_{n>=1} (-1)^{n-1} n^{-p}, p > 1.
///
/// Evaluated by Chebyshev-accelerated summation of the alternating series,
/// independently of the zeta routines.
double dirichlet_eta(double p);

/// Finite signed exponential sum  sum_i c_i e^{-alpha k_i}, k_i >= 0.
class ExpPolynomial {
 public:
  struct Term {
    std::int64_t coef;
    std::int64_t shift;
  };

  ExpPolynomial() = default;
  // From signed (sign, shift) pairs; the multiset is collapsed by shift.
  ExpPolynomial(std::initializer_list<std::pair<int, std::int64_t>> signed_shifts);
  explicit ExpPolynomial(std::vector<Term> terms);

  static ExpPolynomial monomial(std::int64_t coef, std::int64_t shift);
  // 1 - e^{-alpha h}
  static ExpPolynomial one_minus(std::int64_t h);

  ExpPolynomial operator*(const ExpPolynomial& other) const;
  ExpPolynomial operator+(const ExpPolynomial& other) const;
  ExpPolynomial operator-() const;

  const std::vector<Term>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }

  // Order of vanishing at alpha = 0: the first m with sum_i c_i k_i^m != 0.
  int vanishing_order() const;

  // Value at alpha, accurate near alpha = 0 for the given vanishing order
  // (the known-zero Taylor coefficients are removed analytically).
  double evaluate(double alpha, int order) const;

 private:
  void normalize();
  std::vector<Term> terms_;
};

/// Integrand family
///   (1/Gamma(p)) alpha^{p-1} e^{-alpha} (1-e^{-alpha})^{-2}
///     * prod_f P_f(alpha) / (1 - e^{-alpha N}) / prod_s (1 + e^{-alpha s})
/// The period and the alternating divisors are optional.
struct KernelIntegrand {
  double p = 2.0;
  std::vector<ExpPolynomial> factors;
  std::optional<std::int64_t> period;
  std::vector<std::int64_t> alternating_shifts;

  KernelIntegrand() = default;
  KernelIntegrand(double p_, ExpPolynomial numerator,
                  std::optional<std::int64_t> period_ = std::nullopt)
      : p(p_), factors{std::move(numerator)}, period(period_) {}
};

struct IntegralResult {
  double value = 0.0;
  double error_bound = 0.0;
};

/// Integrates a KernelIntegrand over (0, inf).
///
/// Throws DomainError when the product does not vanish fast enough at
/// alpha = 0 to be integrable, AccuracyError when the adaptive rule runs out
/// of subdivisions.
IntegralResult kernel_integral(const KernelIntegrand& k, const QuadratureSpec& q = {});

/// J_p = (1/Gamma(p)) int_0^inf alpha^{p-1} e^{-alpha} (1-e^{-alpha})^{-2},
/// by quadrature. p > 2.
double jp_threshold(double p, const QuadratureSpec& q = {});

}  // namespace antiphase

#endif  // ANTIPHASE_SPECFUN_HPP
