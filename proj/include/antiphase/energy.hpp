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

#ifndef ANTIPHASE_ENERGY_HPP
#define ANTIPHASE_ENERGY_HPP

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "antiphase/specfun.hpp"
#include "antiphase/state.hpp"

namespace antiphase {

struct ModelParams {
  double p = 2.0;
  double J = 1.0;
  QuadratureSpec quad;
  double tail_tol = 1e-12;

  // Throws ValidationError unless p > 1, J > 0 and tolerances are positive.
  void validate() const;
};

struct EnergyBreakdown {
  double ferro = 0.0;
  double antiferro = 0.0;  // includes the wrapped self-image constant
  double total = 0.0;
  double error_bound = 0.0;
};

enum class KernelPath { hurwitz, truncated };

/// Periodized power law sum_{n in Z} |d + nN|^{-p}, without the n = 0 term
/// when d = 0. 0 <= d < N.
///
/// The truncated path sums |n| <= n_max directly and adds a midpoint-rule
/// tail; it is kept as an independent check of the Hurwitz path.
double wrapped_kernel(std::int64_t N, std::int64_t d, double p, KernelPath path = KernelPath::hurwitz);

/// Reference energy: every ordered site pair through the wrapped kernel.
EnergyBreakdown energy_direct(const SpinState& s, const ModelParams& m);

/// Energy from the block lengths alone, via the Laplace-transform closed
/// forms for block pairs (one quadrature per distinct pair geometry).
///
/// Runs of at least 8 consecutive equal blocks are summed with the run
/// closed forms instead of pair by pair.
EnergyBreakdown energy_blocks(const BlockArray& c, const ModelParams& m);

/// Same value from a prefix-summed kernel table; O(M^2) in the number of
/// blocks with no quadrature. The fast path for searches.
EnergyBreakdown energy_fast(const BlockArray& c, const ModelParams& m);

// Unsigned interaction of two distinct blocks of lengths h_mu, h_nu separated
// by d sites one way round and d2 = N - h_mu - h_nu - d the other way.
// This is half of the ordered site-pair energy between the two blocks.
double block_pair_af(std::int64_t h_mu, std::int64_t h_nu, std::int64_t d, std::int64_t N, const ModelParams& m);

// Half of the ordered site-pair energy inside one block of length h,
// including its periodic images.
double block_self_af(std::int64_t h, std::int64_t N, const ModelParams& m);

// sum_{1 <= k < h} (h - k) k^{-p}
double in_block_sum(std::int64_t h, double p);

/// A run of alternating blocks of equal length, first block at `origin`.
struct Run {
  std::int64_t n_blocks = 1;
  std::int64_t origin = 0;
  int first_sign = +1;
};

/// Signed sum of block_pair_af over all block pairs (mu in run_i, nu in
/// run_j). Both runs have block length h. Throws DomainError if the runs
/// overlap on the torus.
double run_pair_af(const Run& run_i, const Run& run_j, std::int64_t h, std::int64_t N, const ModelParams& m);

/// Signed sum of block_pair_af over the unordered block pairs inside one
/// run of M >= 2 blocks of length h on an N-site torus.
double run_self_af(std::int64_t M, std::int64_t h, std::int64_t N, const ModelParams& m);

/// e(h) = E_{2h}(h, h) / 2h
double energy_per_site(std::int64_t h, const ModelParams& m);

enum class Uniqueness { unique, tie_with_next, decreasing_regime };
std::string to_string(Uniqueness u);

struct StripeGroundState {
  int h_star = 1;
  double e_star = 0.0;
  std::vector<double> e_curve;  // e_curve[h - 1] = e(h)
  Uniqueness uniqueness = Uniqueness::unique;

  // Throws PreconditionError unless uniqueness == unique.
  void require_unique() const;
};

/// Scans e(1..h_max).
///
/// Flags decreasing_regime when p > 2 and J > 2 J_p (the threshold in this
/// energy normalization). Throws InconclusiveError if the minimum sits at
/// h_max outside that regime.
StripeGroundState find_hstar(const ModelParams& m, int h_max);

/// F_N = E_N - N e(h*).
double renormalized(const BlockArray& c, const ModelParams& m, const StripeGroundState& g);
// Same through energy_fast.
double renormalized_fast(const BlockArray& c, const ModelParams& m, const StripeGroundState& g);

/// Wrapped kernel K[d], d in [0, N), with double prefix sums so that the
/// interaction of any two blocks costs O(1).
class KernelTable {
 public:
  KernelTable(double p, std::int64_t N);

  // Shared instance per (p, N); thread safe.
  static std::shared_ptr<const KernelTable> get(double p, std::int64_t N);

  double p() const { return p_; }
  std::int64_t n_sites() const { return n_; }
  double kernel(std::int64_t d) const { return k_[d]; }

  // sum_{i < h_mu, j < h_nu} K((delta + j - i) mod N), with delta the start
  // of block nu minus the start of block mu.
  double block_sum(std::int64_t delta, std::int64_t h_mu, std::int64_t h_nu) const;

  // Antiferromagnetic energy of the state with these blocks, first block
  // starting at site 0.
  double antiferro(int first_sign, const std::vector<int>& lengths) const;

  // Error bound on one block_sum.
  double block_error() const { return block_err_; }

 private:
  double p_;
  std::int64_t n_;
  double mean_;
  std::vector<double> k_;
  std::vector<long double> p2_;  // second prefix sums of K - mean over 3N + 1 entries
  double block_err_ = 0.0;
};

}  // namespace antiphase

#endif  // ANTIPHASE_ENERGY_HPP
