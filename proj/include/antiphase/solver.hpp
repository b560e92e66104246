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

#ifndef ANTIPHASE_SOLVER_HPP
#define ANTIPHASE_SOLVER_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "antiphase/energy.hpp"
#include "antiphase/state.hpp"

namespace antiphase {

struct SolverConfig {
  int exhaustive_cap = 28;
  int threads = 1;  // 0: all hardware threads
};

/// Calls visit once per class of states on N sites under rotation,
/// reflection and global flip, with its canonical block array, in a fixed
/// order. Throws CapError above `cap`.
void enumerate_canonical(int N, const std::function<void(const BlockArray&)>& visit, int cap = 28);
std::vector<BlockArray> canonical_classes(int N, int cap = 28);

enum class SearchMethod { exhaustive, branch_and_bound };
std::string to_string(SearchMethod m);

struct ClassEnergy {
  BlockArray blocks;
  double energy = 0.0;
};

struct GroundStateResult {
  CanonicalForm state;
  double energy = 0.0;
  SearchMethod method = SearchMethod::exhaustive;
  std::uint64_t nodes_explored = 0;
  bool certified = false;
  // Every class within the tie tolerance of the minimum, lexicographically
  // smallest first; `state` is the first of them.
  std::vector<BlockArray> minimizers;
  // Lowest energy strictly above the tie window (exhaustive only).
  std::optional<double> second_energy;
};

// |E - E'| <= tie_tolerance(E) counts as a tie.
double tie_tolerance(double energy);

/// The `count` lowest-energy classes on N sites, ordered by energy and then
/// lexicographically. Exhaustive; deterministic for any worker count.
std::vector<ClassEnergy> lowest_classes(int N, const ModelParams& m, std::size_t count, const SolverConfig& cfg = {},
                                        std::uint64_t* nodes = nullptr);

GroundStateResult ground_state_exact(int N, const ModelParams& m, const SolverConfig& cfg = {});

struct BnbConfig {
  int h_max = 0;             // largest block length searched; 0 means N
  double c_inflation = 10.0;
  // Lower-bound constant is fitted and the search validated on every N up
  // to this size.
  int exhaustive_cap = 16;
  std::optional<double> c_override;  // skip fitting (never certified)
  bool require_certified = false;
  std::uint64_t node_limit = 50'000'000;
  std::ostream* log = nullptr;  // JSON lines {node, bound, incumbent}
  int threads = 1;              // used by the validation runs only
};

/// Fitted constant c in E_N >= sum_mu h_mu e(h_mu) - c N^{-p} over every
/// class with N <= cap (not inflated).
double fit_lower_bound_constant(const ModelParams& m, int cap, const SolverConfig& cfg = {});

GroundStateResult ground_state_bnb(int N, const ModelParams& m, const StripeGroundState& g,
                                   const BnbConfig& cfg = {});

struct GapEstimate {
  std::vector<int> n_values;
  std::vector<double> gaps;  // second lowest minus lowest, per N
  double delta = 0.0;
  double delta_tilde = 0.0;
  int k0_estimate = 0;
};

/// Exhaustive gap above the stripe ground state at N = 2 h* K.
GapEstimate energy_gap(const ModelParams& m, const StripeGroundState& g, const std::vector<int>& K_list,
                       const SolverConfig& cfg = {});

}  // namespace antiphase

#endif  // ANTIPHASE_SOLVER_HPP
