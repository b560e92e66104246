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

#ifndef ANTIPHASE_GAMMA_HPP
#define ANTIPHASE_GAMMA_HPP

#include <string>
#include <utility>
#include <vector>

#include "antiphase/phi.hpp"
#include "antiphase/state.hpp"

namespace antiphase {

/// Value of the limit functional: a real with an error bound, or +infinity.
struct GammaValue {
  bool finite = true;
  double value = 0.0;
  double error_bound = 0.0;

  static GammaValue infinity() { return GammaValue{false, 0.0, 0.0}; }
  // Shortest round-trip decimal, or "inf".
  std::string to_string() const;
};

/// Sum of phi over the jumps of r when the jumps add up to j modulo 2h*,
/// +infinity otherwise. `phi_table` needs one estimate per residue.
GammaValue gamma_energy(const PhaseFunction& r, int j, const std::vector<PhiEstimate>& phi_table);

/// A state on N sites whose phase function follows r: near each jump x_k N
/// it places the minimizing defect of winding r's jump size, recorded at
/// the largest K of the table, separated by whole 2h*-periods of stripe.
/// Throws DomainError if the functional is infinite, N is not j mod 2h*,
/// or N is too small to keep every stripe run at least two periods long
/// (the message names the smallest N that works).
SpinState recovery_sequence(const PhaseFunction& r, int j, int N, const ModelParams& m, const StripeGroundState& g,
                            const std::vector<PhiEstimate>& phi_table);

/// True iff every state in the larger half of the sequence (by N) has a
/// phase function equal to r at every site farther than eps from r's jumps.
/// N must increase strictly; eps must be below half the smallest gap
/// between jumps (DomainError otherwise).
bool check_convergence(const std::vector<std::pair<int, SpinState>>& states, const PhaseFunction& r, double eps,
                       int h_star);

}  // namespace antiphase

#endif  // ANTIPHASE_GAMMA_HPP
