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

#ifndef ANTIPHASE_STATE_HPP
#define ANTIPHASE_STATE_HPP

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace antiphase {

/// Spin configuration on the discrete torus Z/NZ.
///
/// Sites are 0-based: site k here is site k+1 in the 1-based convention.
class SpinState {
 public:
  SpinState() = default;
  explicit SpinState(std::vector<int> spins);

  // "++--+--+"
  static SpinState parse(std::string_view text);
  static SpinState constant(int n_sites, int sign = +1);
  // Blocks (h, h) repeated; plus block starts at `offset`.
  static SpinState stripe(int h, int n_sites, int offset = 0);

  int n_sites() const { return static_cast<int>(spins_.size()); }
  const std::vector<int>& spins() const { return spins_; }
  // Periodic access.
  int at(std::int64_t i) const;
  int operator[](int i) const { return spins_[i]; }

  // s'_i = s_{i+k}
  SpinState rotated(std::int64_t k) const;
  // s'_i = s_{N-1-i}
  SpinState reflected() const;
  SpinState flipped() const;

  std::string to_string() const;

  bool operator==(const SpinState& other) const = default;

 private:
  std::vector<int> spins_;
};

/// Run-length encoding with alternating signs, read cyclically.
struct BlockArray {
  int first_sign = +1;
  std::vector<int> lengths;

  BlockArray() = default;
  // Throws ValidationError on nonpositive lengths, |first_sign| != 1,
  // or an odd number of blocks larger than one.
  BlockArray(int first_sign, std::vector<int> lengths);

  // "+3,-2,+1,-2"
  static BlockArray parse(std::string_view text);

  int n_sites() const;
  int n_blocks() const { return static_cast<int>(lengths.size()); }
  std::string to_string() const;
  // First block starts at site 0.
  SpinState to_state() const;

  bool operator==(const BlockArray& other) const = default;
};

/// Canonical representative of the orbit of a state under rotation,
/// reflection and global flip.
///
/// The original state is s_i = f * c_{(tau + i) mod N}, or
/// s_i = f * c_{(tau - i) mod N} when `reflected`, where c = blocks.to_state()
/// and f = -1 when `flipped`.
struct CanonicalForm {
  BlockArray blocks;
  int translation = 0;
  bool reflected = false;
  bool flipped = false;

  bool operator==(const CanonicalForm& other) const = default;
};

CanonicalForm to_blocks(const SpinState& s);
SpinState from_blocks(const CanonicalForm& c);

// Maximal runs of equal spins, sorted by start site. A run crossing the
// cut keeps its start near N. Constant states give one run starting at 0.
struct RawBlock {
  int start;
  int length;
  int sign;
};
std::vector<RawBlock> raw_blocks(const SpinState& s);

/// Open block sequence (no parity constraint); used for defects.
struct Fragment {
  int first_sign = +1;
  std::vector<int> lengths;

  // Same text as BlockArray; the empty string is the empty fragment.
  static Fragment parse(std::string_view text);

  int n_sites() const;
  int n_blocks() const { return static_cast<int>(lengths.size()); }
  std::string to_string() const;
  bool operator==(const Fragment& other) const = default;
};

/// M blocks of length h_ref beginning with a plus block at site `start`.
struct PeriodicRun {
  int start = 0;
  int n_blocks = 0;
  bool operator==(const PeriodicRun& other) const = default;
};

struct DefectSegment {
  int start = 0;
  Fragment blocks;
  bool operator==(const DefectSegment& other) const = default;
};

/// Cyclic alternation D_1 G_1 D_2 G_2 ... D_S G_S, where D_i ends where G_i
/// starts.
///
/// S = 0 (pure periodic state): `defects` is empty and `runs` has a single
/// entry. A state without any run has one defect covering every site and no
/// runs.
struct DefectDecomposition {
  int h_ref = 1;
  int n_sites = 0;
  std::vector<DefectSegment> defects;
  std::vector<PeriodicRun> runs;
  // Translation of the canonical form of the decomposed state.
  int translation = 0;

  int defect_sites() const;
  int run_sites() const;
};

DefectDecomposition decompose_defects(const SpinState& s, int h_ref);

/// Piecewise constant r: (0,1] -> Z / modulus Z.
///
/// Stored as (value, right endpoint) pieces; the last right endpoint is 1.
/// Values are labels of a lifted phase: going once around the torus adds
/// the winding, so the cut at 0 = 1 is never a jump. Equal adjacent values
/// are merged on construction.
class PhaseFunction {
 public:
  struct Piece {
    int value;
    double right;
    bool operator==(const Piece& other) const = default;
  };
  struct Jump {
    double x;
    int size;  // in [1, modulus)
  };

  PhaseFunction() = default;
  // Throws ValidationError unless modulus is even and positive, endpoints
  // strictly increase in (0,1] and end at 1.
  PhaseFunction(int modulus, std::vector<Piece> pieces);

  static PhaseFunction constant(int modulus, int value);
  // "0:0.5;3:1.0"
  static PhaseFunction parse(std::string_view text, int modulus);

  int modulus() const { return modulus_; }
  const std::vector<Piece>& pieces() const { return pieces_; }
  std::vector<double> breakpoints() const;
  std::vector<Jump> jumps() const;
  // Sum of jump sizes mod modulus.
  int winding() const;
  // Value on the piece containing x in (0,1].
  int value_at(double x) const;
  // r'(y) = r(y - t), continued through the cut with the winding. Throws
  // DomainError if a breakpoint would land on the cut.
  PhaseFunction rotated(double t) const;

  std::string to_string() const;

  bool operator==(const PhaseFunction& other) const = default;

 private:
  int modulus_ = 2;
  std::vector<Piece> pieces_;
};

PhaseFunction phase_function(const DefectDecomposition& d);

}  // namespace antiphase

#endif  // ANTIPHASE_STATE_HPP
