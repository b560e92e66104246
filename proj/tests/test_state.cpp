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
#include <random>

#include "antiphase/errors.hpp"
#include "antiphase/state.hpp"
#include "doctest.h"

using namespace antiphase;

namespace {

SpinState from_bits(unsigned bits, int n) {
  std::vector<int> s(n);
  for (int i = 0; i < n; ++i) s[i] = (bits >> i) & 1u ? 1 : -1;
  return SpinState(s);
}

// Brute-force canonical sequence: every rotation/reflection/flip image that
// starts on a plus block boundary, read off as run lengths; keep the largest.
std::vector<int> brute_canonical(const SpinState& s) {
  const int n = s.n_sites();
  std::vector<int> best;
  for (int refl = 0; refl < 2; ++refl)
    for (int flip = 0; flip < 2; ++flip)
      for (int k = 0; k < n; ++k) {
        std::vector<int> u(n);
        for (int i = 0; i < n; ++i) {
          const int src = refl ? n - 1 - i : i;
          u[i] = (flip ? -1 : 1) * s.at(src + k);
        }
        const bool constant = std::all_of(u.begin(), u.end(), [&](int v) { return v == u[0]; });
        if (u[0] != 1) continue;
        if (!constant && u[n - 1] == u[0]) continue;
        std::vector<int> runs;
        int len = 1;
        for (int i = 1; i < n; ++i) {
          if (u[i] == u[i - 1]) {
            ++len;
          } else {
            runs.push_back(len);
            len = 1;
          }
        }
        runs.push_back(len);
        best = std::max(best, runs);
      }
  return best;
}

}  // namespace

TEST_CASE("spin state text round trip and errors") {
  const auto s = SpinState::parse("++--+--+");
  CHECK(s.n_sites() == 8);
  CHECK(s.to_string() == "++--+--+");
  CHECK_THROWS_AS(SpinState::parse("++x-"), ParseError);
  CHECK_THROWS_AS(SpinState::parse(""), ParseError);
  CHECK_THROWS_AS(SpinState(std::vector<int>{1, 0}), ValidationError);
}

TEST_CASE("block array parsing and validation") {
  const auto b = BlockArray::parse("+3,-2,+1,-2");
  CHECK(b.first_sign == 1);
  CHECK(b.lengths == std::vector<int>{3, 2, 1, 2});
  CHECK(b.to_string() == "+3,-2,+1,-2");
  CHECK(b.to_state().to_string() == "+++--+--");
  CHECK_THROWS_AS(BlockArray::parse("+3,+2"), ParseError);
  CHECK_THROWS_AS(BlockArray::parse("3,-2"), ParseError);
  CHECK_THROWS_AS(BlockArray::parse("+3,-2,+1"), ParseError);
  CHECK_THROWS_AS(BlockArray::parse("+0,-2"), ParseError);
  CHECK_THROWS_AS(BlockArray(1, {2, 2, 2}), ValidationError);
  CHECK_NOTHROW(BlockArray(-1, {5}));
}

TEST_CASE("eight-site worked example") {
  const auto s = SpinState::parse("++--+--+");
  const auto c = to_blocks(s);
  CHECK(c.blocks.lengths == std::vector<int>{3, 2, 1, 2});
  CHECK(c.blocks.first_sign == 1);
  CHECK(c.translation == 1);
  CHECK_FALSE(c.reflected);
  CHECK_FALSE(c.flipped);
  CHECK(from_blocks(c) == s);
  // sigma_i = sigma0_{i + 1}
  const auto s0 = c.blocks.to_state();
  CHECK(s0.to_string() == "+++--+--");
  for (int i = 0; i < 8; ++i) CHECK(s[i] == s0.at(i + 1));
}

TEST_CASE("trivial canonical forms") {
  auto c = to_blocks(SpinState::constant(5));
  CHECK(c.blocks.lengths == std::vector<int>{5});
  CHECK(c.translation == 0);
  c = to_blocks(SpinState::constant(5, -1));
  CHECK(c.blocks.lengths == std::vector<int>{5});
  CHECK(c.flipped);
  CHECK(from_blocks(c) == SpinState::constant(5, -1));
  c = to_blocks(SpinState::parse("+-+-+-"));
  CHECK(c.blocks.lengths == std::vector<int>(6, 1));
  CHECK(from_blocks(CanonicalForm{BlockArray(1, {3, 3}), 0, false, false}) == SpinState::stripe(3, 6));
  CanonicalForm bad;
  bad.blocks.lengths = {2, 2, 2};
  CHECK_THROWS_AS(from_blocks(bad), ValidationError);
}

TEST_CASE("round trip is exact for every state up to 14 sites") {
  for (int n = 1; n <= 14; ++n) {
    for (unsigned bits = 0; bits < (1u << n); ++bits) {
      const auto s = from_bits(bits, n);
      const auto c = to_blocks(s);
      REQUIRE(from_blocks(c) == s);
      REQUIRE(c.blocks.n_sites() == n);
      REQUIRE(to_blocks(from_blocks(c)).blocks == c.blocks);
    }
  }
}

TEST_CASE("canonical blocks agree with a brute-force search and are symmetry invariant") {
  for (int n = 1; n <= 11; ++n) {
    for (unsigned bits = 0; bits < (1u << n); ++bits) {
      const auto s = from_bits(bits, n);
      const auto c = to_blocks(s);
      REQUIRE(c.blocks.lengths == brute_canonical(s));
      for (int k = 1; k < n; ++k) REQUIRE(to_blocks(s.rotated(k)).blocks == c.blocks);
      REQUIRE(to_blocks(s.reflected()).blocks == c.blocks);
      REQUIRE(to_blocks(s.flipped()).blocks == c.blocks);
    }
  }
}

TEST_CASE("decomposition of a pure stripe") {
  const auto d = decompose_defects(SpinState::stripe(2, 12), 2);
  CHECK(d.defects.empty());
  REQUIRE(d.runs.size() == 1);
  CHECK(d.runs[0] == PeriodicRun{0, 6});
  const auto r = phase_function(d);
  CHECK(r.pieces().size() == 1);
  CHECK(r.value_at(0.5) == 0);

  const auto shifted = decompose_defects(SpinState::stripe(2, 12, 3), 2);
  REQUIRE(shifted.runs.size() == 1);
  CHECK(shifted.runs[0].start == 3);
  CHECK(phase_function(shifted) == PhaseFunction::constant(4, 3));
}

TEST_CASE("decomposition with two irregular blocks on 20 sites") {
  // (h+1, h-1, h, ..., h) with h = 2
  const auto s = BlockArray(1, {3, 1, 2, 2, 2, 2, 2, 2, 2, 2}).to_state();
  const auto d = decompose_defects(s, 2);
  REQUIRE(d.defects.size() == 1);
  REQUIRE(d.runs.size() == 1);
  CHECK(d.defects[0].start == 0);
  CHECK(d.defects[0].blocks == Fragment{1, {3, 1}});
  CHECK(d.runs[0] == PeriodicRun{4, 8});
  CHECK(d.defect_sites() + d.run_sites() == 20);
}

TEST_CASE("stray reference blocks are absorbed into the defect") {
  // +2 -2 +2 -3 +2 -1: the third +2 cannot complete a plus-first pair.
  const auto s = BlockArray(1, {2, 2, 2, 3, 2, 1}).to_state();
  const auto d = decompose_defects(s, 2);
  REQUIRE(d.runs.size() == 1);
  CHECK(d.runs[0] == PeriodicRun{0, 2});
  REQUIRE(d.defects.size() == 1);
  CHECK(d.defects[0].start == 4);
  CHECK(d.defects[0].blocks == Fragment{1, {2, 3, 2, 1}});
}

TEST_CASE("eight-site example has no run of 2-blocks") {
  const auto d = decompose_defects(SpinState::parse("++--+--+"), 2);
  CHECK(d.runs.empty());
  REQUIRE(d.defects.size() == 1);
  CHECK(d.defects[0].start == 2);
  CHECK(d.defects[0].blocks == Fragment{-1, {2, 1, 2, 3}});
  CHECK(d.translation == 1);
  // with h_ref = 1 the isolated +1 is a single block, also too short to pair
  const auto d1 = decompose_defects(SpinState::parse("++--+--+"), 1);
  CHECK(d1.runs.empty());
}

TEST_CASE("constant state is a single defect") {
  const auto d = decompose_defects(SpinState::constant(6), 3);
  CHECK(d.runs.empty());
  REQUIRE(d.defects.size() == 1);
  CHECK(d.defects[0].blocks.lengths == std::vector<int>{6});
}

TEST_CASE("single defect gives one jump of its length") {
  // 8-site stripe, defect +3,-2 (5 sites), 8-site stripe; h = 2.
  std::vector<int> lengths = {2, 2, 2, 2, 3, 2, 2, 2, 2, 2};
  const auto s = BlockArray(1, lengths).to_state();
  REQUIRE(s.n_sites() == 21);
  const auto d = decompose_defects(s, 2);
  REQUIRE(d.runs.size() == 1);
  // The -2 after the +3 is glued to the run that wraps, so the run starts
  // at the second stripe's first plus block.
  CHECK(d.runs[0] == PeriodicRun{13, 8});
  CHECK(d.defects[0].blocks == Fragment{1, {3, 2}});
  const auto r = phase_function(d);
  const auto jumps = r.jumps();
  REQUIRE(jumps.size() == 1);
  CHECK(jumps[0].size == 5 % 4);
  CHECK(jumps[0].x == doctest::Approx(13.0 / 21.0));
  CHECK(r.value_at(0.1) == 0);
}

TEST_CASE("two defects of lengths j and 2h - j cancel") {
  // h = 3: defect +4,-3 (7 = 1 mod 6) and defect +2,-3 (5 = -1 mod 6).
  std::vector<int> lengths;
  auto pure = [&](int pairs) {
    for (int i = 0; i < 2 * pairs; ++i) lengths.push_back(3);
  };
  pure(3);
  lengths.insert(lengths.end(), {4, 3});
  pure(3);
  lengths.insert(lengths.end(), {2, 3});
  pure(2);
  const auto s = BlockArray(1, lengths).to_state();
  const auto d = decompose_defects(s, 3);
  CHECK(d.defects.size() == 2);
  const auto r = phase_function(d);
  CHECK(r.winding() == 0);
  CHECK(r.winding() == s.n_sites() % 6);
  CHECK(r.jumps().size() == 2);
}

TEST_CASE("decomposition conservation and winding consistency on random states") {
  std::mt19937 rng(20261016);
  for (int trial = 0; trial < 3000; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 48);
    const int h = 1 + static_cast<int>(rng() % 4);
    // random stripe background with random flips, so runs actually occur
    std::vector<int> sp(n);
    const int offset = static_cast<int>(rng() % (2 * h));
    for (int i = 0; i < n; ++i) sp[i] = ((i + offset) / h) % 2 ? -1 : 1;
    const int flips = static_cast<int>(rng() % 4);
    for (int f = 0; f < flips; ++f) sp[rng() % n] *= -1;
    const SpinState s(sp);
    const auto d = decompose_defects(s, h);
    REQUIRE(d.defect_sites() + d.run_sites() == n);
    REQUIRE(d.runs.size() <= std::max<std::size_t>(d.defects.size(), 1));
    for (const auto& run : d.runs) {
      REQUIRE(run.n_blocks % 2 == 0);
      REQUIRE(s[run.start] == 1);
      for (int k = 0; k < run.n_blocks * h; ++k) REQUIRE(s.at(run.start + k) == (((k / h) % 2) ? -1 : 1));
    }
    for (const auto& def : d.defects) {
      int site = def.start;
      int sign = def.blocks.first_sign;
      for (int len : def.blocks.lengths) {
        for (int k = 0; k < len; ++k) REQUIRE(s.at(site + k) == sign);
        site += len;
        sign = -sign;
      }
    }
    const auto r = phase_function(d);
    INFO(s.to_string(), " h=", h, " r=", r.to_string());
    REQUIRE(r.winding() == n % (2 * h));
    REQUIRE(r.breakpoints().size() <= std::max<std::size_t>(d.defects.size(), 1));
  }
}

TEST_CASE("decomposition does not depend on where the torus is cut") {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 8 + static_cast<int>(rng() % 30);
    const int h = 1 + static_cast<int>(rng() % 3);
    std::vector<int> sp(n);
    for (int i = 0; i < n; ++i) sp[i] = (i / h) % 2 ? -1 : 1;
    sp[rng() % n] *= -1;
    const SpinState s(sp);
    const int k = static_cast<int>(rng() % n);
    const auto a = decompose_defects(s, h);
    const auto b = decompose_defects(s.rotated(k), h);
    REQUIRE(a.runs.size() == b.runs.size());
    REQUIRE(a.defects.size() == b.defects.size());
    std::vector<int> la, lb;
    for (const auto& r : a.runs) la.push_back(r.n_blocks);
    for (const auto& r : b.runs) lb.push_back(r.n_blocks);
    std::sort(la.begin(), la.end());
    std::sort(lb.begin(), lb.end());
    REQUIRE(la == lb);
  }
}

TEST_CASE("phase function text format, merging and rotation") {
  const auto r = PhaseFunction::parse("0:0.25;0:0.5;3:1.0", 4);
  CHECK(r.pieces().size() == 2);
  CHECK(r.to_string() == "0:0.5;3:1");
  CHECK(r.winding() == 3);
  CHECK(r.jumps().size() == 1);
  CHECK(r.value_at(0.5) == 0);
  CHECK(r.value_at(0.75) == 3);
  CHECK_THROWS_AS(PhaseFunction::parse("0:0.5;3:0.9", 4), ParseError);
  CHECK_THROWS_AS(PhaseFunction::parse("0:0.5;4:1", 4), ParseError);
  CHECK_THROWS_AS(PhaseFunction::parse("0;1", 4), ParseError);
  CHECK_THROWS_AS(PhaseFunction(3, {{0, 1.0}}), ValidationError);

  const auto two = PhaseFunction::parse("0:0.3;1:0.7;0:1", 2);
  CHECK(two.winding() == 0);
  const auto rot = two.rotated(0.5);
  CHECK(rot.winding() == 0);
  REQUIRE(rot.jumps().size() == 2);
  CHECK(rot.jumps()[0].x == doctest::Approx(0.2));
  CHECK(rot.jumps()[1].x == doctest::Approx(0.8));
  CHECK_THROWS_AS(two.rotated(0.3), DomainError);

  // a winding function keeps its jump sizes under rotation
  const auto w = PhaseFunction::parse("0:0.4;1:1", 2);
  const auto wr = w.rotated(0.8);
  REQUIRE(wr.jumps().size() == 1);
  CHECK(wr.jumps()[0].size == 1);
  CHECK(wr.jumps()[0].x == doctest::Approx(0.2));
  CHECK(wr.winding() == 1);
}
