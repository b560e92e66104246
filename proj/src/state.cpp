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

#include "antiphase/state.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <tuple>

#include "antiphase/errors.hpp"

namespace antiphase {

namespace {

std::int64_t pmod(std::int64_t a, std::int64_t n) {
  const std::int64_t r = a % n;
  return r < 0 ? r + n : r;
}

std::string shortest(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const auto next = s.find(sep, pos);
    out.push_back(s.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------- SpinState

SpinState::SpinState(std::vector<int> spins) : spins_(std::move(spins)) {
  if (spins_.empty()) throw ValidationError("SpinState: need at least one site");
  for (int v : spins_)
    if (v != 1 && v != -1) throw ValidationError("SpinState: spins must be +1 or -1");
}

SpinState SpinState::parse(std::string_view text) {
  text = trim(text);
  std::vector<int> spins;
  spins.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '+')
      spins.push_back(1);
    else if (text[i] == '-')
      spins.push_back(-1);
    else
      throw ParseError("spin state: expected '+' or '-' at position " + std::to_string(i),
                       std::string(1, text[i]));
  }
  if (spins.empty()) throw ParseError("spin state: empty", "");
  return SpinState(std::move(spins));
}

SpinState SpinState::constant(int n_sites, int sign) {
  if (n_sites < 1) throw ValidationError("SpinState::constant: n_sites must be positive");
  return SpinState(std::vector<int>(n_sites, sign));
}

SpinState SpinState::stripe(int h, int n_sites, int offset) {
  if (h < 1 || n_sites < 1) throw ValidationError("SpinState::stripe: h and n_sites must be positive");
  std::vector<int> spins(n_sites);
  for (int i = 0; i < n_sites; ++i) spins[i] = pmod(i - offset, 2 * h) < h ? 1 : -1;
  return SpinState(std::move(spins));
}

int SpinState::at(std::int64_t i) const { return spins_[pmod(i, n_sites())]; }

SpinState SpinState::rotated(std::int64_t k) const {
  std::vector<int> out(spins_.size());
  for (int i = 0; i < n_sites(); ++i) out[i] = at(i + k);
  return SpinState(std::move(out));
}

SpinState SpinState::reflected() const {
  return SpinState(std::vector<int>(spins_.rbegin(), spins_.rend()));
}

SpinState SpinState::flipped() const {
  std::vector<int> out(spins_);
  for (int& v : out) v = -v;
  return SpinState(std::move(out));
}

std::string SpinState::to_string() const {
  std::string out;
  out.reserve(spins_.size());
  for (int v : spins_) out.push_back(v > 0 ? '+' : '-');
  return out;
}

// --------------------------------------------------------------- BlockArray

BlockArray::BlockArray(int first_sign_, std::vector<int> lengths_)
    : first_sign(first_sign_), lengths(std::move(lengths_)) {
  if (first_sign != 1 && first_sign != -1) throw ValidationError("BlockArray: first_sign must be +1 or -1");
  if (lengths.empty()) throw ValidationError("BlockArray: no blocks");
  for (int h : lengths)
    if (h < 1) throw ValidationError("BlockArray: block lengths must be positive");
  if (lengths.size() > 1 && lengths.size() % 2 != 0)
    throw ValidationError("BlockArray: a periodic state with more than one block has an even number of blocks, got " +
                          std::to_string(lengths.size()));
}

namespace {

// "+3,-2,+1" -> sign of the first entry and the lengths; signs must alternate.
void parse_signed_lengths(std::string_view text, const char* what, int& first_sign, std::vector<int>& lengths) {
  int expected = 0;
  first_sign = 0;
  for (auto tok : split(text, ',')) {
    tok = trim(tok);
    if (tok.size() < 2 || (tok[0] != '+' && tok[0] != '-'))
      throw ParseError(std::string(what) + ": each entry needs an explicit sign, e.g. +3", std::string(tok));
    const int sign = tok[0] == '+' ? 1 : -1;
    int len = 0;
    auto res = std::from_chars(tok.data() + 1, tok.data() + tok.size(), len);
    if (res.ec != std::errc() || res.ptr != tok.data() + tok.size() || len < 1)
      throw ParseError(std::string(what) + ": bad length", std::string(tok));
    if (first_sign == 0) {
      first_sign = sign;
    } else if (sign != expected) {
      throw ParseError(std::string(what) + ": signs must alternate", std::string(tok));
    }
    expected = -sign;
    lengths.push_back(len);
  }
}

}  // namespace

BlockArray BlockArray::parse(std::string_view text) {
  text = trim(text);
  if (text.empty()) throw ParseError("block array: empty", "");
  std::vector<int> lengths;
  int first_sign = 0;
  parse_signed_lengths(text, "block array", first_sign, lengths);
  try {
    return BlockArray(first_sign, std::move(lengths));
  } catch (const ValidationError& e) {
    throw ParseError(e.what(), std::string(text));
  }
}

int BlockArray::n_sites() const { return std::accumulate(lengths.begin(), lengths.end(), 0); }

std::string BlockArray::to_string() const {
  std::string out;
  int sign = first_sign;
  for (std::size_t i = 0; i < lengths.size(); ++i) {
    if (i) out.push_back(',');
    out.push_back(sign > 0 ? '+' : '-');
    out += std::to_string(lengths[i]);
    sign = -sign;
  }
  return out;
}

SpinState BlockArray::to_state() const {
  std::vector<int> spins;
  spins.reserve(n_sites());
  int sign = first_sign;
  for (int h : lengths) {
    spins.insert(spins.end(), h, sign);
    sign = -sign;
  }
  return SpinState(std::move(spins));
}

// ------------------------------------------------------------ canonical form

std::vector<RawBlock> raw_blocks(const SpinState& s) {
  const int n = s.n_sites();
  std::vector<int> starts;
  for (int i = 0; i < n; ++i)
    if (s[i] != s.at(i - 1)) starts.push_back(i);
  if (starts.empty()) return {RawBlock{0, n, s[0]}};
  std::vector<RawBlock> out;
  out.reserve(starts.size());
  for (std::size_t k = 0; k < starts.size(); ++k) {
    const int next = k + 1 < starts.size() ? starts[k + 1] : starts[0] + n;
    out.push_back(RawBlock{starts[k], next - starts[k], s[starts[k]]});
  }
  return out;
}

CanonicalForm to_blocks(const SpinState& s) {
  const int n = s.n_sites();
  std::vector<int> best;
  CanonicalForm out;
  bool have = false;
  for (int refl = 0; refl < 2; ++refl) {
    for (int flip = 0; flip < 2; ++flip) {
      SpinState u = refl ? s.reflected() : s;
      if (flip) u = u.flipped();
      const auto blocks = raw_blocks(u);
      const std::size_t m = blocks.size();
      for (std::size_t b = 0; b < m; ++b) {
        if (blocks[b].sign != 1) continue;
        std::vector<int> seq(m);
        for (std::size_t k = 0; k < m; ++k) seq[k] = blocks[(b + k) % m].length;
        const int tau = static_cast<int>(refl ? pmod(n - 1 - blocks[b].start, n) : pmod(-blocks[b].start, n));
        // Largest sequence first; then smallest translation, unreflected, unflipped.
        bool take = !have || seq > best;
        if (have && seq == best)
          take = std::make_tuple(tau, refl, flip) <
                 std::make_tuple(out.translation, static_cast<int>(out.reflected), static_cast<int>(out.flipped));
        if (take) {
          best = seq;
          out.translation = tau;
          out.reflected = refl;
          out.flipped = flip;
          have = true;
        }
      }
    }
  }
  out.blocks = BlockArray(1, best);
  return out;
}

SpinState from_blocks(const CanonicalForm& c) {
  const BlockArray checked(c.blocks.first_sign, c.blocks.lengths);
  const SpinState base = checked.to_state();
  const int n = base.n_sites();
  const int f = c.flipped ? -1 : 1;
  std::vector<int> spins(n);
  for (int i = 0; i < n; ++i)
    spins[i] = f * base.at(c.reflected ? static_cast<std::int64_t>(c.translation) - i
                                       : static_cast<std::int64_t>(c.translation) + i);
  return SpinState(std::move(spins));
}

// ----------------------------------------------------------------- defects

Fragment Fragment::parse(std::string_view text) {
  text = trim(text);
  Fragment f;
  if (text.empty()) return f;
  parse_signed_lengths(text, "fragment", f.first_sign, f.lengths);
  return f;
}

int Fragment::n_sites() const { return std::accumulate(lengths.begin(), lengths.end(), 0); }

std::string Fragment::to_string() const {
  std::string out;
  int sign = first_sign;
  for (std::size_t i = 0; i < lengths.size(); ++i) {
    if (i) out.push_back(',');
    out.push_back(sign > 0 ? '+' : '-');
    out += std::to_string(lengths[i]);
    sign = -sign;
  }
  return out;
}

int DefectDecomposition::defect_sites() const {
  int total = 0;
  for (const auto& d : defects) total += d.blocks.n_sites();
  return total;
}

int DefectDecomposition::run_sites() const {
  int total = 0;
  for (const auto& r : runs) total += r.n_blocks * h_ref;
  return total;
}

DefectDecomposition decompose_defects(const SpinState& s, int h_ref) {
  if (h_ref < 1) throw ValidationError("decompose_defects: h_ref must be positive");
  DefectDecomposition out;
  out.h_ref = h_ref;
  out.n_sites = s.n_sites();
  out.translation = to_blocks(s).translation;

  const auto blocks = raw_blocks(s);
  const int m = static_cast<int>(blocks.size());
  auto fragment_from = [&](int first, int count) {
    DefectSegment seg;
    seg.start = blocks[first].start;
    seg.blocks.first_sign = blocks[first].sign;
    for (int k = 0; k < count; ++k) seg.blocks.lengths.push_back(blocks[(first + k) % m].length);
    return seg;
  };

  if (m == 1) {
    out.defects.push_back(fragment_from(0, 1));
    return out;
  }

  std::vector<char> good(m);
  for (int k = 0; k < m; ++k) good[k] = blocks[k].length == h_ref;
  if (std::all_of(good.begin(), good.end(), [](char g) { return g != 0; })) {
    const int first_plus = blocks[0].sign > 0 ? 0 : 1;
    out.runs.push_back(PeriodicRun{blocks[first_plus].start, m});
    return out;
  }

  // Maximal cyclic stretches of h_ref-blocks, scanned from just after a
  // block that is not one. Within a stretch the run starts at the first
  // plus block and keeps the largest even number of blocks.
  int anchor = 0;
  while (good[anchor]) ++anchor;
  std::vector<char> in_run(m, 0);
  std::vector<std::pair<int, int>> runs;  // (first block, count)
  int k = 1;
  while (k <= m) {
    const int idx = (anchor + k) % m;
    if (!good[idx]) {
      ++k;
      continue;
    }
    int len = 0;
    while (k + len <= m && good[(anchor + k + len) % m]) ++len;
    const int skip = blocks[idx].sign > 0 ? 0 : 1;
    const int count = ((len - skip) / 2) * 2;
    if (count >= 2) {
      const int first = (idx + skip) % m;
      runs.emplace_back(first, count);
      for (int c = 0; c < count; ++c) in_run[(first + c) % m] = 1;
    }
    k += len;
  }

  if (runs.empty()) {
    out.defects.push_back(fragment_from(0, m));
    return out;
  }

  std::sort(runs.begin(), runs.end(),
            [&](const auto& a, const auto& b) { return blocks[a.first].start < blocks[b.first].start; });
  for (const auto& [first, count] : runs) {
    // The defect preceding this run: walk back over blocks not in any run.
    int back = 0;
    while (!in_run[pmod(first - back - 1, m)]) ++back;
    out.defects.push_back(fragment_from(static_cast<int>(pmod(first - back, m)), back));
    out.runs.push_back(PeriodicRun{blocks[first].start, count});
  }
  return out;
}

// ------------------------------------------------------------ PhaseFunction

PhaseFunction::PhaseFunction(int modulus, std::vector<Piece> pieces) : modulus_(modulus) {
  if (modulus < 2 || modulus % 2 != 0) throw ValidationError("PhaseFunction: modulus must be a positive even integer");
  if (pieces.empty()) throw ValidationError("PhaseFunction: no pieces");
  double prev = 0.0;
  for (const auto& pc : pieces) {
    if (!(pc.right > prev) || pc.right > 1.0)
      throw ValidationError("PhaseFunction: right endpoints must increase strictly within (0,1]");
    prev = pc.right;
  }
  if (pieces.back().right != 1.0) throw ValidationError("PhaseFunction: last right endpoint must be 1");
  for (const auto& pc : pieces) {
    const int v = static_cast<int>(pmod(pc.value, modulus));
    if (!pieces_.empty() && pieces_.back().value == v)
      pieces_.back().right = pc.right;
    else
      pieces_.push_back(Piece{v, pc.right});
  }
}

PhaseFunction PhaseFunction::constant(int modulus, int value) { return PhaseFunction(modulus, {{value, 1.0}}); }

PhaseFunction PhaseFunction::parse(std::string_view text, int modulus) {
  text = trim(text);
  std::vector<Piece> pieces;
  for (auto tok : split(text, ';')) {
    tok = trim(tok);
    if (tok.empty()) continue;
    const auto colon = tok.find(':');
    if (colon == std::string_view::npos) throw ParseError("phase function: expected value:endpoint", std::string(tok));
    const auto vs = trim(tok.substr(0, colon));
    const auto xs = trim(tok.substr(colon + 1));
    int v = 0;
    double x = 0.0;
    auto rv = std::from_chars(vs.data(), vs.data() + vs.size(), v);
    if (rv.ec != std::errc() || rv.ptr != vs.data() + vs.size())
      throw ParseError("phase function: bad value", std::string(tok));
    auto rx = std::from_chars(xs.data(), xs.data() + xs.size(), x);
    if (rx.ec != std::errc() || rx.ptr != xs.data() + xs.size())
      throw ParseError("phase function: bad endpoint", std::string(tok));
    if (v < 0 || v >= modulus) throw ParseError("phase function: value outside [0, 2h)", std::string(tok));
    pieces.push_back(Piece{v, x});
  }
  try {
    return PhaseFunction(modulus, std::move(pieces));
  } catch (const ValidationError& e) {
    throw ParseError(e.what(), std::string(text));
  }
}

std::vector<double> PhaseFunction::breakpoints() const {
  std::vector<double> out;
  for (std::size_t k = 0; k + 1 < pieces_.size(); ++k) out.push_back(pieces_[k].right);
  return out;
}

std::vector<PhaseFunction::Jump> PhaseFunction::jumps() const {
  std::vector<Jump> out;
  for (std::size_t k = 0; k + 1 < pieces_.size(); ++k)
    out.push_back(Jump{pieces_[k].right, static_cast<int>(pmod(pieces_[k + 1].value - pieces_[k].value, modulus_))});
  return out;
}

int PhaseFunction::winding() const {
  return static_cast<int>(pmod(pieces_.back().value - pieces_.front().value, modulus_));
}

int PhaseFunction::value_at(double x) const {
  if (!(x > 0.0) || x > 1.0) throw DomainError("PhaseFunction::value_at: x must lie in (0,1]");
  for (const auto& pc : pieces_)
    if (x <= pc.right) return pc.value;
  return pieces_.back().value;
}

PhaseFunction PhaseFunction::rotated(double t) const {
  t -= std::floor(t);
  if (t == 0.0) return *this;
  // Value just right of the new origin comes from r(1 - t + 0), lowered by
  // one winding because it sits one period behind.
  int base = pieces_.back().value;
  for (const auto& pc : pieces_)
    if (pc.right > 1.0 - t) {
      base = pc.value;
      break;
    }
  base -= winding();
  std::vector<Jump> moved;
  for (const auto& j : jumps()) {
    double x = j.x + t;
    if (x > 1.0) x -= 1.0;
    if (x == 1.0 || x <= 0.0) throw DomainError("PhaseFunction::rotated: a breakpoint lands on the cut");
    moved.push_back(Jump{x, j.size});
  }
  std::sort(moved.begin(), moved.end(), [](const Jump& a, const Jump& b) { return a.x < b.x; });
  std::vector<Piece> pieces;
  int v = base;
  for (const auto& j : moved) {
    pieces.push_back(Piece{v, j.x});
    v += j.size;
  }
  pieces.push_back(Piece{v, 1.0});
  return PhaseFunction(modulus_, std::move(pieces));
}

std::string PhaseFunction::to_string() const {
  std::string out;
  for (std::size_t k = 0; k < pieces_.size(); ++k) {
    if (k) out.push_back(';');
    out += std::to_string(pieces_[k].value) + ":" + shortest(pieces_[k].right);
  }
  return out;
}

PhaseFunction phase_function(const DefectDecomposition& d) {
  const int n = d.n_sites;
  const int mod = 2 * d.h_ref;
  if (n < 1) throw ValidationError("phase_function: empty decomposition");
  if (d.runs.empty()) {
    // No run to read a phase from: constant except for the last site, which
    // carries the whole winding N mod 2h.
    if (n % mod == 0) return PhaseFunction::constant(mod, 0);
    const double x = n == 1 ? 0.5 : static_cast<double>(n - 1) / n;
    return PhaseFunction(mod, {{0, x}, {n % mod, 1.0}});
  }
  std::vector<int> starts;
  for (const auto& r : d.runs) starts.push_back(r.start);
  std::sort(starts.begin(), starts.end());
  std::vector<PhaseFunction::Piece> pieces;
  // Sites before the first run start belong to the last run, one period back.
  int label = starts.back() - n;
  // A run starting at site 0 would put its jump on the cut; the defect in
  // front of it takes that run's value (one period ahead) instead.
  int ahead_from = n;
  if (starts.front() == 0 && !d.defects.empty()) {
    for (std::size_t i = 0; i < d.runs.size(); ++i)
      if (d.runs[i].start == 0) ahead_from = d.defects[i].start;
  }
  std::size_t next = 0;
  for (int k = 0; k < n; ++k) {
    if (next < starts.size() && starts[next] == k) label = starts[next++];
    if (k == ahead_from) label = n;
    pieces.push_back(PhaseFunction::Piece{label, static_cast<double>(k + 1) / n});
  }
  pieces.back().right = 1.0;
  return PhaseFunction(mod, std::move(pieces));
}

}  // namespace antiphase
