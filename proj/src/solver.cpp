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

#include "antiphase/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <tuple>

#include "antiphase/errors.hpp"
#include "antiphase/parallel.hpp"
#include "json.hpp"

namespace antiphase {

namespace {

constexpr std::size_t kGroundCandidates = 256;

// Is `a` the largest of its rotations of its reversal? Rotations of `a`
// itself are already handled by the prenecklace bookkeeping.
bool beats_reversal(const std::vector<int>& a) {
  const std::size_t m = a.size();
  for (std::size_t t = 0; t < m; ++t) {
    // reversal rotated by t: r[i] = a[(t - i) mod m]
    for (std::size_t i = 0; i < m; ++i) {
      const int r = a[(t + m - i) % m];
      if (r > a[i]) return false;
      if (r < a[i]) break;
    }
  }
  return true;
}

double ferro_part(int N, int M, double J) { return M >= 2 ? -J * N + 2.0 * J * M : -J * N; }

// Depth-first walk over canonical block sequences (largest in their
// dihedral orbit), accumulating the antiferromagnetic energy block by block.
// The walk is resumable from a fixed prefix so it can be split into tasks.
class Walker {
 public:
  Walker(int N, const KernelTable* table) : n_(N), table_(table) {
    a_.reserve(N);
    start_.reserve(N);
    af_.reserve(N + 1);
    af_.push_back(0.0);
  }

  // Returns false if `v` breaks the prenecklace order.
  bool push(int v) {
    const std::size_t k = a_.size();
    std::size_t p = period_.empty() ? 1 : period_.back();
    if (k > 0) {
      const int ref = a_[k - p];
      if (v > ref) return false;
      if (v < ref) p = k + 1;
    }
    const std::int64_t s = sum_;
    double delta = 0.0;
    if (table_) {
      delta = table_->block_sum(0, v, v);
      double cross = 0.0;
      for (std::size_t i = 0; i < k; ++i) {
        const double b = table_->block_sum(s - start_[i], a_[i], v);
        cross += (k - i) % 2 ? -b : b;
      }
      delta += 2.0 * cross;
    }
    a_.push_back(v);
    start_.push_back(s);
    period_.push_back(p);
    af_.push_back(af_.back() + delta);
    sum_ += v;
    return true;
  }

  void pop() {
    sum_ -= a_.back();
    a_.pop_back();
    start_.pop_back();
    period_.pop_back();
    af_.pop_back();
  }

  int remaining() const { return n_ - static_cast<int>(sum_); }
  const std::vector<int>& blocks() const { return a_; }
  double antiferro() const { return af_.back(); }

  // A complete sequence that is the representative of its class.
  bool is_canonical_leaf() const {
    if (sum_ != n_) return false;
    const std::size_t m = a_.size();
    if (m == 1) return true;
    if (m % 2) return false;
    if (m % period_.back()) return false;
    return beats_reversal(a_);
  }

  // Plain exhaustive recursion; leaf(walker) on every canonical leaf.
  template <class Leaf>
  void run(Leaf&& leaf, std::uint64_t& nodes) {
    ++nodes;
    if (remaining() == 0) {
      if (is_canonical_leaf()) leaf(*this);
      return;
    }
    const int top = a_.empty() ? n_ : std::min(a_.front(), remaining());
    for (int v = 1; v <= top; ++v) {
      if (!push(v)) continue;
      run(leaf, nodes);
      pop();
    }
  }

 private:
  int n_;
  const KernelTable* table_;
  std::vector<int> a_;
  std::vector<std::int64_t> start_;
  std::vector<std::size_t> period_;
  std::vector<double> af_;
  std::int64_t sum_ = 0;
};

// Prefixes of length <= 2 used as independent tasks, in a fixed order.
std::vector<std::vector<int>> task_prefixes(int N) {
  std::vector<std::vector<int>> out;
  for (int a0 = 1; a0 <= N; ++a0) {
    if (a0 == N) {
      out.push_back({a0});
      continue;
    }
    for (int a1 = 1; a1 <= std::min(a0, N - a0); ++a1) out.push_back({a0, a1});
  }
  return out;
}

void check_cap(int N, int cap) {
  if (N < 1) throw ValidationError("N must be positive");
  if (N > cap)
    throw CapError("exhaustive search over N=" + std::to_string(N) + " sites exceeds the cap of " +
                       std::to_string(cap) + "; use branch and bound or raise the cap",
                   cap);
}

// Runs the walker over every task, calling make_leaf(task_index) to get the
// per-task leaf handler.
template <class Slot, class LeafFn>
std::vector<Slot> scan_tasks(int N, const KernelTable* table, int threads, std::vector<std::uint64_t>& nodes,
                             LeafFn&& on_leaf) {
  const auto prefixes = task_prefixes(N);
  std::vector<Slot> slots(prefixes.size());
  nodes.assign(prefixes.size(), 0);
  parallel_for(prefixes.size(), threads, [&](std::size_t t) {
    Walker w(N, table);
    for (int v : prefixes[t])
      if (!w.push(v)) return;
    w.run([&](const Walker& leaf) { on_leaf(slots[t], leaf); }, nodes[t]);
  });
  return slots;
}

bool class_less(const ClassEnergy& x, const ClassEnergy& y) {
  if (x.energy != y.energy) return x.energy < y.energy;
  return x.blocks.lengths < y.blocks.lengths;
}

void keep_lowest(std::vector<ClassEnergy>& v, ClassEnergy c, std::size_t count) {
  if (v.size() >= count && !class_less(c, v.back())) return;
  auto pos = std::upper_bound(v.begin(), v.end(), c, class_less);
  v.insert(pos, std::move(c));
  if (v.size() > count) v.pop_back();
}

}  // namespace

std::string to_string(SearchMethod m) { return m == SearchMethod::exhaustive ? "exhaustive" : "branch_and_bound"; }

double tie_tolerance(double energy) { return 1e-10 * std::max(1.0, std::fabs(energy)); }

void enumerate_canonical(int N, const std::function<void(const BlockArray&)>& visit, int cap) {
  check_cap(N, cap);
  Walker w(N, nullptr);
  std::uint64_t nodes = 0;
  w.run([&](const Walker& leaf) { visit(BlockArray(1, leaf.blocks())); }, nodes);
}

std::vector<BlockArray> canonical_classes(int N, int cap) {
  std::vector<BlockArray> out;
  enumerate_canonical(N, [&](const BlockArray& b) { out.push_back(b); }, cap);
  return out;
}

std::vector<ClassEnergy> lowest_classes(int N, const ModelParams& m, std::size_t count, const SolverConfig& cfg,
                                        std::uint64_t* nodes) {
  m.validate();
  check_cap(N, cfg.exhaustive_cap);
  if (count == 0) return {};
  const auto table = KernelTable::get(m.p, N);
  std::vector<std::uint64_t> task_nodes;
  auto slots = scan_tasks<std::vector<ClassEnergy>>(
      N, table.get(), cfg.threads, task_nodes, [&](std::vector<ClassEnergy>& slot, const Walker& leaf) {
        const int M = static_cast<int>(leaf.blocks().size());
        const double e = ferro_part(N, M, m.J) + leaf.antiferro();
        if (slot.size() >= count && e > slot.back().energy) return;
        keep_lowest(slot, ClassEnergy{BlockArray(1, leaf.blocks()), e}, count);
      });
  std::vector<ClassEnergy> merged;
  for (auto& s : slots)
    for (auto& c : s) keep_lowest(merged, std::move(c), count);
  if (nodes) {
    *nodes = 0;
    for (auto n : task_nodes) *nodes += n;
  }
  return merged;
}

namespace {

GroundStateResult summarize(const std::vector<ClassEnergy>& low) {
  GroundStateResult r;
  const double e1 = low.front().energy;
  const double tol = tie_tolerance(e1);
  for (const auto& c : low) {
    if (c.energy <= e1 + tol) {
      r.minimizers.push_back(c.blocks);
    } else {
      r.second_energy = c.energy;
      break;
    }
  }
  std::sort(r.minimizers.begin(), r.minimizers.end(),
            [](const BlockArray& x, const BlockArray& y) { return x.lengths < y.lengths; });
  r.state.blocks = r.minimizers.front();
  for (const auto& c : low)
    if (c.blocks == r.state.blocks) r.energy = c.energy;
  return r;
}

}  // namespace

GroundStateResult ground_state_exact(int N, const ModelParams& m, const SolverConfig& cfg) {
  std::uint64_t nodes = 0;
  const auto low = lowest_classes(N, m, kGroundCandidates, cfg, &nodes);
  GroundStateResult r = summarize(low);
  r.method = SearchMethod::exhaustive;
  r.nodes_explored = nodes;
  r.certified = true;
  return r;
}

double fit_lower_bound_constant(const ModelParams& m, int cap, const SolverConfig& cfg) {
  m.validate();
  std::vector<double> e(cap + 1, 0.0);
  for (int h = 1; h <= cap; ++h) e[h] = energy_per_site(h, m);
  double c = 0.0;
  for (int N = 1; N <= cap; ++N) {
    const auto table = KernelTable::get(m.p, N);
    std::vector<std::uint64_t> nodes;
    const double scale = std::pow(static_cast<double>(N), m.p);
    auto slots = scan_tasks<double>(N, table.get(), cfg.threads, nodes, [&](double& worst, const Walker& leaf) {
      const int M = static_cast<int>(leaf.blocks().size());
      const double energy = ferro_part(N, M, m.J) + leaf.antiferro();
      double local = 0.0;
      for (int h : leaf.blocks()) local += h * e[h];
      worst = std::max(worst, (local - energy) * scale);
    });
    for (double s : slots) c = std::max(c, s);
  }
  return c;
}

namespace {

struct BnbSearch {
  int N;
  const ModelParams& m;
  const BnbConfig& cfg;
  std::vector<double> e;  // e[h]
  std::vector<int> order;  // branching order of block lengths
  double e_floor;
  double slack;  // c_inflated N^{-p}
  Walker walker;
  std::vector<double> local;  // prefix sums of h e(h)
  double incumbent = std::numeric_limits<double>::infinity();
  std::vector<int> best;
  std::uint64_t nodes = 0;

  BnbSearch(int N_, const ModelParams& m_, const BnbConfig& cfg_, const KernelTable* table, int h_star, int h_max,
            double c)
      : N(N_), m(m_), cfg(cfg_), walker(N_, table) {
    e.assign(h_max + 1, 0.0);
    for (int h = 1; h <= h_max; ++h) e[h] = energy_per_site(h, m);
    e_floor = *std::min_element(e.begin() + 1, e.end());
    slack = c * std::pow(static_cast<double>(N), -m.p);
    for (int h : {h_star, h_star + 1, h_star - 1})
      if (h >= 1 && h <= h_max) order.push_back(h);
    for (int h = 1; h <= h_max; ++h)
      if (std::find(order.begin(), order.end(), h) == order.end()) order.push_back(h);
    local.push_back(0.0);
  }

  void log_node(double bound) {
    if (!cfg.log) return;
    nlohmann::json rec;
    rec["node"] = nodes;
    rec["bound"] = bound;
    if (std::isfinite(incumbent))
      rec["incumbent"] = incumbent;
    else
      rec["incumbent"] = nullptr;
    *cfg.log << rec.dump() << '\n';
  }

  void offer(const std::vector<int>& a, double energy) {
    const double tol = tie_tolerance(energy);
    if (energy < incumbent - tol || (energy <= incumbent + tol && a < best)) {
      if (energy < incumbent) incumbent = energy;
      best = a;
    }
  }

  void descend() {
    if (nodes >= cfg.node_limit)
      throw CapError("ground_state_bnb: node limit reached", static_cast<long>(cfg.node_limit));
    const int rem = walker.remaining();
    const double bound = local.back() + rem * e_floor - slack;
    ++nodes;
    log_node(bound);
    if (bound > incumbent + tie_tolerance(incumbent)) return;
    if (rem == 0) {
      if (walker.is_canonical_leaf()) {
        const int M = static_cast<int>(walker.blocks().size());
        offer(walker.blocks(), ferro_part(N, M, m.J) + walker.antiferro());
      }
      return;
    }
    const int top = walker.blocks().empty() ? static_cast<int>(e.size()) - 1
                                            : std::min(walker.blocks().front(), rem);
    for (int v : order) {
      if (v > top || v > rem) continue;
      if (!walker.push(v)) continue;
      local.push_back(local.back() + v * e[v]);
      descend();
      local.pop_back();
      walker.pop();
    }
  }
};

struct ValidationKey {
  double p, J, inflation;
  int cap;
  auto tie() const { return std::tie(p, J, inflation, cap); }
  bool operator<(const ValidationKey& o) const { return tie() < o.tie(); }
};

struct Validation {
  double c_fit = 0.0;
  bool passed = false;
};

std::mutex g_validation_mu;
std::map<ValidationKey, Validation> g_validation;

GroundStateResult bnb_core(int N, const ModelParams& m, const StripeGroundState& g, const BnbConfig& cfg,
                           double c_inflated) {
  const int h_max = cfg.h_max > 0 ? std::min(cfg.h_max, N) : N;
  const auto table = KernelTable::get(m.p, N);
  BnbSearch s(N, m, cfg, table.get(), g.h_star, h_max, c_inflated);
  s.descend();
  if (s.best.empty()) throw DomainError("ground_state_bnb: no admissible block array with the configured h_max");
  GroundStateResult r;
  r.state.blocks = BlockArray(1, s.best);
  r.energy = s.incumbent;
  r.minimizers = {r.state.blocks};
  r.method = SearchMethod::branch_and_bound;
  r.nodes_explored = s.nodes;
  return r;
}

}  // namespace

GroundStateResult ground_state_bnb(int N, const ModelParams& m, const StripeGroundState& g, const BnbConfig& cfg) {
  m.validate();
  g.require_unique();
  if (N < 1) throw ValidationError("ground_state_bnb: N must be positive");
  if (cfg.h_max > 0 && cfg.h_max < g.h_star)
    throw DomainError("ground_state_bnb: h_max=" + std::to_string(cfg.h_max) + " is below h*=" +
                      std::to_string(g.h_star) + " and would exclude the expected optimum");
  if (cfg.c_inflation < 1.0) throw ValidationError("ground_state_bnb: c_inflation must be >= 1");

  double c_inflated = 0.0;
  bool certified = false;
  if (cfg.c_override) {
    c_inflated = *cfg.c_override;
  } else {
    const ValidationKey key{m.p, m.J, cfg.c_inflation, cfg.exhaustive_cap};
    Validation v;
    bool have = false;
    {
      std::lock_guard<std::mutex> lock(g_validation_mu);
      auto it = g_validation.find(key);
      if (it != g_validation.end()) {
        v = it->second;
        have = true;
      }
    }
    if (!have) {
      SolverConfig sc;
      sc.exhaustive_cap = cfg.exhaustive_cap;
      sc.threads = cfg.threads;
      v.c_fit = fit_lower_bound_constant(m, cfg.exhaustive_cap, sc);
      v.passed = true;
      BnbConfig quiet = cfg;
      quiet.log = nullptr;
      quiet.h_max = 0;
      for (int n = 1; n <= cfg.exhaustive_cap && v.passed; ++n) {
        const auto exact = ground_state_exact(n, m, sc);
        const auto bb = bnb_core(n, m, g, quiet, v.c_fit * cfg.c_inflation);
        if (std::fabs(exact.energy - bb.energy) > tie_tolerance(exact.energy)) v.passed = false;
      }
      std::lock_guard<std::mutex> lock(g_validation_mu);
      g_validation.emplace(key, v);
    }
    c_inflated = v.c_fit * cfg.c_inflation;
    certified = v.passed && (cfg.h_max == 0 || cfg.h_max >= N);
  }
  if (cfg.require_certified && !certified)
    throw PreconditionError("ground_state_bnb: the pruning bound is not validated for these parameters");
  GroundStateResult r = bnb_core(N, m, g, cfg, c_inflated);
  r.certified = certified;
  return r;
}

GapEstimate energy_gap(const ModelParams& m, const StripeGroundState& g, const std::vector<int>& K_list,
                       const SolverConfig& cfg) {
  g.require_unique();
  if (K_list.empty()) throw ValidationError("energy_gap: empty K list");
  GapEstimate out;
  std::vector<std::vector<ClassEnergy>> lows;
  for (int K : K_list) {
    if (K < 1) throw ValidationError("energy_gap: K must be positive");
    const int N = 2 * g.h_star * K;
    auto low = lowest_classes(N, m, kGroundCandidates, cfg);
    const double e1 = low.front().energy;
    const double tol = tie_tolerance(e1);
    double gap = std::numeric_limits<double>::quiet_NaN();
    for (const auto& c : low)
      if (c.energy > e1 + tol) {
        gap = c.energy - e1;
        break;
      }
    if (std::isnan(gap)) throw InconclusiveError("energy_gap: no second energy level among the lowest classes");
    out.n_values.push_back(N);
    out.gaps.push_back(gap);
    lows.push_back(std::move(low));
  }
  out.delta = *std::min_element(out.gaps.begin(), out.gaps.end());
  out.delta_tilde = out.delta / (2.0 * g.h_star);
  for (const auto& low : lows) {
    const double e1 = low.front().energy;
    for (const auto& c : low) {
      if (c.energy > e1 + out.delta + tie_tolerance(e1)) break;
      int mass = 0;
      for (int h : c.blocks.lengths)
        if (h != g.h_star) mass += h;
      out.k0_estimate = std::max(out.k0_estimate, mass);
    }
  }
  return out;
}

}  // namespace antiphase
