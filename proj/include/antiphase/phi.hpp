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

#ifndef ANTIPHASE_PHI_HPP
#define ANTIPHASE_PHI_HPP

#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "antiphase/energy.hpp"
#include "antiphase/solver.hpp"
#include "antiphase/state.hpp"

namespace antiphase {

inline constexpr const char* kVersion = "0.1.0";

enum class PhiMode { exhaustive, single_defect, bnb };
std::string to_string(PhiMode m);
PhiMode parse_phi_mode(std::string_view text);

struct PhiCacheEntry {
  double value = 0.0;
  double error_bound = 0.0;
  std::string minimizer;  // block array text
  std::string defect;     // fragment text (single_defect only)
  int d_max_used = 0;
};

/// JSON file mapping "p=..|J=..|h=..|j=..|K=..|mode=..|dmax=.." to cached
/// phi_K values. Reads are shared, writes rewrite the whole file.
class PhiCache {
 public:
  // Loads `path` if it exists. An empty path keeps everything in memory.
  explicit PhiCache(std::string path = {});

  static std::string key(const ModelParams& m, int h_star, int j, int K, PhiMode mode, int d_max);

  std::optional<PhiCacheEntry> get(const std::string& key) const;
  void put(const std::string& key, const PhiCacheEntry& entry);
  std::size_t size() const;

 private:
  void flush_locked() const;

  std::string path_;
  mutable std::mutex mu_;
  std::map<std::string, PhiCacheEntry> entries_;
  std::map<std::string, std::string> stamps_;
};

struct PhiConfig {
  PhiMode mode = PhiMode::single_defect;
  int d_max = 0;  // 0: 4 h* + j
  // single_defect only: compare against exhaustive minima wherever
  // N <= exhaustive_cap and widen d_max by 2h* until they agree.
  bool escalate = true;
  int exhaustive_cap = 28;
  int threads = 1;
  BnbConfig bnb;
  PhiCache* cache = nullptr;
};

struct PhiValue {
  int K = 0;
  int n_sites = 0;
  double value = 0.0;  // min F_N over the search space
  BlockArray minimizer;
  Fragment defect;     // single_defect: the minimizing defect
  int d_max_used = 0;  // single_defect: after escalation
  bool from_cache = false;
};

/// min F_N at N = 2 K h* + j over the configured search space. j is a
/// residue in [0, 2h*).
PhiValue phi_at_K(int j, int K, const ModelParams& m, const StripeGroundState& g, const PhiConfig& cfg = {});

struct PhiEstimate {
  int j = 0;
  int modulus = 2;  // 2 h*
  std::vector<PhiValue> values;  // by increasing K
  double extrapolated = 0.0;
  double error_bound = 0.0;
  std::optional<double> fit_exponent;  // q in phi_K ~ phi + a K^{-q}
  double fit_residual = 0.0;
  PhiMode search_mode = PhiMode::single_defect;
  // Differences of consecutive phi_K change sign above quadrature noise.
  bool flagged = false;
};

/// phi_K over K_range, extrapolated in K. Needs at least three K values.
PhiEstimate phi_estimate(int j, const ModelParams& m, const StripeGroundState& g, std::vector<int> K_range,
                         const PhiConfig& cfg = {});

struct SubadditivityCase {
  int j = 0;
  int k = 0;
  int sum = 0;  // (j + k) mod 2h*
  double lhs = 0.0;
  double rhs = 0.0;
  double tolerance = 0.0;  // sum of the three error bounds
  double margin = 0.0;     // rhs + tolerance - lhs
  bool holds = true;
};

struct SubadditivityReport {
  std::vector<SubadditivityCase> cases;
  bool passed = true;
};

/// phi(j + k) <= phi(j) + phi(k) for every pair j <= k. `table` must hold
/// one estimate per residue.
SubadditivityReport check_subadditivity(const std::vector<PhiEstimate>& table);

}  // namespace antiphase

#endif  // ANTIPHASE_PHI_HPP
