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

#ifndef ANTIPHASE_TOOLS_CLI_HPP
#define ANTIPHASE_TOOLS_CLI_HPP

#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace antiphase::cli {

enum ExitCode : int { kOk = 0, kParse = 2, kDomain = 3, kCap = 4, kAccuracy = 5 };

/// Everything a command reads besides its own flags. Precedence: flags,
/// then the --config file, then these defaults.
struct RunConfig {
  double p = 2.0;
  double J = 1.0;
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double tail_tol = 1e-12;
  int h_max = 40;
  int exhaustive_cap = 28;
  int bnb_validation_cap = 16;
  int d_max = 0;  // 0: 4h* + j
  std::string K;  // "3..8" or "16,32,64"; empty: per-command default
  std::string cache_path;
  std::string format = "json";
  int threads = 1;  // not echoed; results do not depend on it

  // Overlays the keys present in `j`. Unknown keys are a ParseError.
  void merge(const nlohmann::json& j);
  nlohmann::json echo() const;
  // Throws ValidationError on out-of-domain values.
  void validate() const;
};

/// "3..8", "16,32,64" or a mix such as "2,4..6".
std::vector<int> parse_int_list(std::string_view text, std::string_view what);

/// Runs one command line (without the program name). Output goes to `out`,
/// diagnostics to `err`; the return value is the exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace antiphase::cli

#endif  // ANTIPHASE_TOOLS_CLI_HPP
