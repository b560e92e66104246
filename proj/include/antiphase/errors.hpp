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

#ifndef ANTIPHASE_ERRORS_HPP
#define ANTIPHASE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace antiphase {

// Input outside the mathematical domain of an operation (p <= 1, d >= N, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Malformed or inconsistent data (lengths that don't add up, bad signs).
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Text that could not be parsed; `token` names the offending piece.
class ParseError : public std::invalid_argument {
 public:
  ParseError(const std::string& what, std::string token)
      : std::invalid_argument(what), token_(std::move(token)) {}
  const std::string& token() const { return token_; }

 private:
  std::string token_;
};

// A numerical procedure did not reach its tolerance. Carries the best
// estimate and its error bound.
class AccuracyError : public std::runtime_error {
 public:
  AccuracyError(const std::string& what, double estimate, double bound)
      : std::runtime_error(what), estimate_(estimate), bound_(bound) {}
  double estimate() const { return estimate_; }
  double bound() const { return bound_; }

 private:
  double estimate_;
  double bound_;
};

// A standing assumption of the analysis does not hold (non-unique h*, ...).
class PreconditionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// A configured resource cap (exhaustive size, node budget) was exceeded.
class CapError : public std::runtime_error {
 public:
  CapError(const std::string& what, long cap) : std::runtime_error(what), cap_(cap) {}
  long cap() const { return cap_; }

 private:
  long cap_;
};

// A scan did not resolve the quantity it was asked for.
class InconclusiveError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace antiphase

#endif  // ANTIPHASE_ERRORS_HPP
