// Copyright 2026 The FM3Q Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef FM3Q_ERRORS_H_
#define FM3Q_ERRORS_H_

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace fm3q {

// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input: wrong dimensions, out-of-range indices, bad configs.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// A configuration document is missing a field or holds a bad value. path()
// names the offending field, e.g. "game.num_states".
class ConfigError : public InvalidArgument {
 public:
  ConfigError(const std::string& path, const std::string& what)
      : InvalidArgument(path + ": " + what), path_(path) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

// An iterative solver hit its iteration cap before reaching tolerance.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, int iterations, double residual)
      : Error(what), iterations_(iterations), residual_(residual) {}
  int iterations() const { return iterations_; }
  double residual() const { return residual_; }

 private:
  int iterations_;
  double residual_;
};

// A dataset does not visit every (state, pro joint, ant joint) triple.
// coverage() is indexed like a q_tot table: 1 if visited, 0 otherwise.
class CoverageError : public Error {
 public:
  CoverageError(const std::string& what, std::vector<uint8_t> coverage)
      : Error(what), coverage_(std::move(coverage)) {}
  const std::vector<uint8_t>& coverage() const { return coverage_; }

 private:
  std::vector<uint8_t> coverage_;
};

// NaN or infinity showed up in a loss, gradient or parameter.
class NonFiniteError : public Error {
 public:
  using Error::Error;
};

// The factorized shortcut disagreed with exhaustive enumeration.
class IgmmViolation : public Error {
 public:
  using Error::Error;
};

}  // namespace fm3q

#endif  // FM3Q_ERRORS_H_
