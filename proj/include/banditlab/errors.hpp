// Copyright 2026 The banditlab Authors.
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

#ifndef BANDITLAB_ERRORS_HPP_
#define BANDITLAB_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace banditlab {

// Base of every error thrown by the library. The CLI maps the concrete
// subclasses onto process exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A caller broke an operation's precondition (mismatched lengths,
// select/observe out of order, probabilities that do not sum up).
class ContractViolation : public Error {
 public:
  using Error::Error;
};

// An argument is outside the operation's domain (N > M, unknown arm).
class ArgumentError : public Error {
 public:
  using Error::Error;
};

// Configuration values that cannot describe a valid experiment.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Iterative methods that fail to converge, impossible numeric states.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// Malformed or exhausted input data (trace files, game files).
class InputError : public Error {
 public:
  using Error::Error;
};

// Filesystem failures while reading or writing artifacts.
class IoError : public Error {
 public:
  using Error::Error;
};

// Invariant broken inside the library itself.
class InternalError : public Error {
 public:
  using Error::Error;
};

}  // namespace banditlab

#endif  // BANDITLAB_ERRORS_HPP_
