// Copyright 2026 The friedlab Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef FRIEDLAB_ERROR_HPP_
#define FRIEDLAB_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace friedlab {

enum class ErrorKind {
  kDomain,
  kPrecondition,
  kNonConvergence,
  kPhaseUnresolvable,
  kUnresolvedOscillation,
  kOutOfWindow,
  kConfig,
  kBudget,
  kIntegrity,
  kBlowup,
  kIo,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what),
        kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kDomain: return "domain-error";
    case ErrorKind::kPrecondition: return "precondition";
    case ErrorKind::kNonConvergence: return "non-convergence";
    case ErrorKind::kPhaseUnresolvable: return "phase-unresolvable";
    case ErrorKind::kUnresolvedOscillation: return "unresolved-oscillation";
    case ErrorKind::kOutOfWindow: return "out-of-window";
    case ErrorKind::kConfig: return "config-error";
    case ErrorKind::kBudget: return "budget-exhausted";
    case ErrorKind::kIntegrity: return "integrity-error";
    case ErrorKind::kBlowup: return "numerical-blowup";
    case ErrorKind::kIo: return "io-error";
  }
  return "error";
}

}  // namespace friedlab

#endif  // FRIEDLAB_ERROR_HPP_
