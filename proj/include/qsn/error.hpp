// Copyright 2026 The qsn Authors
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

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qsn {

enum class ErrorCode {
  // validation
  IllegalGeneratorForSite,
  TruncationTooSmall,
  DimensionMismatch,
  DimensionCapExceeded,
  InvalidState,
  InvalidArgument,
  OddFermionCount,
  NonBosonicSite,
  PSDViolation,
  NonDiagonalGenerator,
  NonCommutingGenerators,
  NotHermitian,
  NotOrthogonal,
  NotRankOne,
  NotSymplectic,
  ZeroTraceVH,
  CircuitProbeMismatch,
  ParseError,
  ValidationError,
  // numerical guards
  TailMassTooLarge,
  TruncationLeakage,
  CholeskyFailure,
  BudgetExceeded,
  DegenerateDerivative,
  ProbabilityOutOfRange,
  SaturatedCounts,
};

std::string_view to_string(ErrorCode code);

// True for failures raised by a numerical guard rather than by bad input.
bool is_numerical_guard(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what);

// Six significant digits, for numbers quoted in messages.
std::string format_value(double x);

}  // namespace qsn
