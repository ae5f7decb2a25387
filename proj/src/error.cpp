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

#include "qsn/error.hpp"

#include <cstdio>

namespace qsn {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::IllegalGeneratorForSite: return "IllegalGeneratorForSite";
    case ErrorCode::TruncationTooSmall: return "TruncationTooSmall";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::DimensionCapExceeded: return "DimensionCapExceeded";
    case ErrorCode::InvalidState: return "InvalidState";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::OddFermionCount: return "OddFermionCount";
    case ErrorCode::NonBosonicSite: return "NonBosonicSite";
    case ErrorCode::PSDViolation: return "PSDViolation";
    case ErrorCode::NonDiagonalGenerator: return "NonDiagonalGenerator";
    case ErrorCode::NonCommutingGenerators: return "NonCommutingGenerators";
    case ErrorCode::NotHermitian: return "NotHermitian";
    case ErrorCode::NotOrthogonal: return "NotOrthogonal";
    case ErrorCode::NotRankOne: return "NotRankOne";
    case ErrorCode::NotSymplectic: return "NotSymplectic";
    case ErrorCode::ZeroTraceVH: return "ZeroTraceVH";
    case ErrorCode::CircuitProbeMismatch: return "CircuitProbeMismatch";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::TailMassTooLarge: return "TailMassTooLarge";
    case ErrorCode::TruncationLeakage: return "TruncationLeakage";
    case ErrorCode::CholeskyFailure: return "CholeskyFailure";
    case ErrorCode::BudgetExceeded: return "BudgetExceeded";
    case ErrorCode::DegenerateDerivative: return "DegenerateDerivative";
    case ErrorCode::ProbabilityOutOfRange: return "ProbabilityOutOfRange";
    case ErrorCode::SaturatedCounts: return "SaturatedCounts";
  }
  return "Unknown";
}

bool is_numerical_guard(ErrorCode code) {
  switch (code) {
    case ErrorCode::TailMassTooLarge:
    case ErrorCode::TruncationLeakage:
    case ErrorCode::CholeskyFailure:
    case ErrorCode::BudgetExceeded:
    case ErrorCode::DegenerateDerivative:
    case ErrorCode::ProbabilityOutOfRange:
    case ErrorCode::SaturatedCounts:
      return true;
    default:
      return false;
  }
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

std::string format_value(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

}  // namespace qsn
