// Copyright 2026 The lqpg Authors.
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

#include "lqpg/error.hpp"

namespace lqpg {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidSpec: return "InvalidSpec";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kNonFiniteBlowup: return "NonFiniteBlowup";
    case ErrorCode::kSymmetryLoss: return "SymmetryLoss";
    case ErrorCode::kVariancePositivityLoss: return "VariancePositivityLoss";
    case ErrorCode::kAssumptionViolation: return "AssumptionViolation";
    case ErrorCode::kSingularShootingMatrix: return "SingularShootingMatrix";
    case ErrorCode::kResidualFailure: return "ResidualFailure";
    case ErrorCode::kNegativeWeight: return "NegativeWeight";
    case ErrorCode::kInvalidProbability: return "InvalidProbability";
    case ErrorCode::kZeroReference: return "ZeroReference";
    case ErrorCode::kIo: return "Io";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what),
      code_(code) {}

void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace lqpg
