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

#ifndef LQPG_ERROR_HPP_
#define LQPG_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace lqpg {

enum class ErrorCode {
  kInvalidSpec,
  kDimensionMismatch,
  kNonFiniteBlowup,
  kSymmetryLoss,
  kVariancePositivityLoss,
  kAssumptionViolation,
  kSingularShootingMatrix,
  kResidualFailure,
  kNegativeWeight,
  kInvalidProbability,
  kZeroReference,
  kIo,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what);

}  // namespace lqpg

#endif  // LQPG_ERROR_HPP_
