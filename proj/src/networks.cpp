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

#include "lqpg/networks.hpp"

#include <random>

#include "lqpg/error.hpp"

namespace lqpg {

Eigen::MatrixXd uniform_attachment(int n, std::uint64_t seed) {
  if (n < 1) fail(ErrorCode::kInvalidSpec, "graph needs at least one node");
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
  for (int m = 2; m <= n; ++m) {
    const double p = 1.0 / m;
    for (int i = 0; i < m; ++i) {
      for (int j = i + 1; j < m; ++j) {
        if (w(i, j) == 0.0 && unif(gen) < p) w(i, j) = w(j, i) = 1.0;
      }
    }
  }
  return w;
}

Eigen::MatrixXd erdos_renyi_directed(int n, double p, std::uint64_t seed) {
  if (n < 1) fail(ErrorCode::kInvalidSpec, "graph needs at least one node");
  if (!(p >= 0.0 && p <= 1.0)) {
    fail(ErrorCode::kInvalidProbability, "edge probability must lie in [0, 1]");
  }
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i != j && unif(gen) < p) w(i, j) = 1.0;
    }
  }
  return w;
}

std::vector<std::pair<int, int>> edge_list(const Eigen::MatrixXd& weights) {
  std::vector<std::pair<int, int>> out;
  for (int i = 0; i < weights.rows(); ++i) {
    for (int j = 0; j < weights.cols(); ++j) {
      if (i != j && weights(i, j) != 0.0) out.emplace_back(i, j);
    }
  }
  return out;
}

}  // namespace lqpg
