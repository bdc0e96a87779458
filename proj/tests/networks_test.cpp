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

#include <doctest.h>

#include <cmath>

#include "lqpg/error.hpp"
#include "lqpg/networks.hpp"

namespace lqpg {
namespace {

TEST_CASE("uniform attachment small cases") {
  CHECK(uniform_attachment(1, 4).size() == 1);
  CHECK(uniform_attachment(1, 4)(0, 0) == 0.0);
  int edges = 0;
  for (std::uint64_t seed = 0; seed < 10000; ++seed) edges += uniform_attachment(2, seed)(0, 1) != 0.0;
  const double freq = edges / 10000.0;
  CHECK(freq >= 0.48);
  CHECK(freq <= 0.52);
}

TEST_CASE("uniform attachment is a symmetric simple graph") {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const Eigen::MatrixXd w = uniform_attachment(9, seed);
    CHECK((w - w.transpose()).cwiseAbs().maxCoeff() == 0.0);
    for (int i = 0; i < 9; ++i) {
      CHECK(w(i, i) == 0.0);
      for (int j = 0; j < 9; ++j) CHECK((w(i, j) == 0.0 || w(i, j) == 1.0));
    }
  }
  CHECK(uniform_attachment(12, 5) == uniform_attachment(12, 5));
}

TEST_CASE("later pairs connect less often") {
  const int n = 5;
  Eigen::MatrixXd freq = Eigen::MatrixXd::Zero(n, n);
  for (std::uint64_t seed = 0; seed < 10000; ++seed) freq += uniform_attachment(n, seed);
  freq /= 10000.0;
  // Exact marginal of pair (i, j): 1 - prod_{m = max(i,j)+1..n} (1 - 1/m), 1-based.
  for (int j = 1; j < n; ++j) {
    double miss = 1.0;
    for (int m = j + 1; m <= n; ++m) miss *= 1.0 - 1.0 / m;
    const double p = 1.0 - miss;
    for (int i = 0; i < j; ++i) CHECK(std::abs(freq(i, j) - p) <= 0.02);
    if (j + 1 < n) {
      for (int i = 0; i < j; ++i) CHECK(freq(i, j) >= freq(i, j + 1) - 0.02);
    }
  }
}

TEST_CASE("directed erdos renyi") {
  const Eigen::MatrixXd none = erdos_renyi_directed(6, 0.0, 1);
  CHECK(none.norm() == 0.0);
  const Eigen::MatrixXd full = erdos_renyi_directed(6, 1.0, 1);
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j < 6; ++j) CHECK(full(i, j) == (i == j ? 0.0 : 1.0));
  }
  // Binomial(90, 1/2) central 99.9% interval is [29, 61].
  int outside = 0;
  double total = 0.0;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const int edges = static_cast<int>(edge_list(erdos_renyi_directed(10, 0.5, seed)).size());
    outside += edges < 29 || edges > 61;
    total += edges;
  }
  CHECK(outside <= 5);
  CHECK(std::abs(total / 1000.0 - 45.0) <= 4.0 * std::sqrt(22.5 / 1000.0));
  CHECK(erdos_renyi_directed(10, 0.3, 9) == erdos_renyi_directed(10, 0.3, 9));
  bool asymmetric = false;
  for (std::uint64_t seed = 0; seed < 10 && !asymmetric; ++seed) {
    const Eigen::MatrixXd w = erdos_renyi_directed(6, 0.5, seed);
    asymmetric = (w - w.transpose()).norm() > 0.0;
  }
  CHECK(asymmetric);
}

TEST_CASE("network argument errors") {
  try {
    erdos_renyi_directed(4, 1.5, 0);
    FAIL("expected a probability error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kInvalidProbability);
  }
  CHECK_THROWS_AS(erdos_renyi_directed(4, -0.1, 0), Error);
  CHECK_THROWS_AS(uniform_attachment(0, 0), Error);
}

TEST_CASE("edge lists skip the diagonal") {
  Eigen::MatrixXd w(3, 3);
  w << 5.0, 1.0, 0.0, 0.0, 0.0, 2.0, 1.0, 0.0, 0.0;
  const auto e = edge_list(w);
  REQUIRE(e.size() == 3);
  CHECK(e[0] == std::make_pair(0, 1));
  CHECK(e[1] == std::make_pair(1, 2));
  CHECK(e[2] == std::make_pair(2, 0));
}

}  // namespace
}  // namespace lqpg
