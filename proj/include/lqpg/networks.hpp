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

#ifndef LQPG_NETWORKS_HPP_
#define LQPG_NETWORKS_HPP_

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace lqpg {

// Undirected 0/1 graph grown one node at a time; when the n-th node arrives every
// still-missing edge among the first n nodes appears with probability 1/n.
Eigen::MatrixXd uniform_attachment(int n, std::uint64_t seed);

// Directed graph with each ordered pair (i, j), i != j, present with probability p.
Eigen::MatrixXd erdos_renyi_directed(int n, double p, std::uint64_t seed);

// Nonzero off-diagonal entries as (row, col).
std::vector<std::pair<int, int>> edge_list(const Eigen::MatrixXd& weights);

}  // namespace lqpg

#endif  // LQPG_NETWORKS_HPP_
