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

#ifndef LQPG_SIMULATE_HPP_
#define LQPG_SIMULATE_HPP_

#include <cstdint>
#include <vector>

#include "lqpg/game.hpp"
#include "lqpg/gradients.hpp"
#include "lqpg/grid.hpp"

namespace lqpg {

// Euler-Maruyama paths of dX^i = (K^i (X^i - mu_hat^i) + G^i) dt + sigma^i dW^i,
// where mu_hat is the batch mean at the current step.
struct TrajectoryBatch {
  int n_samples = 0;
  int n_players = 0;
  int n_nodes = 0;
  std::vector<double> x;  // [sample][node][player]
  std::vector<ScalarPath> mean;  // batch mean, [player][node]
  std::vector<ScalarPath> var;   // unbiased batch variance

  double at(int sample, int node, int player) const {
    return x[(static_cast<std::size_t>(sample) * n_nodes + node) * n_players + player];
  }
};

struct EmpiricalMoments {
  std::vector<ScalarPath> mean;
  std::vector<ScalarPath> var;
};

struct SampledCost {
  std::vector<double> mean;       // per player
  std::vector<double> std_error;  // of the sample average
};

// Stores every path; memory is n_samples * (N_t + 1) * N doubles.
TrajectoryBatch sample_trajectories(const PolicyProfile& profile, const GameSpec& spec,
                                    const TimeGrid& grid, int n_samples,
                                    std::uint64_t seed);

// Same draws as sample_trajectories without storing paths.
EmpiricalMoments simulate_moments(const PolicyProfile& profile, const GameSpec& spec,
                                  const TimeGrid& grid, int n_samples, std::uint64_t seed);

// Per-node sample mean and unbiased sample variance.
EmpiricalMoments empirical_moments(const TrajectoryBatch& batch);

// Left-Riemann sampled cost of each player along the stored batch.
SampledCost sampled_cost(const TrajectoryBatch& batch, const PolicyProfile& profile,
                         const GameSpec& spec, const TimeGrid& grid);
// Streaming variant with the same draws.
SampledCost sampled_cost(const PolicyProfile& profile, const GameSpec& spec,
                         const TimeGrid& grid, int n_samples, std::uint64_t seed);

// Gradients with the moments replaced by batch estimates.
GradientBundle stochastic_gradients(const PolicyProfile& profile, const GameSpec& spec,
                                    const TimeGrid& grid, int n_samples,
                                    std::uint64_t seed, const OdeOptions& opts = {});

}  // namespace lqpg

#endif  // LQPG_SIMULATE_HPP_
