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

#include "lqpg/grid.hpp"

#include <cmath>
#include <string>

#include "lqpg/error.hpp"

namespace lqpg {

TimeGrid::TimeGrid(double horizon, int n_steps)
    : horizon_(horizon), n_steps_(n_steps), dt_(horizon / n_steps) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    fail(ErrorCode::kInvalidSpec, "horizon must be positive");
  }
  if (n_steps < 1) fail(ErrorCode::kInvalidSpec, "grid needs at least one step");
}

std::vector<double> TimeGrid::nodes() const {
  std::vector<double> out(n_nodes());
  for (int j = 0; j <= n_steps_; ++j) out[j] = node(j);
  return out;
}

double cell_simpson(const SampledPath<double>& f, int j, double dt) {
  const int r = f.resolution;
  const std::size_t base = static_cast<std::size_t>(j) * r;
  double acc = f.samples[base] + f.samples[base + r];
  for (int s = 1; s < r; ++s) acc += (s % 2 ? 4.0 : 2.0) * f.samples[base + s];
  return acc * dt / (3.0 * r);
}

double cell_simpson(const SampledPath<double>& f, const SampledPath<double>& g,
                    int j, double dt) {
  const int r = f.resolution;
  const std::size_t base = static_cast<std::size_t>(j) * r;
  double acc = f.samples[base] * g.samples[base] +
               f.samples[base + r] * g.samples[base + r];
  for (int s = 1; s < r; ++s) {
    acc += (s % 2 ? 4.0 : 2.0) * f.samples[base + s] * g.samples[base + s];
  }
  return acc * dt / (3.0 * r);
}

PolicyProfile PolicyProfile::zeros(int n_players, const TimeGrid& grid) {
  PolicyProfile p;
  p.k.assign(n_players, CellPath(grid.n_steps(), 0.0));
  p.g.assign(n_players, CellPath(grid.n_steps(), 0.0));
  return p;
}

void PolicyProfile::check(int n_players, const TimeGrid& grid) const {
  if (static_cast<int>(k.size()) != n_players ||
      static_cast<int>(g.size()) != n_players) {
    fail(ErrorCode::kDimensionMismatch,
         "profile has " + std::to_string(k.size()) + " players, expected " +
             std::to_string(n_players));
  }
  for (int i = 0; i < n_players; ++i) {
    if (static_cast<int>(k[i].size()) != grid.n_steps() ||
        static_cast<int>(g[i].size()) != grid.n_steps()) {
      fail(ErrorCode::kDimensionMismatch,
           "policy of player " + std::to_string(i) + " does not match the grid");
    }
  }
}

double l2_norm(const CellPath& f, double dt) {
  double acc = 0.0;
  for (double v : f) acc += v * v;
  return std::sqrt(acc * dt);
}

}  // namespace lqpg
