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

#ifndef LQPG_GRID_HPP_
#define LQPG_GRID_HPP_

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace lqpg {

// Uniform grid t_j = j * T / N_t, j = 0..N_t.
class TimeGrid {
 public:
  TimeGrid(double horizon, int n_steps);

  double horizon() const { return horizon_; }
  int n_steps() const { return n_steps_; }
  int n_nodes() const { return n_steps_ + 1; }
  double dt() const { return dt_; }
  double node(int j) const { return horizon_ * j / n_steps_; }
  std::vector<double> nodes() const;

 private:
  double horizon_;
  int n_steps_;
  double dt_;
};

// One value per grid node.
using ScalarPath = std::vector<double>;
// One value per cell [t_j, t_{j+1}); the policy is constant on each cell.
using CellPath = std::vector<double>;

// Samples at `resolution` equally spaced points per cell, nodes included.
template <class T>
struct SampledPath {
  int resolution = 1;
  std::vector<T> samples;

  const T& node(int j) const { return samples[static_cast<std::size_t>(j) * resolution]; }
  const T& at(int j, int sub) const {
    return samples[static_cast<std::size_t>(j) * resolution + sub];
  }
  int n_steps() const { return static_cast<int>(samples.size() - 1) / resolution; }
  std::vector<T> nodes() const {
    std::vector<T> out;
    out.reserve(n_steps() + 1);
    for (int j = 0; j <= n_steps(); ++j) out.push_back(node(j));
    return out;
  }
};

using MatrixPath = SampledPath<Eigen::MatrixXd>;
using VectorPath = SampledPath<Eigen::VectorXd>;

// Composite Simpson integral of cell j for a path with even resolution.
double cell_simpson(const SampledPath<double>& f, int j, double dt);
// Same for the product f * g.
double cell_simpson(const SampledPath<double>& f, const SampledPath<double>& g,
                    int j, double dt);

// Piecewise-constant feedback gains and drifts, indexed [player][cell].
struct PolicyProfile {
  std::vector<CellPath> k;
  std::vector<CellPath> g;

  static PolicyProfile zeros(int n_players, const TimeGrid& grid);
  int n_players() const { return static_cast<int>(k.size()); }
  void check(int n_players, const TimeGrid& grid) const;
};

// sqrt(sum_j dt f_j^2), exact for piecewise-constant paths.
double l2_norm(const CellPath& f, double dt);

}  // namespace lqpg

#endif  // LQPG_GRID_HPP_
