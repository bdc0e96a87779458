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

#ifndef LQPG_ODE_HPP_
#define LQPG_ODE_HPP_

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "lqpg/game.hpp"
#include "lqpg/grid.hpp"

namespace lqpg {

struct OdeOptions {
  int substeps = 10;  // RK4 steps per grid cell, must be even
  double blowup_threshold = 1e12;
};

// Classical RK4 step. f(stage, y) with stage 0, 1, 2 for the step start,
// midpoint and end lets callers read precomputed coefficient samples.
template <class State, class Rhs>
State rk4_step(const Rhs& f, const State& y, double h) {
  const State k1 = f(0, y);
  const State k2 = f(1, State(y + 0.5 * h * k1));
  const State k3 = f(1, State(y + 0.5 * h * k2));
  const State k4 = f(2, State(y + h * k3));
  return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

// P' = P^2 - q on [0, T], P(T) = gamma. With a piecewise-constant gain K the
// equation becomes P' = -2 K P - K^2 - q. Integrated backward in time.
SampledPath<double> riccati_path(double q_ii, double gamma, const TimeGrid& grid,
                                 std::span<const double> k_override = {},
                                 const OdeOptions& opts = {});
ScalarPath solve_scalar_riccati(double q_ii, double gamma, const TimeGrid& grid,
                                std::span<const double> k_override = {},
                                const OdeOptions& opts = {});

// Psi' = Psi^T Psi - Q, Psi(T) = diag(lambda). Sampled at 4 * substeps points
// per cell so that solve_zeta and solve_feedback_mean find their stage values.
MatrixPath solve_matrix_riccati(const Eigen::MatrixXd& q, const Eigen::VectorXd& lambda,
                                const TimeGrid& grid, const OdeOptions& opts = {});

// zeta' = Psi^T zeta, zeta(T) = -gamma * d. Output has half the resolution of psi.
VectorPath solve_zeta(const MatrixPath& psi, const Eigen::VectorXd& gamma,
                      const Eigen::VectorXd& d, const TimeGrid& grid,
                      const OdeOptions& opts = {});

// mu' = -Psi mu - zeta, mu(0) = mu0. Output has half the resolution of zeta.
VectorPath solve_feedback_mean(const MatrixPath& psi, const VectorPath& zeta,
                               const Eigen::VectorXd& mu0, const TimeGrid& grid,
                               const OdeOptions& opts = {});

// theta' = 2 K theta + sigma^2 for one player; resolution is opts.substeps.
SampledPath<double> variance_path(std::span<const double> k, const GameSpec& spec,
                                  int player, const TimeGrid& grid,
                                  const OdeOptions& opts = {});

struct MomentPath {
  std::vector<SampledPath<double>> mean;  // mu' = G
  std::vector<SampledPath<double>> var;   // theta' = 2 K theta + sigma^2
};

// Resolution is opts.substeps.
MomentPath solve_moments(const PolicyProfile& profile, const GameSpec& spec,
                         const TimeGrid& grid, const OdeOptions& opts = {});

}  // namespace lqpg

#endif  // LQPG_ODE_HPP_
