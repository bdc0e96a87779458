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

#ifndef LQPG_EQUILIBRIUM_HPP_
#define LQPG_EQUILIBRIUM_HPP_

#include <vector>

#include <Eigen/Dense>

#include "lqpg/game.hpp"
#include "lqpg/grid.hpp"
#include "lqpg/ode.hpp"

namespace lqpg {

enum class EquilibriumKind { kSymmetric, kAsymmetric };

// Closed-loop Nash equilibrium. Node paths are indexed [player][node].
struct EquilibriumSolution {
  EquilibriumKind kind = EquilibriumKind::kSymmetric;
  std::vector<ScalarPath> p;
  std::vector<ScalarPath> k_star;
  std::vector<ScalarPath> g_star;
  std::vector<ScalarPath> mu_star;
  std::vector<ScalarPath> lambda;       // asymmetric only
  std::vector<ScalarPath> zeta;         // symmetric only
  std::vector<Eigen::MatrixXd> psi;     // symmetric only, node values
  double boundary_residual = 0.0;
  // Stationary point of the piecewise-constant policy class on the grid.
  PolicyProfile policy;
};

struct ShootingWorkspace {
  std::vector<Eigen::MatrixXd> y1, y2, y1_dot, y2_dot;  // node values
  Eigen::MatrixXd l_t;
  double condition_number = 0.0;
  Eigen::VectorXd alpha2;  // initial mean velocity
};

// Uses the symmetrized potential matrix. Throws AssumptionViolation when it is
// indefinite.
EquilibriumSolution solve_symmetric_ne(const GameSpec& spec, const TimeGrid& grid,
                                       const OdeOptions& opts = {});

// Shooting on mu'' = Q_hat mu. Throws SingularShootingMatrix or ResidualFailure.
EquilibriumSolution solve_asymmetric_ne(const GameSpec& spec, const TimeGrid& grid,
                                        const OdeOptions& opts = {},
                                        ShootingWorkspace* workspace = nullptr);

// Symmetric solver when the game is a potential game, shooting otherwise.
EquilibriumSolution solve_equilibrium(const GameSpec& spec, const TimeGrid& grid,
                                      const OdeOptions& opts = {});

// Gains and drifts on which the cell-averaged gradients vanish. `q_diag` is the
// own-state cost and `coupling` the matrix driving the mean adjoint; `k_warm`
// seeds the gain iteration.
PolicyProfile grid_stationary_policy(const GameSpec& spec, const TimeGrid& grid,
                                     const std::vector<double>& q_diag,
                                     const Eigen::MatrixXd& coupling,
                                     const std::vector<CellPath>* k_warm = nullptr,
                                     const OdeOptions& opts = {});
PolicyProfile grid_nash_policy(const GameSpec& spec, const TimeGrid& grid,
                               const OdeOptions& opts = {});
PolicyProfile grid_potential_minimizer(const GameSpec& spec, const TimeGrid& grid,
                                       const OdeOptions& opts = {});

struct ResidualReport {
  double riccati = 0.0;
  double psi = 0.0;
  double zeta = 0.0;
  double mean = 0.0;
  double lambda = 0.0;
  double max() const;
};

// Central-difference residuals of the equilibrium ODEs at interior nodes.
ResidualReport residual_check(const EquilibriumSolution& sol, const GameSpec& spec,
                              const TimeGrid& grid);

}  // namespace lqpg

#endif  // LQPG_EQUILIBRIUM_HPP_
