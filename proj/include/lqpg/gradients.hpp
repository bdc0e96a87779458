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

#ifndef LQPG_GRADIENTS_HPP_
#define LQPG_GRADIENTS_HPP_

#include <vector>

#include <Eigen/Dense>

#include "lqpg/game.hpp"
#include "lqpg/grid.hpp"
#include "lqpg/ode.hpp"

namespace lqpg {

// Policies are piecewise constant, so every gradient entry is the cell average
// of the functional derivative; dJ / dK_j = dt * grad_k[j].
struct GradientBundle {
  std::vector<CellPath> grad_k;
  std::vector<CellPath> grad_g;
  std::vector<CellPath> norm_grad_k;  // grad_k divided by the cell-average variance
  std::vector<CellPath> var_cell;     // cell-average variance
  std::vector<SampledPath<double>> p_k;  // adjoint Riccati under the current gains
  std::vector<CellPath> xi;              // cell-average mean adjoint

  double k_norm(double dt) const;  // sqrt(sum_i |grad_k^i|^2_{L2})
  double g_norm(double dt) const;
};

struct CostBreakdown {
  std::vector<double> j1;  // variance part
  std::vector<double> j2;  // mean part
  std::vector<double> total;
};

struct PotentialValue {
  double phi1 = 0.0;
  double phi2 = 0.0;
  double phi() const { return phi1 + phi2; }
};

CostBreakdown eval_costs(const PolicyProfile& profile, const GameSpec& spec,
                         const TimeGrid& grid, const OdeOptions& opts = {});

PotentialValue eval_potential(const PolicyProfile& profile, const PotentialMatrix& pm,
                              const GameSpec& spec, const TimeGrid& grid,
                              const OdeOptions& opts = {});

// Gradients of each player's own cost.
GradientBundle exact_gradients(const PolicyProfile& profile, const GameSpec& spec,
                               const TimeGrid& grid, const OdeOptions& opts = {});

// Gradients of the potential.
GradientBundle potential_gradients(const PolicyProfile& profile, const PotentialMatrix& pm,
                                   const GameSpec& spec, const TimeGrid& grid,
                                   const OdeOptions& opts = {});

// Mean-adjoint part shared by the exact and sampled backends: cell averages of
// Xi_t = int_t^T (C mu)_i ds + gamma_i (mu_i(T) - d_i) for piecewise-affine mu.
std::vector<CellPath> mean_adjoint(const std::vector<ScalarPath>& mu_nodes,
                                   const Eigen::MatrixXd& coupling, const GameSpec& spec,
                                   const TimeGrid& grid);

struct LandscapeConstants {
  double m = 2.0;
  double l = 0.0;
  double c_bar_k = 0.0;     // max_i |K^0|_inf + |P^{K^0}|_inf
  double c_bar_g = 0.0;
  double var_lower = 0.0;   // lower variance bound along the run
  double var_upper = 0.0;   // upper variance bound along the run
  double var_star_sup = 0.0;  // sup of the variance at the potential minimizer
  double c1k = 0.0;
  double c2k = 0.0;
  double c3k = 0.0;
  double mean_bound = 0.0;  // affine bound on |E X|_{L2} for |G| <= c_bar_g
  double delta1 = 0.0;
  double delta2 = 0.0;
  double alpha = 0.0;
  double delta() const { return delta1 + delta2 + alpha; }
};

struct RateSchedule {
  std::vector<double> eta_k;
  std::vector<double> eta_g;
};

// Constants governing the optimization landscape of the potential when play
// starts from `k0` and the drifts stay in the L2 ball of radius c_bar_g.
LandscapeConstants landscape_constants(const GameSpec& spec, const TimeGrid& grid,
                                       const std::vector<CellPath>& k0, double c_bar_g,
                                       const RateSchedule& rates,
                                       const OdeOptions& opts = {});

struct PotentialCheck {
  double max_violation = 0.0;
  double bound = 0.0;  // relative tolerance in exact mode, alpha otherwise
  bool ok = false;
};

// Checks J^i(a^i, a^-i) - J^i(b^i, a^-i) against Phi(a^i, a^-i) - Phi(b^i, a^-i)
// for the given unilateral deviations.
PotentialCheck verify_potential_property(const GameSpec& spec, const TimeGrid& grid,
                                         const std::vector<PolicyProfile>& profiles,
                                         const std::vector<PolicyProfile>& deviations,
                                         double rel_tol, const OdeOptions& opts = {});

}  // namespace lqpg

#endif  // LQPG_GRADIENTS_HPP_
