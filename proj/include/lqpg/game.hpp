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

#ifndef LQPG_GAME_HPP_
#define LQPG_GAME_HPP_

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lqpg/grid.hpp"

namespace lqpg {

// N-player scalar LQ game with dynamics dX^i = (K^i (X^i - E X^i) + G^i) dt
// + sigma^i dW^i and quadratic running cost x^T Q^i x.
struct GameSpec {
  int n_players = 0;
  double horizon = 1.0;
  // Per player, either one constant value or one sample per grid node.
  std::vector<std::vector<double>> sigma;
  std::vector<Eigen::MatrixXd> q_mats;
  Eigen::VectorXd gamma;
  Eigen::VectorXd d_target;
  Eigen::VectorXd init_mean;
  Eigen::VectorXd init_var;

  // Throws InvalidSpec or DimensionMismatch.
  void validate() const;
  // Throws DimensionMismatch when sampled sigma does not fit the grid.
  void check_grid(const TimeGrid& grid) const;
  // Volatility used on cell [t_j, t_{j+1}).
  double sigma_cell(int player, int j) const;
  Eigen::MatrixXd lambda() const { return gamma.asDiagonal(); }
};

struct PotentialMatrix {
  Eigen::MatrixXd q;      // Q_ii = Q^i_ii + 1/2 sum_j (Q^i_ij - Q^j_ji), Q_ij = Q^i_ij
  Eigen::MatrixXd q_sym;  // (Q + Q^T) / 2
  Eigen::MatrixXd q_hat;  // row i of Q^i
  double c_q = 0.0;       // max_i sum_{j != i} |Q^i_ij - Q^j_ji|
};

PotentialMatrix build_potential_matrix(const GameSpec& spec);

struct AssumptionReport {
  bool q_sym_psd = false;
  double q_sym_min_eig = 0.0;
  bool pairwise_symmetric = false;
  double c_q = 0.0;
  bool q_hat_sym_psd = false;
  double q_hat_sym_min_eig = 0.0;
  std::vector<std::string> warnings;
};

AssumptionReport check_assumptions(const GameSpec& spec, const PotentialMatrix& pm);

// Cost matrices for |x_i - x_j|^2 weighted flocking.
std::vector<Eigen::MatrixXd> flocking_costs(const Eigen::MatrixXd& weights);
// Cost matrices for |x_i - sum_j w_ij x_j|^2.
std::vector<Eigen::MatrixXd> mean_field_flocking_costs(const Eigen::MatrixXd& weights);

// (m_var + 3 m_mu) C_Q, where m_mu bounds the squared L2 norm of the mean paths
// and m_var the L1 norm of the variance paths.
double alpha_upper_bound(const PotentialMatrix& pm, double m_mu, double m_var);

// Game with the given cost matrices and player-uniform scalars.
GameSpec make_game(std::vector<Eigen::MatrixXd> q_mats, double horizon, double sigma,
                   double gamma, double init_var, const Eigen::VectorXd& init_mean,
                   const Eigen::VectorXd& d_target);

}  // namespace lqpg

#endif  // LQPG_GAME_HPP_
