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

#include "lqpg/game.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lqpg/error.hpp"

namespace lqpg {
namespace {

constexpr double kSymTol = 1e-12;
constexpr double kPsdTol = 1e-10;

bool all_finite(const Eigen::MatrixXd& m) { return m.allFinite(); }

double min_sym_eigenvalue(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (m + m.transpose()),
                                                    Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

void check_weights(const Eigen::MatrixXd& w) {
  if (w.rows() != w.cols()) {
    fail(ErrorCode::kDimensionMismatch, "weight matrix must be square");
  }
  for (int i = 0; i < w.rows(); ++i) {
    for (int j = 0; j < w.cols(); ++j) {
      if (i != j && (w(i, j) < 0.0 || !std::isfinite(w(i, j)))) {
        fail(ErrorCode::kNegativeWeight, "weight (" + std::to_string(i) + "," +
                                             std::to_string(j) + ") is negative");
      }
    }
  }
}

}  // namespace

void GameSpec::validate() const {
  const int n = n_players;
  if (n < 1) fail(ErrorCode::kInvalidSpec, "need at least one player");
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    fail(ErrorCode::kInvalidSpec, "horizon must be positive");
  }
  auto check_len = [n](const Eigen::VectorXd& v, const char* name) {
    if (v.size() != n) {
      fail(ErrorCode::kDimensionMismatch, std::string(name) + " has wrong length");
    }
    if (!v.allFinite()) fail(ErrorCode::kInvalidSpec, std::string(name) + " not finite");
  };
  check_len(gamma, "gamma");
  check_len(d_target, "d_target");
  check_len(init_mean, "init_mean");
  check_len(init_var, "init_var");
  if (static_cast<int>(sigma.size()) != n) {
    fail(ErrorCode::kDimensionMismatch, "sigma has wrong length");
  }
  if (static_cast<int>(q_mats.size()) != n) {
    fail(ErrorCode::kDimensionMismatch, "q_mats has wrong length");
  }
  for (int i = 0; i < n; ++i) {
    if (gamma(i) < 0.0) fail(ErrorCode::kInvalidSpec, "gamma must be nonnegative");
    if (!(init_var(i) > 0.0)) {
      fail(ErrorCode::kInvalidSpec, "initial variance of player " + std::to_string(i) +
                                        " must be positive");
    }
    if (sigma[i].empty()) fail(ErrorCode::kInvalidSpec, "empty sigma");
    for (double s : sigma[i]) {
      if (!(s >= 0.0) || !std::isfinite(s)) {
        fail(ErrorCode::kInvalidSpec, "sigma must be finite and nonnegative");
      }
    }
    const Eigen::MatrixXd& q = q_mats[i];
    if (q.rows() != n || q.cols() != n) {
      fail(ErrorCode::kDimensionMismatch, "cost matrix " + std::to_string(i) +
                                              " is not N x N");
    }
    if (!all_finite(q)) fail(ErrorCode::kInvalidSpec, "cost matrix not finite");
    const double scale = std::max(1.0, q.cwiseAbs().maxCoeff());
    if ((q - q.transpose()).cwiseAbs().maxCoeff() > kSymTol * scale) {
      fail(ErrorCode::kInvalidSpec, "cost matrix " + std::to_string(i) +
                                        " is not symmetric");
    }
    if (min_sym_eigenvalue(q) < -kPsdTol * scale) {
      fail(ErrorCode::kInvalidSpec, "cost matrix " + std::to_string(i) +
                                        " is not positive semidefinite");
    }
  }
}

void GameSpec::check_grid(const TimeGrid& grid) const {
  if (std::abs(grid.horizon() - horizon) > 1e-12 * horizon) {
    fail(ErrorCode::kDimensionMismatch, "grid horizon differs from the game horizon");
  }
  for (const auto& s : sigma) {
    if (s.size() != 1 && static_cast<int>(s.size()) != grid.n_nodes()) {
      fail(ErrorCode::kDimensionMismatch, "sampled sigma does not match the grid");
    }
  }
}

double GameSpec::sigma_cell(int player, int j) const {
  const auto& s = sigma[player];
  return s.size() == 1 ? s[0] : s[j];
}

PotentialMatrix build_potential_matrix(const GameSpec& spec) {
  const int n = spec.n_players;
  PotentialMatrix pm;
  pm.q = Eigen::MatrixXd::Zero(n, n);
  pm.q_hat = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    double row = 0.0;
    double gap = 0.0;
    for (int j = 0; j < n; ++j) {
      pm.q_hat(i, j) = spec.q_mats[i](i, j);
      if (j == i) continue;
      const double diff = spec.q_mats[i](i, j) - spec.q_mats[j](j, i);
      row += diff;
      gap += std::abs(diff);
      pm.q(i, j) = spec.q_mats[i](i, j);
    }
    pm.q(i, i) = spec.q_mats[i](i, i) + 0.5 * row;
    pm.c_q = std::max(pm.c_q, gap);
  }
  pm.q_sym = 0.5 * (pm.q + pm.q.transpose());
  return pm;
}

AssumptionReport check_assumptions(const GameSpec& spec, const PotentialMatrix& pm) {
  AssumptionReport r;
  const double scale = std::max(1.0, pm.q.cwiseAbs().maxCoeff());
  r.q_sym_min_eig = min_sym_eigenvalue(pm.q_sym);
  r.q_sym_psd = r.q_sym_min_eig >= -kPsdTol * scale;
  r.c_q = pm.c_q;
  r.pairwise_symmetric = pm.c_q <= kSymTol * scale;
  r.q_hat_sym_min_eig = min_sym_eigenvalue(pm.q_hat);
  r.q_hat_sym_psd = r.q_hat_sym_min_eig >= -kPsdTol * scale;
  if (!r.q_sym_psd) r.warnings.push_back("symmetrized potential matrix is indefinite");
  if (!r.q_hat_sym_psd) {
    r.warnings.push_back("symmetrized coupling matrix is indefinite; "
                         "equilibrium uniqueness is not guaranteed");
  }
  for (int i = 0; i < spec.n_players; ++i) {
    if (spec.gamma(i) == 0.0 && spec.q_mats[i](i, i) == 0.0) {
      r.warnings.push_back("player " + std::to_string(i) + " has no own-state cost");
    }
  }
  return r;
}

std::vector<Eigen::MatrixXd> flocking_costs(const Eigen::MatrixXd& weights) {
  check_weights(weights);
  const int n = static_cast<int>(weights.rows());
  std::vector<Eigen::MatrixXd> q(n, Eigen::MatrixXd::Zero(n, n));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      const double w = weights(i, j);
      q[i](i, i) += w;
      q[i](j, j) += w;
      q[i](i, j) -= w;
      q[i](j, i) -= w;
    }
  }
  return q;
}

std::vector<Eigen::MatrixXd> mean_field_flocking_costs(const Eigen::MatrixXd& weights) {
  check_weights(weights);
  const int n = static_cast<int>(weights.rows());
  std::vector<Eigen::MatrixXd> q;
  q.reserve(n);
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd v = -weights.row(i).transpose();
    v(i) = 1.0;
    q.push_back(v * v.transpose());
  }
  return q;
}

double alpha_upper_bound(const PotentialMatrix& pm, double m_mu, double m_var) {
  return (m_var + 3.0 * m_mu) * pm.c_q;
}

GameSpec make_game(std::vector<Eigen::MatrixXd> q_mats, double horizon, double sigma,
                   double gamma, double init_var, const Eigen::VectorXd& init_mean,
                   const Eigen::VectorXd& d_target) {
  GameSpec s;
  s.n_players = static_cast<int>(q_mats.size());
  s.horizon = horizon;
  s.sigma.assign(s.n_players, std::vector<double>{sigma});
  s.q_mats = std::move(q_mats);
  s.gamma = Eigen::VectorXd::Constant(s.n_players, gamma);
  s.init_var = Eigen::VectorXd::Constant(s.n_players, init_var);
  s.init_mean = init_mean;
  s.d_target = d_target;
  return s;
}

}  // namespace lqpg
