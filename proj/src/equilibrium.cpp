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

#include "lqpg/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "lqpg/error.hpp"

namespace lqpg {
namespace {

constexpr int kMaxGainSweeps = 500;

std::vector<CellPath> warm_gains(const std::vector<ScalarPath>& p) {
  std::vector<CellPath> k(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    k[i].resize(p[i].size() - 1);
    for (std::size_t j = 0; j + 1 < p[i].size(); ++j) {
      k[i][j] = -0.5 * (p[i][j] + p[i][j + 1]);
    }
  }
  return k;
}

// Piecewise-affine means with mu_0 fixed whose cell drifts solve
// G_j + Xi_j = 0, Xi_j being the exact cell average of the mean adjoint.
// Block tridiagonal system in mu_1..mu_N, solved by block elimination. Returns
// mu - mu_0.
std::vector<Eigen::VectorXd> stationary_means(const Eigen::MatrixXd& c,
                                              const Eigen::VectorXd& gamma,
                                              const Eigen::VectorXd& d,
                                              const Eigen::VectorXd& mu0, double dt,
                                              int n_steps) {
  const int n = static_cast<int>(c.rows());
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd lam = gamma.asDiagonal();
  const Eigen::MatrixXd a = id - (dt * dt / 6.0) * c;
  const Eigen::MatrixXd b = -2.0 * id - (2.0 * dt * dt / 3.0) * c;
  const Eigen::MatrixXd e = id / dt - (dt / 6.0) * c;
  const Eigen::MatrixXd f = id / dt + (dt / 3.0) * c + lam;
  // Unknowns are the deviations nu = mu - mu_0, nu_0 = 0.
  const Eigen::VectorXd inner_rhs = (dt * dt) * (c * mu0);
  const Eigen::VectorXd last_rhs = lam * (d - mu0) - (0.5 * dt) * (c * mu0);

  std::vector<Eigen::VectorXd> nu(n_steps + 1);
  nu[0] = Eigen::VectorXd::Zero(n);
  if (n_steps == 1) {
    nu[1] = f.fullPivLu().solve(last_rhs);
  } else {
    // Rows r = 1..N: sub(r) nu_{r-1} + diag(r) nu_r + a nu_{r+1} = rhs(r).
    std::vector<Eigen::MatrixXd> inv(n_steps + 1);
    std::vector<Eigen::VectorXd> y(n_steps + 1);
    y[1] = inner_rhs;
    inv[1] = b.partialPivLu().inverse();
    for (int r = 2; r <= n_steps; ++r) {
      const bool last = r == n_steps;
      const Eigen::MatrixXd sub = last ? Eigen::MatrixXd(-e) : a;
      const Eigen::MatrixXd w = sub * inv[r - 1];
      const Eigen::MatrixXd dprime = (last ? f : b) - w * a;
      y[r] = (last ? last_rhs : inner_rhs) - w * y[r - 1];
      inv[r] = dprime.partialPivLu().inverse();
    }
    nu[n_steps] = inv[n_steps] * y[n_steps];
    for (int r = n_steps - 1; r >= 1; --r) nu[r] = inv[r] * (y[r] - a * nu[r + 1]);
  }
  return nu;
}

double max_abs(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

double ResidualReport::max() const {
  return std::max({riccati, psi, zeta, mean, lambda});
}

PolicyProfile grid_stationary_policy(const GameSpec& spec, const TimeGrid& grid,
                                     const std::vector<double>& q_diag,
                                     const Eigen::MatrixXd& coupling,
                                     const std::vector<CellPath>* k_warm,
                                     const OdeOptions& opts) {
  const int n = spec.n_players;
  const int nt = grid.n_steps();
  const double dt = grid.dt();
  PolicyProfile out = PolicyProfile::zeros(n, grid);
  if (k_warm != nullptr) out.k = *k_warm;

  for (int i = 0; i < n; ++i) {
    CellPath& k = out.k[i];
    double change = std::numeric_limits<double>::infinity();
    int sweep = 0;
    for (; sweep < kMaxGainSweeps && change > 0.0; ++sweep) {
      const auto p = riccati_path(q_diag[i], spec.gamma(i), grid, k, opts);
      const auto th = variance_path(k, spec, i, grid, opts);
      change = 0.0;
      double scale = 1.0;
      for (int j = 0; j < nt; ++j) {
        const double next = -cell_simpson(p, th, j, dt) / cell_simpson(th, j, dt);
        change = std::max(change, std::abs(next - k[j]));
        scale = std::max(scale, std::abs(next));
        k[j] = next;
      }
      if (change <= 1e-15 * scale) break;
    }
    if (sweep == kMaxGainSweeps && change > 1e-10) {
      fail(ErrorCode::kResidualFailure, "gain fixed point did not converge for player " +
                                            std::to_string(i));
    }
  }

  const auto nu = stationary_means(coupling, spec.gamma, spec.d_target, spec.init_mean,
                                   dt, nt);
  for (int j = 0; j < nt; ++j) {
    const Eigen::VectorXd gj = (nu[j + 1] - nu[j]) / dt;
    for (int i = 0; i < n; ++i) out.g[i][j] = gj(i);
  }
  return out;
}

PolicyProfile grid_nash_policy(const GameSpec& spec, const TimeGrid& grid,
                               const OdeOptions& opts) {
  const PotentialMatrix pm = build_potential_matrix(spec);
  std::vector<double> q_diag(spec.n_players);
  std::vector<ScalarPath> p(spec.n_players);
  for (int i = 0; i < spec.n_players; ++i) {
    q_diag[i] = spec.q_mats[i](i, i);
    p[i] = solve_scalar_riccati(q_diag[i], spec.gamma(i), grid, {}, opts);
  }
  const auto warm = warm_gains(p);
  return grid_stationary_policy(spec, grid, q_diag, pm.q_hat, &warm, opts);
}

PolicyProfile grid_potential_minimizer(const GameSpec& spec, const TimeGrid& grid,
                                       const OdeOptions& opts) {
  const PotentialMatrix pm = build_potential_matrix(spec);
  std::vector<double> q_diag(spec.n_players);
  std::vector<ScalarPath> p(spec.n_players);
  for (int i = 0; i < spec.n_players; ++i) {
    q_diag[i] = pm.q(i, i);
    p[i] = solve_scalar_riccati(q_diag[i], spec.gamma(i), grid, {}, opts);
  }
  const auto warm = warm_gains(p);
  return grid_stationary_policy(spec, grid, q_diag, pm.q_sym, &warm, opts);
}

EquilibriumSolution solve_symmetric_ne(const GameSpec& spec, const TimeGrid& grid,
                                       const OdeOptions& opts) {
  spec.validate();
  spec.check_grid(grid);
  const PotentialMatrix pm = build_potential_matrix(spec);
  const AssumptionReport report = check_assumptions(spec, pm);
  if (!report.q_sym_psd) {
    fail(ErrorCode::kAssumptionViolation,
         "potential matrix is indefinite (min eigenvalue " +
             std::to_string(report.q_sym_min_eig) + ")");
  }
  const int n = spec.n_players;
  const int nt = grid.n_steps();
  EquilibriumSolution sol;
  sol.kind = EquilibriumKind::kSymmetric;
  sol.p.resize(n);
  sol.k_star.resize(n);
  std::vector<double> q_diag(n);
  for (int i = 0; i < n; ++i) {
    q_diag[i] = pm.q(i, i);
    sol.p[i] = solve_scalar_riccati(q_diag[i], spec.gamma(i), grid, {}, opts);
    sol.k_star[i].resize(nt + 1);
    for (int j = 0; j <= nt; ++j) sol.k_star[i][j] = -sol.p[i][j];
  }

  const MatrixPath psi = solve_matrix_riccati(pm.q_sym, spec.gamma, grid, opts);
  const VectorPath zeta = solve_zeta(psi, spec.gamma, spec.d_target, grid, opts);
  const VectorPath mu = solve_feedback_mean(psi, zeta, spec.init_mean, grid, opts);

  sol.g_star.assign(n, ScalarPath(nt + 1));
  sol.mu_star.assign(n, ScalarPath(nt + 1));
  sol.zeta.assign(n, ScalarPath(nt + 1));
  sol.psi.resize(nt + 1);
  for (int j = 0; j <= nt; ++j) {
    sol.psi[j] = psi.node(j);
    const Eigen::VectorXd g = -psi.node(j) * mu.node(j) - zeta.node(j);
    for (int i = 0; i < n; ++i) {
      sol.g_star[i][j] = g(i);
      sol.mu_star[i][j] = mu.node(j)(i);
      sol.zeta[i][j] = zeta.node(j)(i);
    }
  }
  const Eigen::VectorXd mu_t = mu.node(nt);
  const Eigen::VectorXd g_t = -psi.node(nt) * mu_t - zeta.node(nt);
  sol.boundary_residual =
      (g_t + spec.lambda() * (mu_t - spec.d_target)).cwiseAbs().maxCoeff();

  const auto warm = warm_gains(sol.p);
  sol.policy = grid_stationary_policy(spec, grid, q_diag, pm.q_sym, &warm, opts);
  return sol;
}

EquilibriumSolution solve_asymmetric_ne(const GameSpec& spec, const TimeGrid& grid,
                                        const OdeOptions& opts,
                                        ShootingWorkspace* workspace) {
  spec.validate();
  spec.check_grid(grid);
  const PotentialMatrix pm = build_potential_matrix(spec);
  const int n = spec.n_players;
  const int nt = grid.n_steps();
  const int r = opts.substeps;
  const double h = grid.dt() / r;

  // RK4 propagator of z' = [[0, I], [Q_hat, 0]] z over one substep.
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  m.topRightCorner(n, n).setIdentity();
  m.bottomLeftCorner(n, n) = pm.q_hat;
  const Eigen::MatrixXd hm = h * m;
  const Eigen::MatrixXd hm2 = hm * hm;
  const Eigen::MatrixXd step = Eigen::MatrixXd::Identity(2 * n, 2 * n) + hm +
                               hm2 / 2.0 + hm2 * hm / 6.0 + hm2 * hm2 / 24.0;

  std::vector<Eigen::MatrixXd> z(nt + 1);
  z[0] = Eigen::MatrixXd::Identity(2 * n, 2 * n);
  for (int j = 0; j < nt; ++j) {
    Eigen::MatrixXd cur = z[j];
    for (int s = 0; s < r; ++s) cur = step * cur;
    if (!cur.allFinite() || max_abs(cur) > opts.blowup_threshold) {
      fail(ErrorCode::kNonFiniteBlowup, "shooting fundamental matrix blew up");
    }
    z[j + 1] = cur;
  }

  const Eigen::MatrixXd lam = spec.lambda();
  const Eigen::MatrixXd& zt = z[nt];
  const Eigen::MatrixXd y1_t = zt.topLeftCorner(n, n);
  const Eigen::MatrixXd y2_t = zt.topRightCorner(n, n);
  const Eigen::MatrixXd y1d_t = zt.bottomLeftCorner(n, n);
  const Eigen::MatrixXd y2d_t = zt.bottomRightCorner(n, n);
  const Eigen::MatrixXd l_t = y2d_t + lam * y2_t;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(l_t);
  const auto sv = svd.singularValues();
  const double cond = sv(n - 1) > 0.0 ? sv(0) / sv(n - 1)
                                      : std::numeric_limits<double>::infinity();
  if (!(cond <= 1e10)) {
    fail(ErrorCode::kSingularShootingMatrix,
         "shooting matrix condition number " + std::to_string(cond));
  }
  const Eigen::VectorXd mu0 = spec.init_mean;
  const Eigen::VectorXd rhs = lam * spec.d_target - y1d_t * mu0 - lam * (y1_t * mu0);
  const Eigen::VectorXd alpha2 = l_t.fullPivLu().solve(rhs);

  if (workspace != nullptr) {
    workspace->y1.resize(nt + 1);
    workspace->y2.resize(nt + 1);
    workspace->y1_dot.resize(nt + 1);
    workspace->y2_dot.resize(nt + 1);
    for (int j = 0; j <= nt; ++j) {
      workspace->y1[j] = z[j].topLeftCorner(n, n);
      workspace->y2[j] = z[j].topRightCorner(n, n);
      workspace->y1_dot[j] = z[j].bottomLeftCorner(n, n);
      workspace->y2_dot[j] = z[j].bottomRightCorner(n, n);
    }
    workspace->l_t = l_t;
    workspace->condition_number = cond;
    workspace->alpha2 = alpha2;
  }

  Eigen::VectorXd z0(2 * n);
  z0 << mu0, alpha2;
  EquilibriumSolution sol;
  sol.kind = EquilibriumKind::kAsymmetric;
  sol.p.resize(n);
  sol.k_star.resize(n);
  sol.g_star.assign(n, ScalarPath(nt + 1));
  sol.mu_star.assign(n, ScalarPath(nt + 1));
  sol.lambda.assign(n, ScalarPath(nt + 1));
  std::vector<double> q_diag(n);
  for (int i = 0; i < n; ++i) {
    q_diag[i] = spec.q_mats[i](i, i);
    sol.p[i] = solve_scalar_riccati(q_diag[i], spec.gamma(i), grid, {}, opts);
    sol.k_star[i].resize(nt + 1);
    for (int j = 0; j <= nt; ++j) sol.k_star[i][j] = -sol.p[i][j];
  }
  Eigen::VectorXd zj;
  for (int j = 0; j <= nt; ++j) {
    zj = z[j] * z0;
    for (int i = 0; i < n; ++i) {
      const double mu = zj(i);
      const double vel = zj(n + i);
      sol.mu_star[i][j] = mu;
      sol.g_star[i][j] = vel;
      sol.lambda[i][j] = -vel - sol.p[i][j] * mu;
    }
  }
  const Eigen::VectorXd mu_t = zj.head(n);
  const Eigen::VectorXd vel_t = zj.tail(n);
  sol.boundary_residual = (vel_t + lam * (mu_t - spec.d_target)).cwiseAbs().maxCoeff();
  const double scale = std::max({1.0, spec.d_target.cwiseAbs().maxCoeff(),
                                 mu0.cwiseAbs().maxCoeff()});
  if (!(sol.boundary_residual <= 1e-6 * scale)) {
    fail(ErrorCode::kResidualFailure,
         "terminal residual " + std::to_string(sol.boundary_residual));
  }

  const auto warm = warm_gains(sol.p);
  sol.policy = grid_stationary_policy(spec, grid, q_diag, pm.q_hat, &warm, opts);
  return sol;
}

EquilibriumSolution solve_equilibrium(const GameSpec& spec, const TimeGrid& grid,
                                      const OdeOptions& opts) {
  spec.validate();
  const PotentialMatrix pm = build_potential_matrix(spec);
  const AssumptionReport report = check_assumptions(spec, pm);
  if (report.pairwise_symmetric) return solve_symmetric_ne(spec, grid, opts);
  return solve_asymmetric_ne(spec, grid, opts);
}

ResidualReport residual_check(const EquilibriumSolution& sol, const GameSpec& spec,
                              const TimeGrid& grid) {
  const PotentialMatrix pm = build_potential_matrix(spec);
  const int n = spec.n_players;
  const int nt = grid.n_steps();
  const double two_dt = 2.0 * grid.dt();
  ResidualReport rep;
  const bool sym = sol.kind == EquilibriumKind::kSymmetric;
  for (int i = 0; i < n; ++i) {
    const double q = sym ? pm.q(i, i) : spec.q_mats[i](i, i);
    // Checked through the gain, P = -K.
    const auto& k = sol.k_star[i];
    for (int j = 1; j < nt; ++j) {
      const double res = (k[j - 1] - k[j + 1]) / two_dt - (k[j] * k[j] - q);
      rep.riccati = std::max(rep.riccati, std::abs(res));
    }
  }
  auto mean_at = [&](int j) {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v(i) = sol.mu_star[i][j];
    return v;
  };
  if (sym) {
    auto zeta_at = [&](int j) {
      Eigen::VectorXd v(n);
      for (int i = 0; i < n; ++i) v(i) = sol.zeta[i][j];
      return v;
    };
    for (int j = 1; j < nt; ++j) {
      const Eigen::MatrixXd& ps = sol.psi[j];
      const Eigen::MatrixXd dpsi = (sol.psi[j + 1] - sol.psi[j - 1]) / two_dt;
      rep.psi = std::max(rep.psi, max_abs(dpsi - (ps.transpose() * ps - pm.q_sym)));
      const Eigen::VectorXd z = zeta_at(j);
      const Eigen::VectorXd dz = (zeta_at(j + 1) - zeta_at(j - 1)) / two_dt;
      rep.zeta = std::max(rep.zeta, max_abs(dz - ps.transpose() * z));
      const Eigen::VectorXd mu = mean_at(j);
      const Eigen::VectorXd dmu = (mean_at(j + 1) - mean_at(j - 1)) / two_dt;
      rep.mean = std::max(rep.mean, max_abs(dmu + ps * mu + z));
    }
  } else {
    for (int j = 1; j < nt; ++j) {
      const Eigen::VectorXd mu = mean_at(j);
      for (int i = 0; i < n; ++i) {
        const double cross = pm.q_hat.row(i).dot(mu) - pm.q_hat(i, i) * mu(i);
        const double dl = (sol.lambda[i][j + 1] - sol.lambda[i][j - 1]) / two_dt;
        const double res_l = dl - (sol.p[i][j] * sol.lambda[i][j] - cross);
        rep.lambda = std::max(rep.lambda, std::abs(res_l));
        const double dm = (sol.mu_star[i][j + 1] - sol.mu_star[i][j - 1]) / two_dt;
        const double res_m = dm + sol.p[i][j] * mu(i) + sol.lambda[i][j];
        rep.mean = std::max(rep.mean, std::abs(res_m));
      }
    }
  }
  return rep;
}

}  // namespace lqpg
