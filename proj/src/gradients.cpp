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

#include "lqpg/gradients.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lqpg/equilibrium.hpp"
#include "lqpg/error.hpp"

namespace lqpg {
namespace {

std::vector<ScalarPath> mean_nodes(const MomentPath& mom) {
  std::vector<ScalarPath> out;
  out.reserve(mom.mean.size());
  for (const auto& m : mom.mean) out.push_back(m.nodes());
  return out;
}

Eigen::VectorXd stack(const std::vector<ScalarPath>& paths, int j) {
  Eigen::VectorXd v(paths.size());
  for (std::size_t i = 0; i < paths.size(); ++i) v(i) = paths[i][j];
  return v;
}

// Exact integral of mu^T A mu over cell j for affine mu.
double cell_quadratic(const Eigen::MatrixXd& a, const Eigen::VectorXd& m0,
                      const Eigen::VectorXd& m1, double dt) {
  const Eigen::VectorXd mid = 0.5 * (m0 + m1);
  return dt / 6.0 * (m0.dot(a * m0) + 4.0 * mid.dot(a * mid) + m1.dot(a * m1));
}

GradientBundle gradients_with(const PolicyProfile& profile, const GameSpec& spec,
                              const TimeGrid& grid, const std::vector<double>& q_diag,
                              const Eigen::MatrixXd& coupling, const OdeOptions& opts) {
  const MomentPath mom = solve_moments(profile, spec, grid, opts);
  const int n = spec.n_players;
  const int nt = grid.n_steps();
  const double dt = grid.dt();
  GradientBundle gb;
  gb.grad_k.assign(n, CellPath(nt));
  gb.grad_g.assign(n, CellPath(nt));
  gb.norm_grad_k.assign(n, CellPath(nt));
  gb.var_cell.assign(n, CellPath(nt));
  gb.p_k.resize(n);
  for (int i = 0; i < n; ++i) {
    gb.p_k[i] = riccati_path(q_diag[i], spec.gamma(i), grid, profile.k[i], opts);
    for (int j = 0; j < nt; ++j) {
      const double th = cell_simpson(mom.var[i], j, dt);
      const double pth = cell_simpson(gb.p_k[i], mom.var[i], j, dt);
      gb.grad_k[i][j] = 2.0 * (pth + profile.k[i][j] * th) / dt;
      gb.var_cell[i][j] = th / dt;
      gb.norm_grad_k[i][j] = gb.grad_k[i][j] / gb.var_cell[i][j];
    }
  }
  gb.xi = mean_adjoint(mean_nodes(mom), coupling, spec, grid);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < nt; ++j) {
      gb.grad_g[i][j] = 2.0 * (profile.g[i][j] + gb.xi[i][j]);
    }
  }
  return gb;
}

double norm_all(const std::vector<CellPath>& v, double dt) {
  double acc = 0.0;
  for (const auto& f : v) {
    const double n = l2_norm(f, dt);
    acc += n * n;
  }
  return std::sqrt(acc);
}

// sup over |K|_inf <= b of |theta|_{L1}, attained at K = b.
double variance_l1_bound(double var0, double s2, double b, double horizon) {
  if (b * horizon < 1e-8) return var0 * horizon + 0.5 * s2 * horizon * horizon;
  const double g = std::expm1(2.0 * b * horizon) / (2.0 * b);
  return var0 * g + s2 * (g - horizon) / (2.0 * b);
}

double max_sigma2(const GameSpec& spec, int i) {
  double s = 0.0;
  for (double v : spec.sigma[i]) s = std::max(s, v * v);
  return s;
}

double min_sigma2(const GameSpec& spec, int i) {
  double s = std::numeric_limits<double>::infinity();
  for (double v : spec.sigma[i]) s = std::min(s, v * v);
  return s;
}

}  // namespace

double GradientBundle::k_norm(double dt) const { return norm_all(grad_k, dt); }
double GradientBundle::g_norm(double dt) const { return norm_all(grad_g, dt); }

std::vector<CellPath> mean_adjoint(const std::vector<ScalarPath>& mu_nodes,
                                   const Eigen::MatrixXd& coupling, const GameSpec& spec,
                                   const TimeGrid& grid) {
  const int n = spec.n_players;
  const int nt = grid.n_steps();
  const double dt = grid.dt();
  std::vector<Eigen::VectorXd> f(nt + 1);
  for (int j = 0; j <= nt; ++j) f[j] = coupling * stack(mu_nodes, j);
  std::vector<CellPath> xi(n, CellPath(nt));
  for (int i = 0; i < n; ++i) {
    double tail = spec.gamma(i) * (mu_nodes[i][nt] - spec.d_target(i));
    for (int j = nt - 1; j >= 0; --j) {
      xi[i][j] = dt * (f[j](i) / 6.0 + f[j + 1](i) / 3.0) + tail;
      tail += 0.5 * dt * (f[j](i) + f[j + 1](i));
    }
  }
  return xi;
}

CostBreakdown eval_costs(const PolicyProfile& profile, const GameSpec& spec,
                         const TimeGrid& grid, const OdeOptions& opts) {
  const MomentPath mom = solve_moments(profile, spec, grid, opts);
  const int n = spec.n_players;
  const int nt = grid.n_steps();
  const double dt = grid.dt();
  std::vector<CellPath> var_int(n, CellPath(nt));
  std::vector<double> var_total(n, 0.0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < nt; ++j) {
      var_int[i][j] = cell_simpson(mom.var[i], j, dt);
      var_total[i] += var_int[i][j];
    }
  }
  const auto mu = mean_nodes(mom);
  CostBreakdown c;
  c.j1.assign(n, 0.0);
  c.j2.assign(n, 0.0);
  c.total.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    const Eigen::MatrixXd& q = spec.q_mats[i];
    double j1 = 0.0;
    double j2 = 0.0;
    for (int j = 0; j < nt; ++j) {
      j1 += profile.k[i][j] * profile.k[i][j] * var_int[i][j];
      j2 += profile.g[i][j] * profile.g[i][j] * dt +
            cell_quadratic(q, stack(mu, j), stack(mu, j + 1), dt);
    }
    for (int l = 0; l < n; ++l) j1 += q(l, l) * var_total[l];
    j1 += spec.gamma(i) * mom.var[i].node(nt);
    const double miss = mu[i][nt] - spec.d_target(i);
    j2 += spec.gamma(i) * miss * miss;
    c.j1[i] = j1;
    c.j2[i] = j2;
    c.total[i] = j1 + j2;
  }
  return c;
}

PotentialValue eval_potential(const PolicyProfile& profile, const PotentialMatrix& pm,
                              const GameSpec& spec, const TimeGrid& grid,
                              const OdeOptions& opts) {
  const MomentPath mom = solve_moments(profile, spec, grid, opts);
  const int n = spec.n_players;
  const int nt = grid.n_steps();
  const double dt = grid.dt();
  PotentialValue v;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < nt; ++j) {
      const double k = profile.k[i][j];
      v.phi1 += (k * k + pm.q(i, i)) * cell_simpson(mom.var[i], j, dt);
      v.phi2 += profile.g[i][j] * profile.g[i][j] * dt;
    }
    v.phi1 += spec.gamma(i) * mom.var[i].node(nt);
    const double miss = mom.mean[i].node(nt) - spec.d_target(i);
    v.phi2 += spec.gamma(i) * miss * miss;
  }
  const auto mu = mean_nodes(mom);
  for (int j = 0; j < nt; ++j) {
    v.phi2 += cell_quadratic(pm.q_sym, stack(mu, j), stack(mu, j + 1), dt);
  }
  return v;
}

GradientBundle exact_gradients(const PolicyProfile& profile, const GameSpec& spec,
                               const TimeGrid& grid, const OdeOptions& opts) {
  const PotentialMatrix pm = build_potential_matrix(spec);
  std::vector<double> q_diag(spec.n_players);
  for (int i = 0; i < spec.n_players; ++i) q_diag[i] = spec.q_mats[i](i, i);
  return gradients_with(profile, spec, grid, q_diag, pm.q_hat, opts);
}

GradientBundle potential_gradients(const PolicyProfile& profile, const PotentialMatrix& pm,
                                   const GameSpec& spec, const TimeGrid& grid,
                                   const OdeOptions& opts) {
  std::vector<double> q_diag(spec.n_players);
  for (int i = 0; i < spec.n_players; ++i) q_diag[i] = pm.q(i, i);
  return gradients_with(profile, spec, grid, q_diag, pm.q_sym, opts);
}

LandscapeConstants landscape_constants(const GameSpec& spec, const TimeGrid& grid,
                                       const std::vector<CellPath>& k0, double c_bar_g,
                                       const RateSchedule& rates,
                                       const OdeOptions& opts) {
  const PotentialMatrix pm = build_potential_matrix(spec);
  const int n = spec.n_players;
  const double t = spec.horizon;
  LandscapeConstants c;
  c.c_bar_g = c_bar_g;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(pm.q_sym, Eigen::EigenvaluesOnly);
  const double lam_max = std::max(0.0, es.eigenvalues().maxCoeff());
  c.l = 2.0 + t * t * lam_max + 2.0 * t * spec.gamma.maxCoeff();

  for (int i = 0; i < n; ++i) {
    const auto p = riccati_path(pm.q(i, i), spec.gamma(i), grid, k0[i], opts);
    double kmax = 0.0;
    double pmax = 0.0;
    for (double v : k0[i]) kmax = std::max(kmax, std::abs(v));
    for (double v : p.samples) pmax = std::max(pmax, std::abs(v));
    c.c_bar_k = std::max(c.c_bar_k, kmax + pmax);
  }

  const double cb = c.c_bar_k;
  const double grow = std::exp(2.0 * cb * t);
  c.var_lower = std::numeric_limits<double>::infinity();
  c.var_upper = 0.0;
  double var_l1 = 0.0;
  double mean_aff = 0.0;
  for (int i = 0; i < n; ++i) {
    const double v0 = spec.init_var(i);
    const double smax = max_sigma2(spec, i);
    const double smin = min_sigma2(spec, i);
    const double up_sigma = cb * t < 1e-8 ? smax * t : smax * std::expm1(2.0 * cb * t) / (2.0 * cb);
    const double lo_sigma = cb * t < 1e-8 ? smin * t : -smin * std::expm1(-2.0 * cb * t) / (2.0 * cb);
    c.var_upper = std::max(c.var_upper, v0 * grow + up_sigma);
    c.var_lower = std::min(c.var_lower, std::min(v0, v0 / grow + lo_sigma));
    var_l1 = std::max(var_l1, variance_l1_bound(v0, smax, cb, t));
    mean_aff = std::max(mean_aff, std::abs(spec.init_mean(i)) * std::sqrt(t) +
                                      c_bar_g * t / std::sqrt(2.0));
  }
  c.mean_bound = mean_aff;

  const PolicyProfile star = grid_potential_minimizer(spec, grid, opts);
  double var_star = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto th = variance_path(star.k[i], spec, i, grid, opts);
    for (double v : th.samples) var_star = std::max(var_star, v);
  }
  c.var_star_sup = var_star;

  c.c1k = c.var_lower / (2.0 * c.var_upper);
  c.c2k = 1.0 / c.var_lower;
  c.c3k = 2.0 * c.var_lower / var_star;

  const double cq2 = pm.c_q * pm.c_q;
  const auto [ek_min, ek_max] = std::minmax_element(rates.eta_k.begin(), rates.eta_k.end());
  const auto [eg_min, eg_max] = std::minmax_element(rates.eta_g.begin(), rates.eta_g.end());
  if (cq2 == 0.0) {
    c.delta1 = 0.0;
    c.delta2 = 0.0;
  } else {
    const double vu = c.var_upper;
    const double vl = c.var_lower;
    c.delta1 = (*ek_max / (*ek_min * c.c3k)) * (vu * vu + vl * vl) / vl *
               std::exp(4.0 * cb * t) / (16.0 * cb * cb * cb) * n * cq2;
    const double contraction = std::sqrt(*eg_max * (1.0 - *eg_min * c.m) / *eg_min);
    if (contraction >= 1.0) {
      c.delta2 = std::numeric_limits<double>::infinity();
    } else {
      const double a = *eg_max * t * mean_aff / (1.0 - contraction);
      c.delta2 = 2.0 * c.l * a * a * n * cq2;
    }
  }
  c.alpha = alpha_upper_bound(pm, mean_aff * mean_aff, var_l1);
  return c;
}

PotentialCheck verify_potential_property(const GameSpec& spec, const TimeGrid& grid,
                                         const std::vector<PolicyProfile>& profiles,
                                         const std::vector<PolicyProfile>& deviations,
                                         double rel_tol, const OdeOptions& opts) {
  if (profiles.size() != deviations.size()) {
    fail(ErrorCode::kDimensionMismatch, "profiles and deviations differ in number");
  }
  const PotentialMatrix pm = build_potential_matrix(spec);
  const int n = spec.n_players;
  const double dt = grid.dt();
  PotentialCheck out;
  double m_var = 0.0;
  double m_mu = 0.0;
  auto track_moments = [&](const PolicyProfile& prof) {
    const MomentPath mom = solve_moments(prof, spec, grid, opts);
    for (int i = 0; i < n; ++i) {
      double l1 = 0.0;
      double l2 = 0.0;
      for (int j = 0; j < grid.n_steps(); ++j) {
        l1 += cell_simpson(mom.var[i], j, dt);
        l2 += cell_simpson(mom.mean[i], mom.mean[i], j, dt);
      }
      m_var = std::max(m_var, l1);
      m_mu = std::max(m_mu, l2);
    }
  };
  double scale = 0.0;
  for (std::size_t s = 0; s < profiles.size(); ++s) {
    const PolicyProfile& a = profiles[s];
    const auto ja = eval_costs(a, spec, grid, opts);
    const double pa = eval_potential(a, pm, spec, grid, opts).phi();
    track_moments(a);
    for (int i = 0; i < n; ++i) {
      PolicyProfile b = a;
      b.k[i] = deviations[s].k[i];
      b.g[i] = deviations[s].g[i];
      const auto jb = eval_costs(b, spec, grid, opts);
      const double pb = eval_potential(b, pm, spec, grid, opts).phi();
      track_moments(b);
      const double dj = ja.total[i] - jb.total[i];
      const double dphi = pa - pb;
      out.max_violation = std::max(out.max_violation, std::abs(dj - dphi));
      scale = std::max(scale, std::abs(dj));
    }
  }
  if (pm.c_q <= 1e-12) {
    out.bound = rel_tol * std::max(1.0, scale);
  } else {
    out.bound = alpha_upper_bound(pm, m_mu, m_var);
  }
  out.ok = out.max_violation <= out.bound;
  return out;
}

}  // namespace lqpg
