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

#include "lqpg/learners.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lqpg/equilibrium.hpp"
#include "lqpg/error.hpp"
#include "lqpg/simulate.hpp"

namespace lqpg {
namespace {

GradientBundle gradients_for(const PolicyProfile& profile, const LearnerConfig& cfg,
                             const GameSpec& spec, const TimeGrid& grid, int iteration) {
  if (cfg.backend == Backend::kExact) return exact_gradients(profile, spec, grid, cfg.ode);
  return stochastic_gradients(profile, spec, grid, cfg.n_samples,
                              cfg.seed + static_cast<std::uint64_t>(iteration), cfg.ode);
}

double component_rrmse(const std::vector<CellPath>& v, const std::vector<CellPath>& ref,
                       const char* what) {
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    for (std::size_t j = 0; j < ref[i].size(); ++j) {
      const double d = v[i][j] - ref[i][j];
      num += d * d;
      den += ref[i][j] * ref[i][j];
    }
  }
  if (den == 0.0) fail(ErrorCode::kZeroReference, std::string(what) + " reference is zero");
  return std::sqrt(num / den);
}

}  // namespace

LearnerConfig LearnerConfig::uniform(int n_players, double eta, int n_iters) {
  LearnerConfig c;
  c.eta_k.assign(n_players, eta);
  c.eta_g.assign(n_players, eta);
  c.n_iters = n_iters;
  return c;
}

void LearnerConfig::check(int n_players, bool allow_zero_rates) const {
  if (static_cast<int>(eta_k.size()) != n_players ||
      static_cast<int>(eta_g.size()) != n_players) {
    fail(ErrorCode::kDimensionMismatch, "learning rates do not match the players");
  }
  for (std::size_t i = 0; i < eta_k.size(); ++i) {
    const bool ok = allow_zero_rates ? eta_k[i] >= 0.0 && eta_g[i] >= 0.0
                                     : eta_k[i] > 0.0 && eta_g[i] > 0.0;
    if (!ok || !std::isfinite(eta_k[i]) || !std::isfinite(eta_g[i])) {
      fail(ErrorCode::kInvalidSpec, "learning rates must be positive");
    }
  }
  if (n_iters < 0) fail(ErrorCode::kInvalidSpec, "iteration count must be nonnegative");
  if (backend == Backend::kMonteCarlo && n_samples < 2) {
    fail(ErrorCode::kInvalidSpec, "sampled backend needs at least two samples");
  }
  if (c_bar_g < 0.0) fail(ErrorCode::kInvalidSpec, "projection radius must be nonnegative");
}

CellPath project_l2_ball(const CellPath& f, double radius, double dt) {
  const double norm = l2_norm(f, dt);
  if (norm <= radius) return f;
  const double scale = radius / norm;
  CellPath out(f.size());
  for (std::size_t j = 0; j < f.size(); ++j) out[j] = scale * f[j];
  return out;
}

double default_projection_radius(const GameSpec& spec, const TimeGrid& grid,
                                 const OdeOptions& opts) {
  const PolicyProfile star = grid_potential_minimizer(spec, grid, opts);
  double r = 0.0;
  for (const auto& g : star.g) r = std::max(r, l2_norm(g, grid.dt()));
  return 2.0 * r;
}

PolicyProfile pg_step(const PolicyProfile& profile, const LearnerConfig& cfg,
                      const GameSpec& spec, const TimeGrid& grid, int iteration,
                      GradientBundle* used) {
  cfg.check(spec.n_players, true);
  profile.check(spec.n_players, grid);
  GradientBundle gb = gradients_for(profile, cfg, spec, grid, iteration);
  const double radius = cfg.projected && cfg.c_bar_g <= 0.0
                            ? default_projection_radius(spec, grid, cfg.ode)
                            : cfg.c_bar_g;
  PolicyProfile next = profile;
  for (int i = 0; i < spec.n_players; ++i) {
    for (int j = 0; j < grid.n_steps(); ++j) {
      next.k[i][j] -= cfg.eta_k[i] * gb.norm_grad_k[i][j];
      next.g[i][j] -= cfg.eta_g[i] * gb.grad_g[i][j];
    }
    if (cfg.projected) next.g[i] = project_l2_ball(next.g[i], radius, grid.dt());
  }
  if (used != nullptr) *used = std::move(gb);
  return next;
}

Rrmse rrmse(const PolicyProfile& profile, const PolicyProfile& reference) {
  if (profile.k.size() != reference.k.size()) {
    fail(ErrorCode::kDimensionMismatch, "profile and reference differ in players");
  }
  return {component_rrmse(profile.k, reference.k, "gain"),
          component_rrmse(profile.g, reference.g, "drift")};
}

RunResult run_learning(const GameSpec& spec, const TimeGrid& grid, const LearnerConfig& cfg,
                       const PolicyProfile& reference, const PolicyProfile& init,
                       bool keep_iterates) {
  spec.validate();
  cfg.check(spec.n_players);
  init.check(spec.n_players, grid);
  reference.check(spec.n_players, grid);
  const PotentialMatrix pm = build_potential_matrix(spec);
  const PolicyProfile minimizer = grid_potential_minimizer(spec, grid, cfg.ode);
  const PotentialValue best = eval_potential(minimizer, pm, spec, grid, cfg.ode);

  LearnerConfig run_cfg = cfg;
  if (run_cfg.projected && run_cfg.c_bar_g <= 0.0) {
    double r = 0.0;
    for (const auto& g : minimizer.g) r = std::max(r, l2_norm(g, grid.dt()));
    run_cfg.c_bar_g = 2.0 * r;
  }

  RunResult out;
  PolicyProfile cur = init;
  for (int it = 0; it <= cfg.n_iters; ++it) {
    if (keep_iterates) out.iterates.push_back(cur);
    RunLogRow row;
    row.iter = it;
    const Rrmse e = rrmse(cur, reference);
    row.rrmse_k = e.k;
    row.rrmse_g = e.g;
    const PotentialValue v = eval_potential(cur, pm, spec, grid, cfg.ode);
    row.phi1_gap = v.phi1 - best.phi1;
    row.phi2_gap = v.phi2 - best.phi2;
    GradientBundle gb;
    PolicyProfile next;
    if (it < cfg.n_iters) {
      next = pg_step(cur, run_cfg, spec, grid, it, &gb);
    } else {
      gb = gradients_for(cur, run_cfg, spec, grid, it);
    }
    row.grad_norm_k = gb.k_norm(grid.dt());
    row.grad_norm_g = gb.g_norm(grid.dt());
    out.log.push_back(row);
    if (it < cfg.n_iters) cur = std::move(next);
  }
  out.final_profile = std::move(cur);
  return out;
}

RateReport validate_rates(const LearnerConfig& cfg, const LandscapeConstants& c) {
  RateReport r;
  const double ek_max = *std::max_element(cfg.eta_k.begin(), cfg.eta_k.end());
  const double eg_max = *std::max_element(cfg.eta_g.begin(), cfg.eta_g.end());
  const double eg_min = *std::min_element(cfg.eta_g.begin(), cfg.eta_g.end());
  r.eta_k_below_c1k = ek_max < c.c1k;
  r.eta_g_below_inv_l = eg_max < 1.0 / c.l;
  r.eta_k_below_half = ek_max < 0.5;
  r.g_rate_condition = eg_min > eg_max / (1.0 + c.m * eg_max);
  if (!r.eta_k_below_c1k) {
    r.warnings.push_back("gain rate " + std::to_string(ek_max) + " exceeds C1K = " +
                         std::to_string(c.c1k));
  }
  if (!r.eta_g_below_inv_l) {
    r.warnings.push_back("drift rate " + std::to_string(eg_max) + " exceeds 1/L = " +
                         std::to_string(1.0 / c.l));
  }
  if (!r.eta_k_below_half) r.warnings.push_back("gain rate is not below 1/2");
  if (!r.g_rate_condition) {
    r.warnings.push_back("drift rates are too heterogeneous for a linear rate");
  }
  return r;
}

}  // namespace lqpg
