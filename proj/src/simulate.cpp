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

#include "lqpg/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include "lqpg/error.hpp"
#include "lqpg/parallel.hpp"
#include "lqpg/rng.hpp"

namespace lqpg {
namespace {

constexpr int kChunk = 4096;

// Called after the batch moments at `node` are known and before stepping.
using StepObserver =
    std::function<void(int node, const std::vector<double>& x, const std::vector<double>& mean)>;

EmpiricalMoments run_batch(const PolicyProfile& profile, const GameSpec& spec,
                           const TimeGrid& grid, int n_samples, std::uint64_t seed,
                           const StepObserver& observe) {
  // A zero initial variance (deterministic start) is accepted here only.
  GameSpec checked = spec;
  for (int i = 0; i < spec.init_var.size(); ++i) {
    if (spec.init_var(i) < 0.0) fail(ErrorCode::kInvalidSpec, "initial variance is negative");
    if (spec.init_var(i) == 0.0) checked.init_var(i) = 1.0;
  }
  checked.validate();
  spec.check_grid(grid);
  profile.check(spec.n_players, grid);
  if (n_samples < 2) fail(ErrorCode::kInvalidSpec, "need at least two samples");
  const int n = spec.n_players;
  const int nt = grid.n_steps();
  const int pairs = (n + 1) / 2;
  const double dt = grid.dt();
  const double sqdt = std::sqrt(dt);
  const CounterNormal rng(seed);
  const std::size_t ns = static_cast<std::size_t>(n_samples);
  const std::size_t n_chunks = (ns + kChunk - 1) / kChunk;

  std::vector<std::uint64_t> keys(ns);
  std::vector<double> x(ns * n);
  std::vector<double> partial(n_chunks * 2 * n);
  std::vector<double> mean(n), shift(n), kk(n), gg(n), sd(n);
  EmpiricalMoments mom;
  mom.mean.assign(n, ScalarPath(nt + 1));
  mom.var.assign(n, ScalarPath(nt + 1));

  for (int i = 0; i < n; ++i) shift[i] = spec.init_mean(i);

  // step < 0 draws the initial condition.
  auto sweep = [&](int step) {
    parallel_for(n_chunks, [&](std::size_t c) {
      const std::size_t begin = c * kChunk;
      const std::size_t end = std::min(ns, begin + kChunk);
      double* acc = &partial[c * 2 * n];
      std::fill(acc, acc + 2 * n, 0.0);
      for (std::size_t k = begin; k < end; ++k) {
        double* xk = &x[k * n];
        if (step < 0) {
          keys[k] = rng.path_key(k);
          for (int p = 0; p < pairs; ++p) {
            const auto [z1, z2] = rng.pair(keys[k], 0, p);
            const int i = 2 * p;
            xk[i] = spec.init_mean(i) + std::sqrt(spec.init_var(i)) * z1;
            if (i + 1 < n) xk[i + 1] = spec.init_mean(i + 1) + std::sqrt(spec.init_var(i + 1)) * z2;
          }
        } else {
          for (int p = 0; p < pairs; ++p) {
            const auto [z1, z2] = rng.pair(keys[k], step + 1, p);
            const int i = 2 * p;
            xk[i] += (kk[i] * (xk[i] - mean[i]) + gg[i]) * dt + sd[i] * z1;
            if (i + 1 < n) {
              xk[i + 1] += (kk[i + 1] * (xk[i + 1] - mean[i + 1]) + gg[i + 1]) * dt +
                           sd[i + 1] * z2;
            }
          }
        }
        for (int i = 0; i < n; ++i) {
          const double dev = xk[i] - shift[i];
          acc[i] += dev;
          acc[n + i] += dev * dev;
        }
      }
    });
  };
  auto reduce = [&](int node) {
    for (int i = 0; i < n; ++i) {
      double s1 = 0.0;
      double s2 = 0.0;
      for (std::size_t c = 0; c < n_chunks; ++c) {
        s1 += partial[c * 2 * n + i];
        s2 += partial[c * 2 * n + n + i];
      }
      const double m = s1 / ns;
      mean[i] = shift[i] + m;
      const double v = (s2 - ns * m * m) / (ns - 1);
      if (!std::isfinite(mean[i]) || !std::isfinite(v)) {
        fail(ErrorCode::kNonFiniteBlowup, "simulated paths left the finite range");
      }
      mom.mean[i][node] = mean[i];
      mom.var[i][node] = std::max(v, 0.0);
      shift[i] = mean[i];
    }
  };

  sweep(-1);
  reduce(0);
  for (int j = 0; j < nt; ++j) {
    if (observe) observe(j, x, mean);
    for (int i = 0; i < n; ++i) {
      kk[i] = profile.k[i][j];
      gg[i] = profile.g[i][j];
      sd[i] = spec.sigma_cell(i, j) * sqdt;
    }
    sweep(j);
    reduce(j + 1);
  }
  if (observe) observe(nt, x, mean);
  return mom;
}

// Accumulates per-path costs; x and mean are taken at the left end of each cell.
class CostAccumulator {
 public:
  CostAccumulator(const PolicyProfile& profile, const GameSpec& spec, const TimeGrid& grid,
                  int n_samples)
      : profile_(profile), spec_(spec), grid_(grid), n_(spec.n_players),
        cost_(static_cast<std::size_t>(n_samples) * spec.n_players, 0.0) {}

  void observe(int node, const double* x, std::size_t n_samples,
               const std::vector<double>& mean) {
    const int nt = grid_.n_steps();
    const double dt = grid_.dt();
    for (std::size_t k = 0; k < n_samples; ++k) {
      const double* xk = x + k * n_;
      double* ck = &cost_[k * n_];
      for (int i = 0; i < n_; ++i) {
        if (node < nt) {
          const double u = profile_.k[i][node] * (xk[i] - mean[i]) + profile_.g[i][node];
          double q = 0.0;
          const Eigen::MatrixXd& qi = spec_.q_mats[i];
          for (int a = 0; a < n_; ++a) {
            double row = 0.0;
            for (int b = 0; b < n_; ++b) row += qi(a, b) * xk[b];
            q += xk[a] * row;
          }
          ck[i] += (u * u + q) * dt;
        } else {
          const double miss = xk[i] - spec_.d_target(i);
          ck[i] += spec_.gamma(i) * miss * miss;
        }
      }
    }
  }

  SampledCost finish() const {
    const std::size_t ns = cost_.size() / n_;
    SampledCost out;
    out.mean.assign(n_, 0.0);
    out.std_error.assign(n_, 0.0);
    for (int i = 0; i < n_; ++i) {
      double s = 0.0;
      for (std::size_t k = 0; k < ns; ++k) s += cost_[k * n_ + i];
      const double m = s / ns;
      double v = 0.0;
      for (std::size_t k = 0; k < ns; ++k) {
        const double d = cost_[k * n_ + i] - m;
        v += d * d;
      }
      out.mean[i] = m;
      out.std_error[i] = std::sqrt(v / (ns - 1) / ns);
    }
    return out;
  }

 private:
  const PolicyProfile& profile_;
  const GameSpec& spec_;
  const TimeGrid& grid_;
  int n_;
  std::vector<double> cost_;
};

}  // namespace

TrajectoryBatch sample_trajectories(const PolicyProfile& profile, const GameSpec& spec,
                                    const TimeGrid& grid, int n_samples,
                                    std::uint64_t seed) {
  TrajectoryBatch b;
  b.n_samples = n_samples;
  b.n_players = spec.n_players;
  b.n_nodes = grid.n_nodes();
  b.x.resize(static_cast<std::size_t>(n_samples) * b.n_nodes * b.n_players);
  const int n = spec.n_players;
  auto store = [&](int node, const std::vector<double>& x, const std::vector<double>&) {
    for (int k = 0; k < n_samples; ++k) {
      std::copy_n(&x[static_cast<std::size_t>(k) * n], n,
                  &b.x[(static_cast<std::size_t>(k) * b.n_nodes + node) * n]);
    }
  };
  EmpiricalMoments mom = run_batch(profile, spec, grid, n_samples, seed, store);
  b.mean = std::move(mom.mean);
  b.var = std::move(mom.var);
  return b;
}

EmpiricalMoments simulate_moments(const PolicyProfile& profile, const GameSpec& spec,
                                  const TimeGrid& grid, int n_samples, std::uint64_t seed) {
  return run_batch(profile, spec, grid, n_samples, seed, nullptr);
}

EmpiricalMoments empirical_moments(const TrajectoryBatch& batch) {
  if (batch.n_samples < 2) fail(ErrorCode::kInvalidSpec, "need at least two samples");
  if (batch.x.size() != static_cast<std::size_t>(batch.n_samples) * batch.n_nodes *
                            batch.n_players) {
    fail(ErrorCode::kDimensionMismatch, "batch storage does not match its shape");
  }
  EmpiricalMoments mom;
  mom.mean.assign(batch.n_players, ScalarPath(batch.n_nodes, 0.0));
  mom.var.assign(batch.n_players, ScalarPath(batch.n_nodes, 0.0));
  const double ns = batch.n_samples;
  for (int i = 0; i < batch.n_players; ++i) {
    for (int j = 0; j < batch.n_nodes; ++j) {
      double s = 0.0;
      for (int k = 0; k < batch.n_samples; ++k) s += batch.at(k, j, i);
      const double m = s / ns;
      double v = 0.0;
      for (int k = 0; k < batch.n_samples; ++k) {
        const double d = batch.at(k, j, i) - m;
        v += d * d;
      }
      mom.mean[i][j] = m;
      mom.var[i][j] = v / (ns - 1.0);
    }
  }
  return mom;
}

SampledCost sampled_cost(const TrajectoryBatch& batch, const PolicyProfile& profile,
                         const GameSpec& spec, const TimeGrid& grid) {
  if (batch.n_players != spec.n_players || batch.n_nodes != grid.n_nodes()) {
    fail(ErrorCode::kDimensionMismatch, "batch does not match the game");
  }
  CostAccumulator acc(profile, spec, grid, batch.n_samples);
  const int n = spec.n_players;
  std::vector<double> x(static_cast<std::size_t>(batch.n_samples) * n);
  std::vector<double> mean(n);
  for (int node = 0; node < batch.n_nodes; ++node) {
    for (int k = 0; k < batch.n_samples; ++k) {
      for (int i = 0; i < n; ++i) x[static_cast<std::size_t>(k) * n + i] = batch.at(k, node, i);
    }
    for (int i = 0; i < n; ++i) mean[i] = batch.mean[i][node];
    acc.observe(node, x.data(), batch.n_samples, mean);
  }
  return acc.finish();
}

SampledCost sampled_cost(const PolicyProfile& profile, const GameSpec& spec,
                         const TimeGrid& grid, int n_samples, std::uint64_t seed) {
  CostAccumulator acc(profile, spec, grid, n_samples);
  run_batch(profile, spec, grid, n_samples, seed,
            [&](int node, const std::vector<double>& x, const std::vector<double>& mean) {
              acc.observe(node, x.data(), n_samples, mean);
            });
  return acc.finish();
}

GradientBundle stochastic_gradients(const PolicyProfile& profile, const GameSpec& spec,
                                    const TimeGrid& grid, int n_samples,
                                    std::uint64_t seed, const OdeOptions& opts) {
  const EmpiricalMoments mom = simulate_moments(profile, spec, grid, n_samples, seed);
  const PotentialMatrix pm = build_potential_matrix(spec);
  const int n = spec.n_players;
  const int nt = grid.n_steps();
  const int r = opts.substeps;
  const double dt = grid.dt();
  GradientBundle gb;
  gb.grad_k.assign(n, CellPath(nt));
  gb.grad_g.assign(n, CellPath(nt));
  gb.norm_grad_k.assign(n, CellPath(nt));
  gb.var_cell.assign(n, CellPath(nt));
  gb.p_k.resize(n);
  for (int i = 0; i < n; ++i) {
    gb.p_k[i] = riccati_path(spec.q_mats[i](i, i), spec.gamma(i), grid, profile.k[i], opts);
    // Variance interpolated linearly between the batch estimates.
    SampledPath<double> th;
    th.resolution = r;
    th.samples.resize(static_cast<std::size_t>(nt) * r + 1);
    for (int j = 0; j < nt; ++j) {
      for (int s = 0; s < r; ++s) {
        const double w = static_cast<double>(s) / r;
        th.samples[j * r + s] = (1.0 - w) * mom.var[i][j] + w * mom.var[i][j + 1];
      }
    }
    th.samples[static_cast<std::size_t>(nt) * r] = mom.var[i][nt];
    for (int j = 0; j < nt; ++j) {
      const double avg = 0.5 * (mom.var[i][j] + mom.var[i][j + 1]);
      const double pth = cell_simpson(gb.p_k[i], th, j, dt);
      gb.grad_k[i][j] = 2.0 * (pth / dt + profile.k[i][j] * avg);
      gb.var_cell[i][j] = avg;
      if (!(avg > 0.0)) {
        fail(ErrorCode::kVariancePositivityLoss,
             "batch variance of player " + std::to_string(i) + " vanished");
      }
      gb.norm_grad_k[i][j] = gb.grad_k[i][j] / avg;
    }
  }
  gb.xi = mean_adjoint(mom.mean, pm.q_hat, spec, grid);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < nt; ++j) gb.grad_g[i][j] = 2.0 * (profile.g[i][j] + gb.xi[i][j]);
  }
  return gb;
}

}  // namespace lqpg
