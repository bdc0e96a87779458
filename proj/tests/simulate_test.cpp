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

#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <random>

#include "lqpg/equilibrium.hpp"
#include "lqpg/error.hpp"
#include "lqpg/gradients.hpp"
#include "lqpg/simulate.hpp"
#include "test_util.hpp"

namespace lqpg {
namespace {

TEST_CASE("deterministic start without noise stays put") {
  GameSpec spec = testing::zero_game(2);
  spec.sigma = {{0.0}, {0.0}};
  spec.init_var.setZero();
  const TimeGrid grid(1.0, 10);
  const TrajectoryBatch b = sample_trajectories(PolicyProfile::zeros(2, grid), spec, grid, 5, 1);
  for (int k = 0; k < 5; ++k) {
    for (int j = 0; j < grid.n_nodes(); ++j) {
      for (int i = 0; i < 2; ++i) CHECK(b.at(k, j, i) == spec.init_mean(i));
    }
  }
}

TEST_CASE("empirical moments of hand made batches") {
  TrajectoryBatch b;
  b.n_samples = 2;
  b.n_players = 1;
  b.n_nodes = 2;
  b.x = {3.0, 0.0, 3.0, 2.0};
  const EmpiricalMoments m = empirical_moments(b);
  CHECK(m.mean[0][0] == 3.0);
  CHECK(m.var[0][0] == 0.0);
  CHECK(m.mean[0][1] == 1.0);
  CHECK(m.var[0][1] == 2.0);
}

TEST_CASE("batch moments agree with the stored paths") {
  const GameSpec spec = testing::two_player_game(1.0, 1.0);
  const TimeGrid grid(1.0, 20);
  std::mt19937_64 gen(2);
  const PolicyProfile p = testing::random_profile(2, grid, gen);
  const TrajectoryBatch b = sample_trajectories(p, spec, grid, 3000, 9);
  const EmpiricalMoments m = empirical_moments(b);
  for (int i = 0; i < 2; ++i) {
    CHECK(testing::max_abs_diff(m.mean[i], b.mean[i]) <= 1e-12);
    CHECK(testing::max_abs_diff(m.var[i], b.var[i]) <= 1e-12);
  }
  const EmpiricalMoments s = simulate_moments(p, spec, grid, 3000, 9);
  for (int i = 0; i < 2; ++i) {
    CHECK(s.mean[i] == b.mean[i]);
    CHECK(s.var[i] == b.var[i]);
  }
}

TEST_CASE("constant drift moves the batch mean") {
  GameSpec spec = testing::zero_game(1);
  const TimeGrid grid(1.0, 50);
  PolicyProfile p = PolicyProfile::zeros(1, grid);
  for (double& g : p.g[0]) g = 0.7;
  const int ns = 20000;
  const EmpiricalMoments m = simulate_moments(p, spec, grid, ns, 4);
  const double var_t = spec.init_var(0) + 0.04;
  CHECK(std::abs(m.mean[0][50] - (spec.init_mean(0) + 0.7)) <= 4.0 * std::sqrt(var_t / ns));
}

TEST_CASE("reference game moments match the ODE") {
  const GameSpec spec = testing::reference_game();
  const TimeGrid grid(1.0, 200);
  const PolicyProfile ne = solve_equilibrium(spec, grid).policy;
  const int ns = 20000;
  const EmpiricalMoments m = simulate_moments(ne, spec, grid, ns, 17);
  const MomentPath ode = solve_moments(ne, spec, grid);
  // The batch mean is mean(xi) + sigma * mean(W_t) whatever the gains are, so its
  // standard error grows like sqrt(var0 + sigma^2 t).
  for (int i = 0; i < 10; ++i) {
    for (int j = 0; j <= 200; ++j) {
      const double v = ode.var[i].node(j);
      const double mean_var = spec.init_var(i) + 0.25 * 0.25 * grid.node(j);
      CHECK(std::abs(m.mean[i][j] - ode.mean[i].node(j)) <= 4.0 * std::sqrt(mean_var / ns));
      CHECK(std::abs(m.var[i][j] - v) <= 4.0 * v * std::sqrt(2.0 / (ns - 1)));
    }
  }
}

TEST_CASE("moment error scales with the inverse root batch size") {
  const GameSpec spec = testing::two_player_game(1.0, 1.0);
  const TimeGrid grid(1.0, 50);
  std::mt19937_64 gen(12);
  const PolicyProfile p = testing::random_profile(2, grid, gen, -1.5, 0.0, 1.0);
  const MomentPath ode = solve_moments(p, spec, grid);
  auto rms_error = [&](int ns) {
    double acc = 0.0;
    int count = 0;
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
      const EmpiricalMoments m = simulate_moments(p, spec, grid, ns, 1000 + seed);
      for (int i = 0; i < 2; ++i) {
        for (int j = 1; j <= 50; ++j) {
          const double e = m.mean[i][j] - ode.mean[i].node(j);
          acc += e * e;
          ++count;
        }
      }
    }
    return std::sqrt(acc / count);
  };
  const double ratio = rms_error(1000) / rms_error(100000);
  CHECK(ratio >= 5.0);
  CHECK(ratio <= 20.0);
}

TEST_CASE("terminal marginals are close to gaussian") {
  const GameSpec spec = testing::reference_game(1);
  const TimeGrid grid(1.0, 100);
  std::mt19937_64 gen(6);
  const PolicyProfile p = testing::random_profile(10, grid, gen, -1.0, 0.5, 2.0);
  const int ns = 20000;
  const TrajectoryBatch b = sample_trajectories(p, spec, grid, ns, 3);
  for (int i = 0; i < 10; ++i) {
    const double m = b.mean[i][100];
    const double sd = std::sqrt(b.var[i][100]);
    double skew = 0.0;
    for (int k = 0; k < ns; ++k) {
      const double z = (b.at(k, 100, i) - m) / sd;
      skew += z * z * z;
    }
    skew /= ns;
    CHECK(std::abs(skew) <= 5.0 * std::sqrt(6.0 / ns));
  }
}

TEST_CASE("sampling is deterministic and thread independent") {
  const GameSpec spec = testing::reference_game();
  const TimeGrid grid(1.0, 30);
  std::mt19937_64 gen(1);
  const PolicyProfile p = testing::random_profile(10, grid, gen);
  const TrajectoryBatch a = sample_trajectories(p, spec, grid, 9000, 77);
  const TrajectoryBatch b = sample_trajectories(p, spec, grid, 9000, 77);
  CHECK(a.x == b.x);
  CHECK(a.var == b.var);
  const char* prev = std::getenv("LQPG_THREADS");
  const std::string saved = prev ? prev : "";
  setenv("LQPG_THREADS", "3", 1);
  const TrajectoryBatch c = sample_trajectories(p, spec, grid, 9000, 77);
  if (prev) {
    setenv("LQPG_THREADS", saved.c_str(), 1);
  } else {
    unsetenv("LQPG_THREADS");
  }
  CHECK(a.x == c.x);
  CHECK(a.mean == c.mean);
  CHECK(a.var == c.var);
  const TrajectoryBatch d = sample_trajectories(p, spec, grid, 9000, 78);
  CHECK(a.x != d.x);
}

TEST_CASE("sampled cost by hand") {
  // One deterministic path, unit drift over a single unit cell.
  GameSpec spec = testing::zero_game(1);
  const TimeGrid grid(1.0, 1);
  PolicyProfile p = PolicyProfile::zeros(1, grid);
  p.g[0][0] = 1.0;
  TrajectoryBatch b;
  b.n_samples = 1;
  b.n_players = 1;
  b.n_nodes = 2;
  b.x = {0.0, 1.0};
  b.mean = {{0.0, 1.0}};
  b.var = {{0.0, 0.0}};
  CHECK(sampled_cost(b, p, spec, grid).mean[0] == 1.0);

  spec.sigma = {{0.0}};
  spec.init_var.setZero();
  const SampledCost c = sampled_cost(p, spec, grid, 4, 0);
  CHECK(c.mean[0] == 1.0);
  CHECK(c.std_error[0] == 0.0);

  p.g[0][0] = 0.0;
  CHECK(sampled_cost(p, spec, grid, 4, 0).mean[0] == 0.0);

  b.n_nodes = 3;
  CHECK_THROWS_AS(sampled_cost(b, p, spec, grid), Error);
}

TEST_CASE("stored and streaming costs agree") {
  const GameSpec spec = testing::two_player_game(1.0, 0.5);
  const TimeGrid grid(1.0, 40);
  std::mt19937_64 gen(3);
  const PolicyProfile p = testing::random_profile(2, grid, gen);
  const SampledCost a = sampled_cost(sample_trajectories(p, spec, grid, 5000, 8), p, spec, grid);
  const SampledCost b = sampled_cost(p, spec, grid, 5000, 8);
  for (int i = 0; i < 2; ++i) {
    CHECK(a.mean[i] == doctest::Approx(b.mean[i]).epsilon(1e-12));
    CHECK(a.std_error[i] == doctest::Approx(b.std_error[i]).epsilon(1e-9));
  }
}

TEST_CASE("sampled cost converges to the exact cost") {
  const GameSpec spec = testing::two_player_game(1.0, 0.5);
  const TimeGrid grid(1.0, 400);
  std::mt19937_64 gen(10);
  PolicyProfile p = PolicyProfile::zeros(2, grid);
  // Slowly varying policy so the time discretization bias is small.
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 400; ++j) {
      const double t = grid.node(j);
      p.k[i][j] = -1.0 + 0.5 * std::sin(3.0 * t + i);
      p.g[i][j] = 0.8 * std::cos(2.0 * t - i);
    }
  }
  const CostBreakdown exact = eval_costs(p, spec, grid);
  const SampledCost mc = sampled_cost(p, spec, grid, 200000, 5);
  for (int i = 0; i < 2; ++i) {
    CHECK(std::abs(mc.mean[i] - exact.total[i]) <= 3.0 * mc.std_error[i]);
  }
}

TEST_CASE("sampled gradients approach the exact ones") {
  const GameSpec spec = testing::reference_game(2);
  const TimeGrid grid(1.0, 50);
  std::mt19937_64 gen(13);
  const PolicyProfile p = testing::random_profile(10, grid, gen, -1.5, 0.0, 2.0);
  const GradientBundle ex = exact_gradients(p, spec, grid);
  auto error = [&](int ns) {
    double acc = 0.0, ref = 0.0;
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
      const GradientBundle mc = stochastic_gradients(p, spec, grid, ns, 500 + seed);
      for (int i = 0; i < 10; ++i) {
        for (int j = 0; j < 50; ++j) {
          acc += std::pow(mc.grad_g[i][j] - ex.grad_g[i][j], 2) +
                 std::pow(mc.grad_k[i][j] - ex.grad_k[i][j], 2);
          ref += ex.grad_g[i][j] * ex.grad_g[i][j] + ex.grad_k[i][j] * ex.grad_k[i][j];
        }
      }
    }
    return std::sqrt(acc / ref);
  };
  const double coarse = error(1000);
  const double fine = error(100000);
  CHECK(fine < 0.01);
  CHECK(coarse / fine >= 5.0);
  CHECK(coarse / fine <= 20.0);
}

TEST_CASE("sampled gradients at the equilibrium are at noise level") {
  const GameSpec spec = testing::reference_game();
  const TimeGrid grid(1.0, 200);
  const PolicyProfile ne = solve_equilibrium(spec, grid).policy;
  const int ns = 20000;
  const GradientBundle mc = stochastic_gradients(ne, spec, grid, ns, 3);
  const double scale = 1.0 / std::sqrt(static_cast<double>(ns));
  for (int i = 0; i < 10; ++i) {
    CHECK(l2_norm(mc.grad_k[i], grid.dt()) <= 10.0 * scale);
    CHECK(l2_norm(mc.grad_g[i], grid.dt()) <= 10.0 * scale);
  }
  CHECK(mc.k_norm(grid.dt()) + mc.g_norm(grid.dt()) > 0.0);
}

TEST_CASE("noise free gain gradient vanishes") {
  GameSpec spec = testing::zero_game(2);
  spec.sigma = {{0.0}, {0.0}};
  spec.init_var.setConstant(1e-12);
  const TimeGrid grid(1.0, 20);
  std::mt19937_64 gen(2);
  const PolicyProfile p = testing::random_profile(2, grid, gen);
  const GradientBundle g = stochastic_gradients(p, spec, grid, 100, 1);
  for (const auto& gk : g.grad_k) {
    for (double v : gk) CHECK(std::abs(v) <= 1e-10);
  }
}

}  // namespace
}  // namespace lqpg
