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
#include <random>

#include "lqpg/equilibrium.hpp"
#include "lqpg/gradients.hpp"
#include "test_util.hpp"

namespace lqpg {
namespace {

// Central differences of the own cost on every cell; the analytic gradient is a
// cell density, so the cost moves by dt times it.
void check_against_differences(const GameSpec& spec, const TimeGrid& grid,
                               const PolicyProfile& prof) {
  const double h = 1e-5;
  const GradientBundle gb = exact_gradients(prof, spec, grid);
  for (int i = 0; i < spec.n_players; ++i) {
    for (int which = 0; which < 2; ++which) {
      const CellPath& an = which == 0 ? gb.grad_k[i] : gb.grad_g[i];
      double top = 0.0;
      for (double v : an) top = std::max(top, std::abs(v));
      for (int j = 0; j < grid.n_steps(); ++j) {
        PolicyProfile up = prof, dn = prof;
        (which == 0 ? up.k : up.g)[i][j] += h;
        (which == 0 ? dn.k : dn.g)[i][j] -= h;
        const double fd =
            (eval_costs(up, spec, grid).total[i] - eval_costs(dn, spec, grid).total[i]) /
            (2.0 * h * grid.dt());
        CHECK(std::abs(fd - an[j]) <= 1e-4 * std::max(std::abs(an[j]), 1e-2 * top));
      }
    }
  }
}

TEST_CASE("zero game costs and potential vanish") {
  const GameSpec spec = testing::zero_game(3);
  const TimeGrid grid(1.0, 20);
  const PolicyProfile zero = PolicyProfile::zeros(3, grid);
  const CostBreakdown c = eval_costs(zero, spec, grid);
  for (double v : c.total) CHECK(v == 0.0);
  const PotentialMatrix pm = build_potential_matrix(spec);
  CHECK(eval_potential(zero, pm, spec, grid).phi() == 0.0);
  const GradientBundle g = exact_gradients(zero, spec, grid);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 20; ++j) {
      CHECK(g.grad_k[i][j] == 0.0);
      CHECK(g.grad_g[i][j] == 0.0);
    }
  }
}

TEST_CASE("cost of a pure drift") {
  // One player, no state cost, G = 1: J = int G^2 dt = T.
  GameSpec spec = testing::zero_game(1);
  spec.horizon = 2.0;
  const TimeGrid grid(2.0, 10);
  PolicyProfile p = PolicyProfile::zeros(1, grid);
  for (double& g : p.g[0]) g = 1.0;
  CHECK(eval_costs(p, spec, grid).total[0] == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("gradients match central differences") {
  std::mt19937_64 gen(3);
  const TimeGrid grid(1.0, 12);
  for (const GameSpec& spec : {testing::two_player_game(1.0, 1.0),
                               testing::two_player_game(2.0, 0.5), testing::er_game(0.5, 7, 4)}) {
    for (int s = 0; s < 2; ++s) {
      check_against_differences(spec, grid, testing::random_profile(spec.n_players, grid, gen));
    }
  }
}

TEST_CASE("gain gradient vanishes without state costs") {
  GameSpec spec = testing::zero_game(2);
  const TimeGrid grid(1.0, 20);
  std::mt19937_64 gen(1);
  PolicyProfile p = testing::random_profile(2, grid, gen);
  for (auto& k : p.k) std::fill(k.begin(), k.end(), 0.0);
  const GradientBundle g = exact_gradients(p, spec, grid);
  for (const auto& gk : g.grad_k) {
    for (double v : gk) CHECK(v == 0.0);
  }
}

TEST_CASE("potential and own gradients coincide in a potential game") {
  const GameSpec spec = testing::reference_game(2);
  const TimeGrid grid(1.0, 40);
  const PotentialMatrix pm = build_potential_matrix(spec);
  std::mt19937_64 gen(8);
  const PolicyProfile p = testing::random_profile(10, grid, gen);
  const GradientBundle own = exact_gradients(p, spec, grid);
  const GradientBundle pot = potential_gradients(p, pm, spec, grid);
  for (int i = 0; i < 10; ++i) {
    CHECK(testing::max_abs_diff(own.grad_k[i], pot.grad_k[i]) <= 1e-9);
    CHECK(testing::max_abs_diff(own.grad_g[i], pot.grad_g[i]) <= 1e-9);
  }
}

TEST_CASE("potential property") {
  const TimeGrid grid(1.0, 40);
  std::mt19937_64 gen(21);
  auto draw = [&](const GameSpec& spec, std::vector<PolicyProfile>& a,
                  std::vector<PolicyProfile>& b) {
    for (int s = 0; s < 4; ++s) {
      a.push_back(testing::random_profile(spec.n_players, grid, gen));
      b.push_back(testing::random_profile(spec.n_players, grid, gen));
    }
  };
  {
    const GameSpec spec = testing::reference_game(3);
    std::vector<PolicyProfile> a, b;
    draw(spec, a, b);
    const PotentialCheck pc = verify_potential_property(spec, grid, a, b, 1e-9);
    CHECK(pc.ok);
    CHECK(pc.max_violation <= 1e-9 * std::max(1.0, pc.bound / 1e-9));
  }
  {
    const GameSpec spec = testing::er_game(0.5, 4);
    std::vector<PolicyProfile> a, b;
    draw(spec, a, b);
    const PotentialCheck pc = verify_potential_property(spec, grid, a, b, 1e-9);
    CHECK(pc.ok);
    CHECK(pc.max_violation > 1e-6);
  }
  {
    GameSpec spec = testing::zero_game(1);
    spec.q_mats[0](0, 0) = 1.5;
    std::vector<PolicyProfile> a, b;
    draw(spec, a, b);
    const PotentialCheck pc = verify_potential_property(spec, grid, a, b, 1e-9);
    CHECK(pc.max_violation <= 1e-12 * std::max(1.0, pc.bound));
  }
}

TEST_CASE("landscape constants on simple games") {
  const GameSpec spec = testing::two_player_game(1.0, 1.0);
  const TimeGrid grid(1.0, 50);
  const RateSchedule rates{{0.1, 0.1}, {0.1, 0.1}};
  const LandscapeConstants lc =
      landscape_constants(spec, grid, PolicyProfile::zeros(2, grid).k, 1.0, rates);
  CHECK(lc.m == 2.0);
  CHECK(lc.l == doctest::Approx(6.0).epsilon(1e-12));
  CHECK(lc.delta1 == 0.0);
  CHECK(lc.delta2 == 0.0);
  CHECK(lc.alpha == 0.0);
  CHECK(lc.var_lower > 0.0);
  CHECK(lc.var_lower <= lc.var_upper);
  CHECK(lc.c1k == doctest::Approx(lc.var_lower / (2.0 * lc.var_upper)));

  const GameSpec asym = testing::two_player_game(2.0, 0.0);
  const LandscapeConstants la =
      landscape_constants(asym, grid, PolicyProfile::zeros(2, grid).k, 1.0, rates);
  CHECK(la.alpha > 0.0);
  CHECK(la.delta() > 0.0);
}

TEST_CASE("bregman sandwich and gradient dominance") {
  const GameSpec spec = testing::reference_game(5);
  const TimeGrid grid(1.0, 50);
  const PotentialMatrix pm = build_potential_matrix(spec);
  const RateSchedule rates{std::vector<double>(10, 0.1), std::vector<double>(10, 0.1)};
  const LandscapeConstants lc =
      landscape_constants(spec, grid, PolicyProfile::zeros(10, grid).k, 0.0, rates);
  const PolicyProfile star = grid_potential_minimizer(spec, grid);
  const double phi1_star = eval_potential(star, pm, spec, grid).phi1;
  std::mt19937_64 gen(9);
  const double dt = grid.dt();
  for (int s = 0; s < 6; ++s) {
    const PolicyProfile a = testing::random_profile(10, grid, gen);
    const PolicyProfile b = testing::random_profile(10, grid, gen);
    const GradientBundle ga = potential_gradients(a, pm, spec, grid);
    double d2 = 0.0, lin = 0.0;
    for (int i = 0; i < 10; ++i) {
      for (int j = 0; j < 50; ++j) {
        const double d = b.g[i][j] - a.g[i][j];
        d2 += dt * d * d;
        lin += dt * d * ga.grad_g[i][j];
      }
    }
    const double gap = eval_potential(b, pm, spec, grid).phi2 -
                       eval_potential(a, pm, spec, grid).phi2 - lin;
    CHECK(gap >= lc.m / 2.0 * d2 - 1e-9);
    CHECK(gap <= lc.l / 2.0 * d2 + 1e-9);

    double dom = 0.0;
    for (int i = 0; i < 10; ++i) {
      for (int j = 0; j < 50; ++j) dom += dt * ga.norm_grad_k[i][j] * ga.norm_grad_k[i][j];
    }
    const double k_gap = eval_potential(a, pm, spec, grid).phi1 - phi1_star;
    CHECK(k_gap >= -1e-12);
    CHECK(k_gap <= lc.var_star_sup / 4.0 * dom);
  }
}

TEST_CASE("mean part of the potential is exactly quadratic in the drift") {
  // Phi^2 restricted to drifts has constant Hessian, so a midpoint identity holds.
  const GameSpec spec = testing::reference_game(6);
  const TimeGrid grid(1.0, 30);
  const PotentialMatrix pm = build_potential_matrix(spec);
  std::mt19937_64 gen(4);
  const PolicyProfile a = testing::random_profile(10, grid, gen);
  PolicyProfile b = testing::random_profile(10, grid, gen);
  b.k = a.k;
  PolicyProfile mid = a;
  for (int i = 0; i < 10; ++i) {
    for (int j = 0; j < 30; ++j) mid.g[i][j] = 0.5 * (a.g[i][j] + b.g[i][j]);
  }
  const double fa = eval_potential(a, pm, spec, grid).phi2;
  const double fb = eval_potential(b, pm, spec, grid).phi2;
  const double fm = eval_potential(mid, pm, spec, grid).phi2;
  const GradientBundle gm = potential_gradients(mid, pm, spec, grid);
  double lin = 0.0;
  for (int i = 0; i < 10; ++i) {
    for (int j = 0; j < 30; ++j) lin += grid.dt() * gm.grad_g[i][j] * (b.g[i][j] - a.g[i][j]);
  }
  CHECK(fb - fa == doctest::Approx(lin).epsilon(1e-10));
  CHECK(fm <= 0.5 * (fa + fb));
}

}  // namespace
}  // namespace lqpg
