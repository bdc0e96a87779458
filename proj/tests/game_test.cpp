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

#include <random>

#include "lqpg/error.hpp"
#include "lqpg/game.hpp"
#include "test_util.hpp"

namespace lqpg {
namespace {

Eigen::MatrixXd weights2(double w12, double w21) {
  Eigen::MatrixXd w(2, 2);
  w << 0.0, w12, w21, 0.0;
  return w;
}

TEST_CASE("flocking costs expand the pairwise squares") {
  const auto q = flocking_costs(weights2(1.0, 1.0));
  Eigen::MatrixXd expected(2, 2);
  expected << 1.0, -1.0, -1.0, 1.0;
  CHECK((q[0] - expected).norm() == 0.0);
  CHECK((q[1] - expected).norm() == 0.0);

  const auto zero = flocking_costs(Eigen::MatrixXd::Zero(3, 3));
  for (const auto& m : zero) CHECK(m.norm() == 0.0);
}

TEST_CASE("potential matrix of symmetric flocking pair") {
  const GameSpec spec = testing::two_player_game(1.0, 1.0);
  const PotentialMatrix pm = build_potential_matrix(spec);
  Eigen::MatrixXd expected(2, 2);
  expected << 1.0, -1.0, -1.0, 1.0;
  CHECK((pm.q - expected).norm() < 1e-15);
  CHECK((pm.q_sym - expected).norm() < 1e-15);
  CHECK(pm.c_q == 0.0);
}

TEST_CASE("potential matrix of zero costs") {
  const PotentialMatrix pm = build_potential_matrix(testing::zero_game(3));
  CHECK(pm.q.norm() == 0.0);
  CHECK(pm.c_q == 0.0);
}

TEST_CASE("one sided weight gives coupling gap two") {
  const PotentialMatrix pm = build_potential_matrix(testing::two_player_game(2.0, 0.0));
  CHECK(pm.c_q == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("assumption report flags") {
  const GameSpec sym = testing::two_player_game(1.0, 1.0);
  const AssumptionReport a = check_assumptions(sym, build_potential_matrix(sym));
  CHECK(a.q_sym_psd);
  CHECK(a.pairwise_symmetric);

  const GameSpec asym = testing::two_player_game(1.0, 0.0);
  const AssumptionReport b = check_assumptions(asym, build_potential_matrix(asym));
  CHECK_FALSE(b.pairwise_symmetric);
  CHECK(b.c_q > 0.0);

  // Mean-field weights with row sums below one.
  Eigen::MatrixXd w(3, 3);
  w << 0.0, 0.3, 0.4, 0.2, 0.0, 0.5, 0.45, 0.45, 0.0;
  const GameSpec mf = make_game(mean_field_flocking_costs(w), 1.0, 0.1, 1.0, 0.1,
                                Eigen::VectorXd::Zero(3), Eigen::VectorXd::Ones(3));
  const AssumptionReport c = check_assumptions(mf, build_potential_matrix(mf));
  CHECK(c.q_sym_psd);
}

TEST_CASE("reference network game satisfies the assumptions") {
  const GameSpec spec = testing::reference_game();
  CHECK_NOTHROW(spec.validate());
  const AssumptionReport r = check_assumptions(spec, build_potential_matrix(spec));
  CHECK(r.q_sym_psd);
  CHECK(r.pairwise_symmetric);
  for (const auto& q : spec.q_mats) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(q);
    CHECK(es.eigenvalues().minCoeff() > -1e-12);
  }
}

TEST_CASE("alpha bound formula") {
  PotentialMatrix pm;
  pm.c_q = 0.0;
  CHECK(alpha_upper_bound(pm, 7.0, 3.0) == 0.0);
  pm.c_q = 2.0;
  CHECK(alpha_upper_bound(pm, 4.0, 1.0) == doctest::Approx(26.0));
  CHECK(alpha_upper_bound(pm, 0.0, 0.0) == 0.0);
}

TEST_CASE("random flocking potentials are diagonally dominant") {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> u(0.0, 2.0);
  std::bernoulli_distribution keep(0.6);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + trial % 7;
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (i != j && keep(gen)) w(i, j) = u(gen);
      }
    }
    GameSpec spec = make_game(flocking_costs(w), 1.0, 0.1, 1.0, 0.1, Eigen::VectorXd::Zero(n),
                              Eigen::VectorXd::Zero(n));
    const PotentialMatrix pm = build_potential_matrix(spec);
    for (int i = 0; i < n; ++i) {
      CHECK(pm.q_sym(i, i) >= 0.0);
      double off = 0.0;
      for (int j = 0; j < n; ++j) off += j == i ? 0.0 : std::abs(pm.q_sym(i, j));
      CHECK(pm.q_sym(i, i) >= off - 1e-12);
    }
  }
}

TEST_CASE("cost matrices reproduce the quadratic forms") {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> z;
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 2 + trial % 5;
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) w(i, j) = i == j ? 0.0 : u(gen) / n;
    }
    Eigen::VectorXd x(n);
    for (int i = 0; i < n; ++i) x(i) = z(gen);
    const auto fl = flocking_costs(w);
    const auto mf = mean_field_flocking_costs(w);
    for (int i = 0; i < n; ++i) {
      double pair_sum = 0.0;
      double avg = 0.0;
      for (int j = 0; j < n; ++j) {
        pair_sum += w(i, j) * (x(i) - x(j)) * (x(i) - x(j));
        avg += w(i, j) * x(j);
      }
      CHECK(x.dot(fl[i] * x) == doctest::Approx(pair_sum).epsilon(1e-12));
      CHECK(x.dot(mf[i] * x) == doctest::Approx((x(i) - avg) * (x(i) - avg)).epsilon(1e-12));
    }
  }
}

TEST_CASE("weight validation errors") {
  Eigen::MatrixXd neg = weights2(-1.0, 1.0);
  CHECK_THROWS_AS(flocking_costs(neg), Error);
  try {
    flocking_costs(neg);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kNegativeWeight);
  }
  try {
    mean_field_flocking_costs(Eigen::MatrixXd::Zero(2, 3));
    FAIL("expected a dimension error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kDimensionMismatch);
  }
}

ErrorCode validate_code(const GameSpec& s) {
  try {
    s.validate();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("validation passed unexpectedly");
  return ErrorCode::kIo;
}

TEST_CASE("spec validation errors") {
  GameSpec s = testing::two_player_game(1.0, 1.0);
  CHECK_NOTHROW(s.validate());

  GameSpec bad_var = s;
  bad_var.init_var(0) = 0.0;
  CHECK(validate_code(bad_var) == ErrorCode::kInvalidSpec);

  GameSpec bad_len = s;
  bad_len.gamma = Eigen::VectorXd::Ones(3);
  CHECK(validate_code(bad_len) == ErrorCode::kDimensionMismatch);

  GameSpec bad_sym = s;
  bad_sym.q_mats[0](0, 1) = 0.5;
  CHECK(validate_code(bad_sym) == ErrorCode::kInvalidSpec);

  GameSpec indefinite = s;
  indefinite.q_mats[0] << 1.0, 2.0, 2.0, 1.0;
  CHECK(validate_code(indefinite) == ErrorCode::kInvalidSpec);

  GameSpec bad_sigma = s;
  bad_sigma.sigma[1] = {-0.1};
  CHECK(validate_code(bad_sigma) == ErrorCode::kInvalidSpec);

  GameSpec bad_horizon = s;
  bad_horizon.horizon = 0.0;
  CHECK(validate_code(bad_horizon) == ErrorCode::kInvalidSpec);
}

TEST_CASE("sampled sigma must fit the grid") {
  GameSpec s = testing::two_player_game(1.0, 1.0);
  s.sigma[0] = {0.1, 0.2, 0.3};
  CHECK_NOTHROW(s.check_grid(TimeGrid(1.0, 2)));
  CHECK(s.sigma_cell(0, 1) == 0.2);
  CHECK_THROWS_AS(s.check_grid(TimeGrid(1.0, 4)), Error);
  CHECK_THROWS_AS(s.check_grid(TimeGrid(2.0, 2)), Error);
}

}  // namespace
}  // namespace lqpg
