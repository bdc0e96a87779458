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

#ifndef LQPG_LEARNERS_HPP_
#define LQPG_LEARNERS_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "lqpg/game.hpp"
#include "lqpg/gradients.hpp"
#include "lqpg/grid.hpp"

namespace lqpg {

enum class Backend { kExact, kMonteCarlo };

struct LearnerConfig {
  std::vector<double> eta_k;  // per player
  std::vector<double> eta_g;
  int n_iters = 40;
  Backend backend = Backend::kExact;
  int n_samples = 20000;
  std::uint64_t seed = 0;
  bool projected = false;
  double c_bar_g = 0.0;  // projection radius; 0 selects twice the largest |G^{Phi,*,i}|
  OdeOptions ode;

  static LearnerConfig uniform(int n_players, double eta, int n_iters);
  // A single step also accepts zero rates.
  void check(int n_players, bool allow_zero_rates = false) const;
};

// Minimum over r in [0, 1] of |f - r f|: scales f into the L2 ball.
CellPath project_l2_ball(const CellPath& f, double radius, double dt);

// One simultaneous update of every player. `iteration` offsets the sampling seed.
PolicyProfile pg_step(const PolicyProfile& profile, const LearnerConfig& cfg,
                      const GameSpec& spec, const TimeGrid& grid, int iteration,
                      GradientBundle* used = nullptr);

struct RunLogRow {
  int iter = 0;
  double rrmse_k = 0.0;
  double rrmse_g = 0.0;
  double phi1_gap = 0.0;
  double phi2_gap = 0.0;
  double grad_norm_k = 0.0;
  double grad_norm_g = 0.0;
};

struct RunResult {
  std::vector<RunLogRow> log;  // one row per iterate, starting at iteration 0
  PolicyProfile final_profile;
  std::vector<PolicyProfile> iterates;  // filled when keep_iterates is set
};

struct Rrmse {
  double k = 0.0;
  double g = 0.0;
};

// Relative root mean squared error over all players and cells. Throws
// ZeroReference when a reference component vanishes.
Rrmse rrmse(const PolicyProfile& profile, const PolicyProfile& reference);

// Runs the learner from `init` and logs errors against `reference` and potential
// gaps against the grid minimizer of the potential.
RunResult run_learning(const GameSpec& spec, const TimeGrid& grid, const LearnerConfig& cfg,
                       const PolicyProfile& reference, const PolicyProfile& init,
                       bool keep_iterates = false);

struct RateReport {
  bool eta_k_below_c1k = false;
  bool eta_g_below_inv_l = false;
  bool eta_k_below_half = false;
  bool g_rate_condition = false;  // eta_min > eta_max / (1 + 2 eta_max)
  std::vector<std::string> warnings;
  bool all_ok() const {
    return eta_k_below_c1k && eta_g_below_inv_l && eta_k_below_half && g_rate_condition;
  }
};

RateReport validate_rates(const LearnerConfig& cfg, const LandscapeConstants& c);

// Default projection radius: twice the largest L2 norm of the potential minimizer drifts.
double default_projection_radius(const GameSpec& spec, const TimeGrid& grid,
                                 const OdeOptions& opts = {});

}  // namespace lqpg

#endif  // LQPG_LEARNERS_HPP_
