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

#ifndef LQPG_EXPERIMENT_HPP_
#define LQPG_EXPERIMENT_HPP_

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "lqpg/game.hpp"
#include "lqpg/learners.hpp"

namespace lqpg {

enum ExitCode { kExitOk = 0, kExitVerifyFailed = 1, kExitConfig = 2, kExitRuntime = 3 };

// Either an explicit game (`game.spec`) or a network recipe with scalar defaults.
struct ExperimentConfig {
  nlohmann::json game;
  int n_steps = 200;
  LearnerConfig learner;
  std::string outputs = "out";
  int trials = 1;
  std::uint64_t network_seed = 0;

  // Networks are redrawn per trial from network_seed + trial.
  GameSpec build_game(int trial) const;
  // Sampling seed of a trial; iterations add their index on top.
  std::uint64_t trial_seed(int trial) const;
};

ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& cfg);
// Ten players on a uniform attachment network with the reference scalars.
nlohmann::json reference_preset_json();

struct VerifyCheck {
  std::string name;
  bool passed = false;
  double measured = 0.0;
  double tolerance = 0.0;
  std::string note;
};

int cmd_solve_ne(const ExperimentConfig& cfg, std::ostream& log);
int cmd_run(const ExperimentConfig& cfg, std::ostream& log);
int cmd_verify(const ExperimentConfig& cfg, std::ostream& log);
int cmd_gen_network(const std::string& kind, int n, double p, std::uint64_t seed,
                    const std::string& out_dir, std::ostream& log);

// The property suite behind cmd_verify.
std::vector<VerifyCheck> run_verify_suite(const ExperimentConfig& cfg);

}  // namespace lqpg

#endif  // LQPG_EXPERIMENT_HPP_
