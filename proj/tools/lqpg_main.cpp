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

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "lqpg/error.hpp"
#include "lqpg/experiment.hpp"
#include "lqpg/io.hpp"

namespace {

struct Common {
  std::string config;
  std::string preset;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::string backend;
  std::optional<int> trials;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "JSON experiment config");
  cmd->add_option("--preset", c.preset, "built-in config")->check(CLI::IsMember({"paper-sec5"}));
  cmd->add_option("--out", c.out, "output directory");
  cmd->add_option("--seed", c.seed, "base sampling seed");
  cmd->add_option("--backend", c.backend, "gradient backend")
      ->check(CLI::IsMember({"exact", "mc"}));
  cmd->add_option("--trials", c.trials, "number of independent trials");
}

lqpg::ExperimentConfig load(const Common& c) {
  if (c.config.empty() == c.preset.empty()) {
    lqpg::fail(lqpg::ErrorCode::kInvalidSpec, "give exactly one of --config or --preset");
  }
  nlohmann::json j = c.config.empty() ? lqpg::reference_preset_json() : lqpg::read_json_file(c.config);
  if (!c.out.empty()) j["outputs"] = c.out;
  if (c.seed) j["learner"]["seed"] = *c.seed;
  if (!c.backend.empty()) j["learner"]["backend"] = c.backend;
  if (c.trials) j["trials"] = *c.trials;
  return lqpg::config_from_json(j);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lqpg: policy gradient learning in linear-quadratic stochastic games"};
  app.require_subcommand(1);

  Common solve, run, verify;
  auto* solve_cmd = app.add_subcommand("solve-ne", "solve for the Nash equilibrium");
  add_common(solve_cmd, solve);
  auto* run_cmd = app.add_subcommand("run", "run independent policy gradient learners");
  add_common(run_cmd, run);
  auto* verify_cmd = app.add_subcommand("verify", "run the property checks");
  add_common(verify_cmd, verify);

  std::string kind = "ua", net_out = "out";
  int n = 10;
  double p = 0.5;
  std::uint64_t net_seed = 0;
  auto* net_cmd = app.add_subcommand("gen-network", "sample an interaction network");
  net_cmd->add_option("--kind", kind, "ua or er")->check(CLI::IsMember({"ua", "er"}));
  net_cmd->add_option("--n", n, "number of players")->required();
  net_cmd->add_option("--p", p, "edge probability for er");
  net_cmd->add_option("--seed", net_seed, "network seed");
  net_cmd->add_option("--out", net_out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? lqpg::kExitOk : lqpg::kExitConfig;
  }

  try {
    if (*net_cmd) return lqpg::cmd_gen_network(kind, n, p, net_seed, net_out, std::cout);
    if (*solve_cmd) return lqpg::cmd_solve_ne(load(solve), std::cout);
    if (*run_cmd) return lqpg::cmd_run(load(run), std::cout);
    if (*verify_cmd) return lqpg::cmd_verify(load(verify), std::cout);
  } catch (const lqpg::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return lqpg::kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return lqpg::kExitRuntime;
  }
  return lqpg::kExitConfig;
}
