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

#include "lqpg/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <mutex>
#include <random>

#include "lqpg/equilibrium.hpp"
#include "lqpg/error.hpp"
#include "lqpg/gradients.hpp"
#include "lqpg/io.hpp"
#include "lqpg/networks.hpp"
#include "lqpg/parallel.hpp"

namespace lqpg {
namespace {

using nlohmann::json;

std::vector<double> rates_from_json(const json& j, const char* key, int n, double fallback) {
  if (!j.contains(key)) return std::vector<double>(n, fallback);
  const json& v = j.at(key);
  if (v.is_number()) return std::vector<double>(n, v.get<double>());
  auto out = v.get<std::vector<double>>();
  if (static_cast<int>(out.size()) != n) {
    fail(ErrorCode::kDimensionMismatch, std::string(key) + " needs one rate per player");
  }
  return out;
}

int players_of(const json& game) {
  if (game.contains("spec")) return game.at("spec").at("n_players").get<int>();
  return game.value("n_players", 10);
}

std::string path_in(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

int exit_code_for(const Error& e, bool runtime_stage) {
  switch (e.code()) {
    case ErrorCode::kInvalidSpec:
    case ErrorCode::kDimensionMismatch:
    case ErrorCode::kAssumptionViolation:
    case ErrorCode::kSingularShootingMatrix:
    case ErrorCode::kNegativeWeight:
    case ErrorCode::kInvalidProbability:
      return kExitConfig;
    case ErrorCode::kIo:
      return runtime_stage ? kExitRuntime : kExitConfig;
    default:
      return kExitRuntime;
  }
}

PolicyProfile random_profile(int n, const TimeGrid& grid, std::mt19937_64& gen) {
  std::uniform_real_distribution<double> kd(-2.0, 1.0);
  std::uniform_real_distribution<double> gd(-3.0, 3.0);
  PolicyProfile p = PolicyProfile::zeros(n, grid);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < grid.n_steps(); ++j) {
      p.k[i][j] = kd(gen);
      p.g[i][j] = gd(gen);
    }
  }
  return p;
}

double inner(const std::vector<CellPath>& a, const std::vector<CellPath>& b, double dt) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < a[i].size(); ++j) acc += a[i][j] * b[i][j];
  }
  return acc * dt;
}

// Largest relative mismatch between analytic gradients and central differences of
// the own cost on `cells_per_player` random cells of every player. Components that
// are small against the player's largest component are compared at that scale.
double fd_mismatch(const GameSpec& spec, const TimeGrid& grid, const PolicyProfile& prof,
                   int cells_per_player, std::mt19937_64& gen, const OdeOptions& opts) {
  const double h = 1e-5;
  const GradientBundle gb = exact_gradients(prof, spec, grid, opts);
  std::uniform_int_distribution<int> cell(0, grid.n_steps() - 1);
  double worst = 0.0;
  for (int i = 0; i < spec.n_players; ++i) {
    for (int which = 0; which < 2; ++which) {
      const CellPath& an = which == 0 ? gb.grad_k[i] : gb.grad_g[i];
      double top = 0.0;
      for (double v : an) top = std::max(top, std::abs(v));
      for (int c = 0; c < cells_per_player; ++c) {
        const int j = cell(gen);
        PolicyProfile up = prof;
        PolicyProfile dn = prof;
        (which == 0 ? up.k : up.g)[i][j] += h;
        (which == 0 ? dn.k : dn.g)[i][j] -= h;
        const double fd = (eval_costs(up, spec, grid, opts).total[i] -
                           eval_costs(dn, spec, grid, opts).total[i]) /
                          (2.0 * h * grid.dt());
        const double scale = std::max({std::abs(an[j]), 1e-2 * top, 1e-12});
        worst = std::max(worst, std::abs(fd - an[j]) / scale);
      }
    }
  }
  return worst;
}

}  // namespace

GameSpec ExperimentConfig::build_game(int trial) const {
  if (game.contains("spec")) return game_spec_from_json(game.at("spec"));
  const int n = game.value("n_players", 10);
  if (n < 1) fail(ErrorCode::kInvalidSpec, "need at least one player");
  const std::string kind = game.value("network", "ua");
  const std::uint64_t seed = network_seed + static_cast<std::uint64_t>(trial);
  Eigen::MatrixXd w;
  if (kind == "ua") {
    w = uniform_attachment(n, seed);
  } else if (kind == "er") {
    w = erdos_renyi_directed(n, game.value("p", 0.5), seed);
  } else if (kind == "csv") {
    w = read_weights_csv(game.at("weights_path").get<std::string>());
  } else if (kind == "none") {
    w = Eigen::MatrixXd::Zero(n, n);
  } else {
    fail(ErrorCode::kInvalidSpec, "unknown network kind " + kind);
  }
  if (w.rows() != n) fail(ErrorCode::kDimensionMismatch, "network size differs from n_players");
  const std::string costs = game.value("costs", "flocking");
  std::vector<Eigen::MatrixXd> q;
  if (costs == "flocking") {
    q = flocking_costs(w);
  } else if (costs == "mean_field") {
    q = mean_field_flocking_costs(w);
  } else {
    fail(ErrorCode::kInvalidSpec, "unknown cost family " + costs);
  }
  Eigen::VectorXd mu0(n), d(n);
  for (int i = 0; i < n; ++i) {
    mu0(i) = 5.0 - i;
    d(i) = -4.0 + i;
  }
  if (game.contains("init_mean")) {
    const auto v = game.at("init_mean").get<std::vector<double>>();
    if (static_cast<int>(v.size()) != n) fail(ErrorCode::kDimensionMismatch, "init_mean length");
    mu0 = Eigen::Map<const Eigen::VectorXd>(v.data(), n);
  }
  if (game.contains("d_target")) {
    const auto v = game.at("d_target").get<std::vector<double>>();
    if (static_cast<int>(v.size()) != n) fail(ErrorCode::kDimensionMismatch, "d_target length");
    d = Eigen::Map<const Eigen::VectorXd>(v.data(), n);
  }
  return make_game(std::move(q), game.value("horizon", 1.0), game.value("sigma", 0.25),
                   game.value("gamma", 1.0), game.value("init_var", 0.01), mu0, d);
}

std::uint64_t ExperimentConfig::trial_seed(int trial) const {
  return learner.seed + (static_cast<std::uint64_t>(trial) << 32);
}

ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig c;
  try {
    c.game = j.at("game");
    const int n = players_of(c.game);
    c.network_seed = c.game.value("network_seed", std::uint64_t{0});
    const json grid = j.value("grid", json::object());
    c.n_steps = grid.value("n_steps", 200);
    const json lj = j.value("learner", json::object());
    c.learner.eta_k = rates_from_json(lj, "eta_k", n, 0.1);
    c.learner.eta_g = rates_from_json(lj, "eta_g", n, 0.1);
    c.learner.n_iters = lj.value("n_iters", 40);
    const std::string backend = lj.value("backend", "exact");
    if (backend == "exact") {
      c.learner.backend = Backend::kExact;
    } else if (backend == "mc") {
      c.learner.backend = Backend::kMonteCarlo;
    } else {
      fail(ErrorCode::kInvalidSpec, "backend must be exact or mc");
    }
    c.learner.n_samples = lj.value("n_samples", 20000);
    c.learner.seed = lj.value("seed", std::uint64_t{0});
    c.learner.projected = lj.value("projected", false);
    c.learner.c_bar_g = lj.value("c_bar_g", 0.0);
    c.learner.ode.substeps = grid.value("substeps", 10);
    c.outputs = j.value("outputs", "out");
    c.trials = j.value("trials", 1);
  } catch (const json::exception& e) {
    fail(ErrorCode::kInvalidSpec, std::string("malformed config: ") + e.what());
  }
  if (c.trials < 1) fail(ErrorCode::kInvalidSpec, "trials must be at least 1");
  if (c.n_steps < 1) fail(ErrorCode::kInvalidSpec, "n_steps must be at least 1");
  c.learner.check(players_of(c.game));
  return c;
}

json config_to_json(const ExperimentConfig& c) {
  json j;
  j["game"] = c.game;
  j["game"]["network_seed"] = c.network_seed;
  j["grid"] = {{"n_steps", c.n_steps}, {"substeps", c.learner.ode.substeps}};
  j["learner"] = {{"eta_k", c.learner.eta_k},
                  {"eta_g", c.learner.eta_g},
                  {"n_iters", c.learner.n_iters},
                  {"backend", c.learner.backend == Backend::kExact ? "exact" : "mc"},
                  {"n_samples", c.learner.n_samples},
                  {"seed", c.learner.seed},
                  {"projected", c.learner.projected},
                  {"c_bar_g", c.learner.c_bar_g}};
  j["outputs"] = c.outputs;
  j["trials"] = c.trials;
  return j;
}

json reference_preset_json() {
  std::vector<double> mu0, d;
  for (int i = 0; i < 10; ++i) {
    mu0.push_back(5.0 - i);
    d.push_back(-4.0 + i);
  }
  return {
      {"game",
       {{"network", "ua"},
        {"network_seed", 0},
        {"costs", "flocking"},
        {"n_players", 10},
        {"horizon", 1.0},
        {"sigma", 0.25},
        {"gamma", 1.0},
        {"init_var", 0.01},
        {"init_mean", mu0},
        {"d_target", d}}},
      {"grid", {{"n_steps", 200}, {"substeps", 10}}},
      {"learner",
       {{"eta_k", 0.1},
        {"eta_g", 0.1},
        {"n_iters", 40},
        {"backend", "mc"},
        {"n_samples", 20000},
        {"seed", 0},
        {"projected", false}}},
      {"outputs", "out"},
      {"trials", 10}};
}

int cmd_solve_ne(const ExperimentConfig& cfg, std::ostream& log) {
  try {
    const GameSpec spec = cfg.build_game(0);
    spec.validate();
    const TimeGrid grid(spec.horizon, cfg.n_steps);
    const PotentialMatrix pm = build_potential_matrix(spec);
    const AssumptionReport rep = check_assumptions(spec, pm);
    for (const auto& w : rep.warnings) log << "warning: " << w << "\n";
    const EquilibriumSolution sol = solve_equilibrium(spec, grid, cfg.learner.ode);
    std::filesystem::create_directories(cfg.outputs);
    write_csv(path_in(cfg.outputs, "equilibrium.csv"), equilibrium_table(sol, grid));
    const ResidualReport res = residual_check(sol, spec, grid);
    log << "solver: "
        << (sol.kind == EquilibriumKind::kSymmetric ? "symmetric" : "asymmetric") << "\n"
        << "C_Q: " << format_double(pm.c_q) << "\n"
        << "boundary residual: " << format_double(sol.boundary_residual) << "\n"
        << "riccati residual: " << format_double(res.riccati) << "\n"
        << "psi residual: " << format_double(res.psi) << "\n"
        << "zeta residual: " << format_double(res.zeta) << "\n"
        << "lambda residual: " << format_double(res.lambda) << "\n"
        << "mean residual: " << format_double(res.mean) << "\n";
    return kExitOk;
  } catch (const Error& e) {
    log << "error: " << e.what() << "\n";
    return exit_code_for(e, false);
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

int cmd_run(const ExperimentConfig& cfg, std::ostream& log) {
  std::vector<GameSpec> games;
  std::vector<PolicyProfile> refs;
  try {
    for (int t = 0; t < cfg.trials; ++t) {
      games.push_back(cfg.build_game(t));
      games.back().validate();
    }
    const TimeGrid grid(games[0].horizon, cfg.n_steps);
    for (const auto& spec : games) {
      refs.push_back(solve_equilibrium(spec, grid, cfg.learner.ode).policy);
    }
    RateSchedule rates{cfg.learner.eta_k, cfg.learner.eta_g};
    const double c_bar_g = cfg.learner.projected && cfg.learner.c_bar_g <= 0.0
                               ? default_projection_radius(games[0], grid, cfg.learner.ode)
                               : cfg.learner.c_bar_g;
    const LandscapeConstants lc = landscape_constants(
        games[0], grid, PolicyProfile::zeros(games[0].n_players, grid).k, c_bar_g, rates,
        cfg.learner.ode);
    for (const auto& w : validate_rates(cfg.learner, lc).warnings) log << "warning: " << w << "\n";
    std::filesystem::create_directories(cfg.outputs);
  } catch (const Error& e) {
    log << "error: " << e.what() << "\n";
    return exit_code_for(e, false);
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return kExitConfig;
  }

  std::vector<std::vector<RunLogRow>> logs(cfg.trials);
  std::mutex log_mu;
  try {
    const TimeGrid grid(games[0].horizon, cfg.n_steps);
    parallel_for(cfg.trials, [&](std::size_t t) {
      LearnerConfig lc = cfg.learner;
      lc.seed = cfg.trial_seed(static_cast<int>(t));
      const RunResult res = run_learning(games[t], grid, lc, refs[t],
                                         PolicyProfile::zeros(games[t].n_players, grid));
      write_csv(path_in(cfg.outputs, "runlog_" + std::to_string(t) + ".csv"),
                runlog_table(res.log));
      logs[t] = res.log;
      std::lock_guard<std::mutex> lock(log_mu);
      log << "trial " << t << ": rrmse_k " << format_double(res.log.back().rrmse_k)
          << " rrmse_g " << format_double(res.log.back().rrmse_g) << "\n";
    });
    write_csv(path_in(cfg.outputs, "aggregate.csv"), aggregate_table(logs));
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}

std::vector<VerifyCheck> run_verify_suite(const ExperimentConfig& cfg) {
  std::vector<VerifyCheck> checks;
  auto add = [&](std::string name, bool ok, double measured, double tol, std::string note = "") {
    checks.push_back({std::move(name), ok, measured, tol, std::move(note)});
  };
  GameSpec spec;
  try {
    spec = cfg.build_game(0);
    spec.validate();
    add("spec_validation", true, 0.0, 0.0);
  } catch (const Error& e) {
    add("spec_validation", false, 0.0, 0.0, e.what());
    return checks;
  }
  const OdeOptions& opts = cfg.learner.ode;
  const int n = spec.n_players;
  std::mt19937_64 gen(cfg.learner.seed ^ 0x5eedULL);

  {
    const TimeGrid unit(1.0, cfg.n_steps);
    const double a = std::abs(solve_scalar_riccati(1.0, 0.0, unit, {}, opts)[0] - std::tanh(1.0));
    add("riccati_tanh", a <= 1e-8, a, 1e-8);
    const double b = std::abs(solve_scalar_riccati(0.0, 1.0, unit, {}, opts)[0] - 0.5);
    add("riccati_terminal_weight", b <= 1e-8, b, 1e-8);
  }

  const TimeGrid grid(spec.horizon, cfg.n_steps);
  const PotentialMatrix pm = build_potential_matrix(spec);
  const AssumptionReport rep = check_assumptions(spec, pm);
  add("q_sym_psd", rep.q_sym_psd, rep.q_sym_min_eig, -1e-10);

  try {
    double worst = 0.0;
    for (int s = 0; s < 2; ++s) {
      worst = std::max(worst, fd_mismatch(spec, grid, random_profile(n, grid, gen), 5, gen, opts));
    }
    add("gradient_finite_difference", worst <= 1e-4, worst, 1e-4);

    std::vector<PolicyProfile> base, dev;
    for (int s = 0; s < 5; ++s) {
      base.push_back(random_profile(n, grid, gen));
      dev.push_back(random_profile(n, grid, gen));
    }
    const PotentialCheck pc = verify_potential_property(spec, grid, base, dev, 1e-9, opts);
    add(rep.pairwise_symmetric ? "potential_identity_exact" : "potential_identity_alpha_bound",
        pc.ok, pc.max_violation, pc.bound,
        rep.pairwise_symmetric ? "exact mode" : "alpha-bound mode");

    if (rep.q_sym_psd) {
      LandscapeConstants lc = landscape_constants(
          spec, grid, PolicyProfile::zeros(n, grid).k, 0.0,
          RateSchedule{cfg.learner.eta_k, cfg.learner.eta_g}, opts);
      double worst_gap = -1e300;
      for (int s = 0; s < 5; ++s) {
        const PolicyProfile a = random_profile(n, grid, gen);
        const PolicyProfile b = random_profile(n, grid, gen);
        const double pa = eval_potential(a, pm, spec, grid, opts).phi2;
        const double pb = eval_potential(b, pm, spec, grid, opts).phi2;
        const GradientBundle ga = potential_gradients(a, pm, spec, grid, opts);
        std::vector<CellPath> diff = b.g;
        for (int i = 0; i < n; ++i) {
          for (int j = 0; j < grid.n_steps(); ++j) diff[i][j] -= a.g[i][j];
        }
        const double d2 = inner(diff, diff, grid.dt());
        const double breg = pb - pa - inner(diff, ga.grad_g, grid.dt());
        const double tol = 1e-9 * std::max(1.0, std::abs(pb));
        worst_gap = std::max({worst_gap, lc.m / 2.0 * d2 - breg - tol, breg - lc.l / 2.0 * d2 - tol});
      }
      add("bregman_sandwich", worst_gap <= 0.0, worst_gap, 0.0);

      const PolicyProfile star = grid_potential_minimizer(spec, grid, opts);
      const double phi_star = eval_potential(star, pm, spec, grid, opts).phi1;
      double worst_dom = -1e300;
      for (int s = 0; s < 5; ++s) {
        const PolicyProfile k = random_profile(n, grid, gen);
        const GradientBundle gk = potential_gradients(k, pm, spec, grid, opts);
        const double gap = eval_potential(k, pm, spec, grid, opts).phi1 - phi_star;
        const double dom = lc.var_star_sup / 4.0 * inner(gk.norm_grad_k, gk.norm_grad_k, grid.dt());
        worst_dom = std::max(worst_dom, gap - dom);
      }
      add("gradient_dominance", worst_dom <= 0.0, worst_dom, 0.0);
    }

    const EquilibriumSolution sol = solve_equilibrium(spec, grid, opts);
    const GradientBundle g = exact_gradients(sol.policy, spec, grid, opts);
    double stat = 0.0;
    for (int i = 0; i < n; ++i) {
      stat = std::max({stat, l2_norm(g.grad_k[i], grid.dt()), l2_norm(g.grad_g[i], grid.dt())});
    }
    add("stationarity", stat <= 1e-6, stat, 1e-6);
    if (sol.kind == EquilibriumKind::kAsymmetric) {
      add("shooting_boundary_residual", sol.boundary_residual <= 1e-8, sol.boundary_residual, 1e-8);
    }
    const double res = residual_check(sol, spec, grid).max();
    // Central differences are second order accurate.
    const double res_tol = 40.0 * grid.dt() * grid.dt();
    add("equilibrium_ode_residual", res <= res_tol, res, res_tol);
  } catch (const Error& e) {
    add("runtime", false, 0.0, 0.0, e.what());
  }
  return checks;
}

int cmd_verify(const ExperimentConfig& cfg, std::ostream& log) {
  std::vector<VerifyCheck> checks;
  try {
    checks = run_verify_suite(cfg);
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  bool ok = true;
  json report = json::array();
  for (const auto& c : checks) {
    ok = ok && c.passed;
    report.push_back({{"name", c.name},
                      {"status", c.passed ? "pass" : "fail"},
                      {"measured", c.measured},
                      {"tolerance", c.tolerance},
                      {"note", c.note}});
    log << (c.passed ? "PASS " : "FAIL ") << c.name << " measured=" << format_double(c.measured)
        << " tol=" << format_double(c.tolerance) << (c.note.empty() ? "" : " (" + c.note + ")")
        << "\n";
  }
  try {
    std::filesystem::create_directories(cfg.outputs);
    write_text_file(path_in(cfg.outputs, "verify.json"),
                    json{{"passed", ok}, {"checks", report}}.dump(2) + "\n");
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return ok ? kExitOk : kExitVerifyFailed;
}

int cmd_gen_network(const std::string& kind, int n, double p, std::uint64_t seed,
                    const std::string& out_dir, std::ostream& log) {
  try {
    Eigen::MatrixXd w;
    if (kind == "ua") {
      w = uniform_attachment(n, seed);
    } else if (kind == "er") {
      w = erdos_renyi_directed(n, p, seed);
    } else {
      fail(ErrorCode::kInvalidSpec, "network kind must be ua or er");
    }
    std::filesystem::create_directories(out_dir);
    write_weights_csv(path_in(out_dir, "weights.csv"), w);
    write_edge_list_csv(path_in(out_dir, "edges.csv"), w);
    log << "wrote " << edge_list(w).size() << " edges\n";
    return kExitOk;
  } catch (const Error& e) {
    log << "error: " << e.what() << "\n";
    return exit_code_for(e, true);
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

}  // namespace lqpg
