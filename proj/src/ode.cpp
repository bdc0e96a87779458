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

#include "lqpg/ode.hpp"

#include <cmath>
#include <string>

#include "lqpg/error.hpp"

namespace lqpg {
namespace {

void check_substeps(const OdeOptions& opts) {
  if (opts.substeps < 2 || opts.substeps % 2 != 0) {
    fail(ErrorCode::kInvalidSpec, "substeps must be even and positive");
  }
}

void check_finite(double v, double threshold, const char* what) {
  if (!std::isfinite(v) || std::abs(v) > threshold) {
    fail(ErrorCode::kNonFiniteBlowup, std::string(what) + " left the finite range");
  }
}

void check_finite(const Eigen::MatrixXd& m, double threshold, const char* what) {
  if (!m.allFinite() || m.cwiseAbs().maxCoeff() > threshold) {
    fail(ErrorCode::kNonFiniteBlowup, std::string(what) + " left the finite range");
  }
}

}  // namespace

SampledPath<double> riccati_path(double q_ii, double gamma, const TimeGrid& grid,
                                 std::span<const double> k_override,
                                 const OdeOptions& opts) {
  check_substeps(opts);
  const bool has_k = !k_override.empty();
  if (has_k && static_cast<int>(k_override.size()) != grid.n_steps()) {
    fail(ErrorCode::kDimensionMismatch, "gain path does not match the grid");
  }
  const int r = opts.substeps;
  const int m = grid.n_steps() * r;
  const double h = grid.dt() / r;
  SampledPath<double> out;
  out.resolution = r;
  out.samples.assign(m + 1, 0.0);
  out.samples[m] = gamma;
  double p = gamma;
  for (int s = m; s > 0; --s) {
    if (has_k) {
      const double k = k_override[(s - 1) / r];
      p = rk4_step([&](int, double y) { return -2.0 * k * y - k * k - q_ii; }, p, -h);
    } else {
      p = rk4_step([&](int, double y) { return y * y - q_ii; }, p, -h);
    }
    check_finite(p, opts.blowup_threshold, "Riccati solution");
    out.samples[s - 1] = p;
  }
  return out;
}

ScalarPath solve_scalar_riccati(double q_ii, double gamma, const TimeGrid& grid,
                                std::span<const double> k_override,
                                const OdeOptions& opts) {
  return riccati_path(q_ii, gamma, grid, k_override, opts).nodes();
}

MatrixPath solve_matrix_riccati(const Eigen::MatrixXd& q, const Eigen::VectorXd& lambda,
                                const TimeGrid& grid, const OdeOptions& opts) {
  check_substeps(opts);
  const int n = static_cast<int>(q.rows());
  if (q.cols() != n || lambda.size() != n) {
    fail(ErrorCode::kDimensionMismatch, "matrix Riccati dimensions disagree");
  }
  const double qscale = std::max(1.0, q.cwiseAbs().maxCoeff());
  if ((q - q.transpose()).cwiseAbs().maxCoeff() > 1e-12 * qscale) {
    fail(ErrorCode::kSymmetryLoss, "matrix Riccati needs a symmetric cost");
  }
  const int r = 4 * opts.substeps;
  const int m = grid.n_steps() * r;
  const double h = grid.dt() / r;
  MatrixPath out;
  out.resolution = r;
  out.samples.resize(m + 1);
  Eigen::MatrixXd psi = lambda.asDiagonal();
  out.samples[m] = psi;
  auto rhs = [&](int, const Eigen::MatrixXd& y) -> Eigen::MatrixXd {
    return y.transpose() * y - q;
  };
  for (int s = m; s > 0; --s) {
    psi = rk4_step(rhs, psi, -h);
    check_finite(psi, opts.blowup_threshold, "matrix Riccati solution");
    const double scale = std::max(1.0, psi.cwiseAbs().maxCoeff());
    if ((psi - psi.transpose()).cwiseAbs().maxCoeff() > 1e-8 * scale) {
      fail(ErrorCode::kSymmetryLoss, "matrix Riccati lost symmetry");
    }
    psi = 0.5 * (psi + psi.transpose()).eval();
    out.samples[s - 1] = psi;
  }
  return out;
}

VectorPath solve_zeta(const MatrixPath& psi, const Eigen::VectorXd& gamma,
                      const Eigen::VectorXd& d, const TimeGrid& grid,
                      const OdeOptions& opts) {
  if (psi.resolution % 2 != 0 || psi.n_steps() != grid.n_steps()) {
    fail(ErrorCode::kDimensionMismatch, "psi path does not match the grid");
  }
  const int r = psi.resolution / 2;
  const int m = grid.n_steps() * r;
  const double h = grid.dt() / r;
  VectorPath out;
  out.resolution = r;
  out.samples.resize(m + 1);
  Eigen::VectorXd z = -(gamma.array() * d.array()).matrix();
  out.samples[m] = z;
  for (int s = m; s > 0; --s) {
    const int top = 2 * s;
    auto rhs = [&](int stage, const Eigen::VectorXd& y) -> Eigen::VectorXd {
      return psi.samples[top - stage].transpose() * y;
    };
    z = rk4_step(rhs, z, -h);
    check_finite(z, opts.blowup_threshold, "zeta");
    out.samples[s - 1] = z;
  }
  return out;
}

VectorPath solve_feedback_mean(const MatrixPath& psi, const VectorPath& zeta,
                               const Eigen::VectorXd& mu0, const TimeGrid& grid,
                               const OdeOptions& opts) {
  if (zeta.resolution % 2 != 0 || psi.resolution != 2 * zeta.resolution ||
      zeta.n_steps() != grid.n_steps()) {
    fail(ErrorCode::kDimensionMismatch, "psi and zeta resolutions disagree");
  }
  const int r = zeta.resolution / 2;
  const int m = grid.n_steps() * r;
  const double h = grid.dt() / r;
  VectorPath out;
  out.resolution = r;
  out.samples.resize(m + 1);
  Eigen::VectorXd mu = mu0;
  out.samples[0] = mu;
  for (int s = 0; s < m; ++s) {
    auto rhs = [&](int stage, const Eigen::VectorXd& y) -> Eigen::VectorXd {
      const int zi = 2 * s + stage;
      return -psi.samples[2 * zi] * y - zeta.samples[zi];
    };
    mu = rk4_step(rhs, mu, h);
    check_finite(mu, opts.blowup_threshold, "equilibrium mean");
    out.samples[s + 1] = mu;
  }
  return out;
}

SampledPath<double> variance_path(std::span<const double> k, const GameSpec& spec,
                                  int player, const TimeGrid& grid,
                                  const OdeOptions& opts) {
  check_substeps(opts);
  if (static_cast<int>(k.size()) != grid.n_steps()) {
    fail(ErrorCode::kDimensionMismatch, "gain path does not match the grid");
  }
  const int r = opts.substeps;
  const double h = grid.dt() / r;
  SampledPath<double> var;
  var.resolution = r;
  var.samples.resize(static_cast<std::size_t>(grid.n_steps()) * r + 1);
  double th = spec.init_var(player);
  var.samples[0] = th;
  for (int j = 0; j < grid.n_steps(); ++j) {
    const double kj = k[j];
    const double s2 = spec.sigma_cell(player, j) * spec.sigma_cell(player, j);
    for (int s = 0; s < r; ++s) {
      th = rk4_step([&](int, double y) { return 2.0 * kj * y + s2; }, th, h);
      check_finite(th, opts.blowup_threshold, "variance");
      if (!(th > 0.0)) {
        fail(ErrorCode::kVariancePositivityLoss,
             "variance of player " + std::to_string(player) + " became nonpositive");
      }
      var.samples[j * r + s + 1] = th;
    }
  }
  return var;
}

MomentPath solve_moments(const PolicyProfile& profile, const GameSpec& spec,
                         const TimeGrid& grid, const OdeOptions& opts) {
  check_substeps(opts);
  profile.check(spec.n_players, grid);
  spec.check_grid(grid);
  const int r = opts.substeps;
  const double h = grid.dt() / r;
  MomentPath out;
  out.mean.resize(spec.n_players);
  out.var.resize(spec.n_players);
  for (int i = 0; i < spec.n_players; ++i) {
    out.var[i] = variance_path(profile.k[i], spec, i, grid, opts);
    auto& mean = out.mean[i];
    mean.resolution = r;
    mean.samples.resize(static_cast<std::size_t>(grid.n_steps()) * r + 1);
    mean.samples[0] = spec.init_mean(i);
    for (int j = 0; j < grid.n_steps(); ++j) {
      // Affine on each cell.
      const double start = mean.samples[j * r];
      for (int s = 1; s <= r; ++s) {
        mean.samples[j * r + s] = start + profile.g[i][j] * h * s;
      }
    }
  }
  return out;
}

}  // namespace lqpg
