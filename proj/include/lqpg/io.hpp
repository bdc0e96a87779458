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

#ifndef LQPG_IO_HPP_
#define LQPG_IO_HPP_

#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "lqpg/equilibrium.hpp"
#include "lqpg/game.hpp"
#include "lqpg/learners.hpp"

namespace lqpg {

// Shortest representation that parses back to the same double.
std::string format_double(double v);

nlohmann::json game_spec_to_json(const GameSpec& spec);
GameSpec game_spec_from_json(const nlohmann::json& j);

nlohmann::json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

// Plain numeric CSV with one header line.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};
void write_csv(const std::string& path, const CsvTable& table);
CsvTable read_csv(const std::string& path, bool has_header = true);

// N rows of N comma-separated values, no header.
void write_weights_csv(const std::string& path, const Eigen::MatrixXd& w);
Eigen::MatrixXd read_weights_csv(const std::string& path);
// Header "source,target", zero-based indices.
void write_edge_list_csv(const std::string& path, const Eigen::MatrixXd& w);

// Columns t, K_1..K_N, G_1..G_N, P_1..P_N, mu_1..mu_N.
CsvTable equilibrium_table(const EquilibriumSolution& sol, const TimeGrid& grid);

CsvTable runlog_table(const std::vector<RunLogRow>& log);
std::vector<RunLogRow> runlog_from_table(const CsvTable& table);

// Per-iteration mean, min and max of rrmse_k and rrmse_g across trials.
CsvTable aggregate_table(const std::vector<std::vector<RunLogRow>>& logs);

}  // namespace lqpg

#endif  // LQPG_IO_HPP_
