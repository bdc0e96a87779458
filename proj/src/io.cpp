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

#include "lqpg/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <limits>
#include <sstream>

#include "lqpg/error.hpp"

namespace lqpg {
namespace {

using nlohmann::json;

Eigen::VectorXd vector_from_json(const json& j, const char* name) {
  if (!j.contains(name) || !j.at(name).is_array()) {
    fail(ErrorCode::kInvalidSpec, std::string("missing array field ") + name);
  }
  const auto v = j.at(name).get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::vector<double> to_std(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

double parse_double(const std::string& cell) {
  double v = 0.0;
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  while (begin < end && *begin == ' ') ++begin;
  while (end > begin && (end[-1] == ' ' || end[-1] == '\r')) --end;
  const auto res = std::from_chars(begin, end, v);
  if (res.ec != std::errc() || res.ptr != end) {
    fail(ErrorCode::kIo, "cannot parse number '" + cell + "'");
  }
  return v;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string join(const std::vector<std::string>& cells) {
  std::string out;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out += ',';
    out += cells[i];
  }
  return out;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

json game_spec_to_json(const GameSpec& spec) {
  json j;
  j["n_players"] = spec.n_players;
  j["horizon"] = spec.horizon;
  j["sigma"] = spec.sigma;
  json qs = json::array();
  for (const auto& q : spec.q_mats) {
    json rows = json::array();
    for (int r = 0; r < q.rows(); ++r) {
      std::vector<double> row(q.cols());
      for (int c = 0; c < q.cols(); ++c) row[c] = q(r, c);
      rows.push_back(row);
    }
    qs.push_back(rows);
  }
  j["q_mats"] = qs;
  j["gamma"] = to_std(spec.gamma);
  j["d_target"] = to_std(spec.d_target);
  j["init_mean"] = to_std(spec.init_mean);
  j["init_var"] = to_std(spec.init_var);
  return j;
}

GameSpec game_spec_from_json(const json& j) {
  GameSpec s;
  try {
    s.n_players = j.at("n_players").get<int>();
    s.horizon = j.at("horizon").get<double>();
    const json& sig = j.at("sigma");
    for (const auto& e : sig) {
      if (e.is_number()) {
        s.sigma.push_back({e.get<double>()});
      } else {
        s.sigma.push_back(e.get<std::vector<double>>());
      }
    }
    for (const auto& q : j.at("q_mats")) {
      const auto rows = q.get<std::vector<std::vector<double>>>();
      Eigen::MatrixXd m(rows.size(), rows.empty() ? 0 : rows[0].size());
      for (std::size_t r = 0; r < rows.size(); ++r) {
        if (static_cast<Eigen::Index>(rows[r].size()) != m.cols()) {
          fail(ErrorCode::kDimensionMismatch, "ragged cost matrix");
        }
        for (std::size_t c = 0; c < rows[r].size(); ++c) m(r, c) = rows[r][c];
      }
      s.q_mats.push_back(m);
    }
  } catch (const json::exception& e) {
    fail(ErrorCode::kInvalidSpec, std::string("malformed game spec: ") + e.what());
  }
  s.gamma = vector_from_json(j, "gamma");
  s.d_target = vector_from_json(j, "d_target");
  s.init_mean = vector_from_json(j, "init_mean");
  s.init_var = vector_from_json(j, "init_var");
  return s;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    fail(ErrorCode::kInvalidSpec, "cannot parse " + path + ": " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::kIo, "cannot write " + path);
  out << text;
  if (!out) fail(ErrorCode::kIo, "write failed for " + path);
}

void write_csv(const std::string& path, const CsvTable& table) {
  std::string text;
  if (!table.header.empty()) text += join(table.header) + '\n';
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) text += ',';
      text += format_double(row[c]);
    }
    text += '\n';
  }
  write_text_file(path, text);
}

CsvTable read_csv(const std::string& path, bool has_header) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot open " + path);
  CsvTable t;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (first && has_header) {
      t.header = split(line);
      first = false;
      continue;
    }
    first = false;
    std::vector<double> row;
    for (const auto& cell : split(line)) row.push_back(parse_double(cell));
    if (!t.rows.empty() && row.size() != t.rows.front().size()) {
      fail(ErrorCode::kIo, "ragged row in " + path);
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

void write_weights_csv(const std::string& path, const Eigen::MatrixXd& w) {
  CsvTable t;
  for (int r = 0; r < w.rows(); ++r) {
    std::vector<double> row(w.cols());
    for (int c = 0; c < w.cols(); ++c) row[c] = w(r, c);
    t.rows.push_back(row);
  }
  write_csv(path, t);
}

Eigen::MatrixXd read_weights_csv(const std::string& path) {
  const CsvTable t = read_csv(path, false);
  const auto n = static_cast<Eigen::Index>(t.rows.size());
  Eigen::MatrixXd w(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    if (static_cast<Eigen::Index>(t.rows[r].size()) != n) {
      fail(ErrorCode::kDimensionMismatch, "weights CSV is not square");
    }
    for (Eigen::Index c = 0; c < n; ++c) w(r, c) = t.rows[r][c];
  }
  return w;
}

void write_edge_list_csv(const std::string& path, const Eigen::MatrixXd& w) {
  std::string text = "source,target\n";
  for (int i = 0; i < w.rows(); ++i) {
    for (int j = 0; j < w.cols(); ++j) {
      if (i != j && w(i, j) != 0.0) text += std::to_string(i) + ',' + std::to_string(j) + '\n';
    }
  }
  write_text_file(path, text);
}

CsvTable equilibrium_table(const EquilibriumSolution& sol, const TimeGrid& grid) {
  const int n = static_cast<int>(sol.p.size());
  CsvTable t;
  t.header.push_back("t");
  for (const char* name : {"K", "G", "P", "mu"}) {
    for (int i = 1; i <= n; ++i) t.header.push_back(std::string(name) + "_" + std::to_string(i));
  }
  for (int j = 0; j < grid.n_nodes(); ++j) {
    std::vector<double> row;
    row.reserve(1 + 4 * n);
    row.push_back(grid.node(j));
    for (int i = 0; i < n; ++i) row.push_back(sol.k_star[i][j]);
    for (int i = 0; i < n; ++i) row.push_back(sol.g_star[i][j]);
    for (int i = 0; i < n; ++i) row.push_back(sol.p[i][j]);
    for (int i = 0; i < n; ++i) row.push_back(sol.mu_star[i][j]);
    t.rows.push_back(std::move(row));
  }
  return t;
}

CsvTable runlog_table(const std::vector<RunLogRow>& log) {
  CsvTable t;
  t.header = {"iter", "rrmse_k", "rrmse_g", "phi1_gap", "phi2_gap", "grad_norm_k",
              "grad_norm_g"};
  for (const auto& r : log) {
    t.rows.push_back({static_cast<double>(r.iter), r.rrmse_k, r.rrmse_g, r.phi1_gap,
                      r.phi2_gap, r.grad_norm_k, r.grad_norm_g});
  }
  return t;
}

std::vector<RunLogRow> runlog_from_table(const CsvTable& table) {
  std::vector<RunLogRow> out;
  for (const auto& r : table.rows) {
    if (r.size() != 7) fail(ErrorCode::kIo, "run log rows need 7 columns");
    out.push_back({static_cast<int>(r[0]), r[1], r[2], r[3], r[4], r[5], r[6]});
  }
  return out;
}

CsvTable aggregate_table(const std::vector<std::vector<RunLogRow>>& logs) {
  CsvTable t;
  t.header = {"iter", "rrmse_k_mean", "rrmse_k_min", "rrmse_k_max",
              "rrmse_g_mean", "rrmse_g_min", "rrmse_g_max"};
  if (logs.empty()) return t;
  std::size_t rows = logs.front().size();
  for (const auto& l : logs) rows = std::min(rows, l.size());
  for (std::size_t r = 0; r < rows; ++r) {
    double ks = 0.0, gs = 0.0;
    double kmin = std::numeric_limits<double>::infinity(), gmin = kmin;
    double kmax = -kmin, gmax = -kmin;
    for (const auto& l : logs) {
      ks += l[r].rrmse_k;
      gs += l[r].rrmse_g;
      kmin = std::min(kmin, l[r].rrmse_k);
      kmax = std::max(kmax, l[r].rrmse_k);
      gmin = std::min(gmin, l[r].rrmse_g);
      gmax = std::max(gmax, l[r].rrmse_g);
    }
    const double m = static_cast<double>(logs.size());
    t.rows.push_back({static_cast<double>(logs.front()[r].iter), ks / m, kmin, kmax,
                      gs / m, gmin, gmax});
  }
  return t;
}

}  // namespace lqpg
