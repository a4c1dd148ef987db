#include "dspce/io.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace dspce {

std::string format_double(double value) {
  if (std::isnan(value)) return "n/a";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

void write_pool_csv(std::ostream& out, SamplePool const& pool) {
  for (Eigen::Index i = 0; i < pool.size(); ++i) {
    for (Eigen::Index j = 0; j < pool.points.cols(); ++j) out << format_double(pool.points(i, j)) << ',';
    out << format_double(pool.weights(i)) << '\n';
  }
}

void write_pool_csv(std::string const& path, SamplePool const& pool) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  write_pool_csv(out, pool);
}

PoolTable read_pool_csv(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (std::exception const&) {
        throw std::runtime_error("pool CSV line " + std::to_string(lineno) + ": bad number '" + cell + "'");
      }
    }
    if (row.size() < 2) throw std::runtime_error("pool CSV line " + std::to_string(lineno) + ": need >= 2 columns");
    if (!rows.empty() && row.size() != rows.front().size())
      throw std::runtime_error("pool CSV line " + std::to_string(lineno) + ": ragged row");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error("pool CSV is empty");

  auto const n = static_cast<Eigen::Index>(rows.size());
  auto const d = static_cast<Eigen::Index>(rows.front().size()) - 1;
  PoolTable table{Eigen::MatrixXd(n, d), Eigen::VectorXd(n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    auto const& row = rows[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < d; ++j) table.points(i, j) = row[static_cast<std::size_t>(j)];
    table.weights(i) = row.back();
  }
  return table;
}

PoolTable read_pool_csv(std::string const& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_pool_csv(in);
}

void write_design_csv(std::ostream& out, Design const& design) {
  for (auto row : design.rows) out << row + 1 << '\n';
}

std::string solution_json(SparseSolution const& solution) {
  nlohmann::ordered_json j;
  auto coeffs = nlohmann::ordered_json::array();
  for (auto idx : solution.support)
    coeffs.push_back({{"index", idx}, {"value", solution.coeffs(idx)}});
  j["coeffs"] = coeffs;
  j["n_basis"] = solution.coeffs.size();
  j["support"] = solution.support;
  j["k_used"] = solution.k_used;
  j["n_model_evals"] = solution.n_model_evals;
  j["residual_history"] = solution.residual_history;
  j["iterations"] = solution.iterations;
  auto design = nlohmann::ordered_json::array();
  for (auto row : solution.design) design.push_back(row + 1);
  j["design"] = design;
  return j.dump(2);
}

}  // namespace dspce
