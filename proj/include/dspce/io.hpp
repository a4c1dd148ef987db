#pragma once

#include "dspce/design.hpp"
#include "dspce/sampling.hpp"
#include "dspce/solvers.hpp"

#include <Eigen/Dense>

#include <iosfwd>
#include <string>

namespace dspce {

/// Decimal text with 17 significant digits; NaN renders as "n/a".
std::string format_double(double value);

/// One row per point: the coordinates, then the weight.
void write_pool_csv(std::ostream& out, SamplePool const& pool);
void write_pool_csv(std::string const& path, SamplePool const& pool);

struct PoolTable {
  Eigen::MatrixXd points;
  Eigen::VectorXd weights;
};

PoolTable read_pool_csv(std::istream& in);
PoolTable read_pool_csv(std::string const& path);

/// One 1-based row index per line, in selection order.
void write_design_csv(std::ostream& out, Design const& design);

/// JSON with coeffs as sparse {index, value} pairs (0-based basis indices).
std::string solution_json(SparseSolution const& solution);

}  // namespace dspce
