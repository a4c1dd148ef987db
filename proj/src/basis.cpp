#include "dspce/basis.hpp"

#include <limits>
#include <vector>

namespace dspce {

std::string_view to_string(Family family) {
  return family == Family::Legendre ? "legendre" : "hermite";
}

Family parse_family(std::string_view name) {
  if (name == "legendre" || name == "Legendre") return Family::Legendre;
  if (name == "hermite" || name == "Hermite") return Family::Hermite;
  throw std::invalid_argument("unknown polynomial family: " + std::string(name));
}

std::int64_t total_order_size(int dim, int order) {
  if (dim < 1) throw std::invalid_argument("basis dimension must be >= 1");
  if (order < 0) throw std::invalid_argument("basis order must be >= 0");
  // C(order+dim, k) built incrementally; each partial product is itself a binomial.
  int const k = std::min(dim, order);
  int const n = dim + order;
  std::int64_t const limit = std::numeric_limits<int>::max();
  std::int64_t value = 1;
  for (int i = 1; i <= k; ++i) {
    std::int64_t const factor = n - k + i;
    if (value > std::numeric_limits<std::int64_t>::max() / factor)
      throw std::overflow_error("total-order basis size overflows");
    value = value * factor / i;
    if (value > limit)
      throw std::overflow_error("total-order basis size C(" + std::to_string(n) + "," +
                                std::to_string(dim) + ") exceeds the supported range");
  }
  return value;
}

namespace {

// Appends every composition of `remaining` into coords [pos, dim) with
// larger leading coordinates first.
void enumerate_grade(std::vector<int>& current, int pos, int remaining,
                     std::vector<std::vector<int>>& out) {
  int const dim = static_cast<int>(current.size());
  if (pos == dim - 1) {
    current[pos] = remaining;
    out.push_back(current);
    return;
  }
  for (int v = remaining; v >= 0; --v) {
    current[pos] = v;
    enumerate_grade(current, pos + 1, remaining - v, out);
  }
  current[pos] = 0;
}

void check_point(BasisSpec const& spec, Eigen::Ref<const Eigen::VectorXd> const& point) {
  if (point.size() != spec.dim)
    throw std::invalid_argument("point has " + std::to_string(point.size()) +
                                " coordinates, basis dimension is " + std::to_string(spec.dim));
  for (Eigen::Index j = 0; j < point.size(); ++j) {
    if (!std::isfinite(point(j))) throw std::domain_error("non-finite basis input");
    if (spec.family == Family::Legendre && std::abs(point(j)) > 1.0)
      throw std::domain_error("Legendre input outside [-1,1]");
  }
}

// Fills `values` (length P) given a precomputed (order+1) x dim table.
void tensorize(BasisSpec const& spec, Eigen::MatrixXd const& table,
               Eigen::Ref<Eigen::RowVectorXd, 0, Eigen::InnerStride<>> values) {
  for (Eigen::Index k = 0; k < spec.size(); ++k) {
    double v = 1.0;
    for (int j = 0; j < spec.dim; ++j) v *= table(spec.multi_indices(k, j), j);
    values(k) = v;
  }
}

void univariate_table(BasisSpec const& spec, Eigen::Ref<const Eigen::VectorXd> const& point,
                      Eigen::MatrixXd& table) {
  table.resize(spec.order + 1, spec.dim);
  for (int j = 0; j < spec.dim; ++j) eval_univariate(spec.family, point(j), spec.order, table.col(j));
}

}  // namespace

BasisSpec build_basis(Family family, int dim, int order) {
  auto const count = total_order_size(dim, order);

  std::vector<std::vector<int>> indices;
  indices.reserve(static_cast<std::size_t>(count));
  std::vector<int> current(dim, 0);
  for (int grade = 0; grade <= order; ++grade) enumerate_grade(current, 0, grade, indices);

  BasisSpec spec;
  spec.family = family;
  spec.dim = dim;
  spec.order = order;
  spec.multi_indices.resize(static_cast<Eigen::Index>(indices.size()), dim);
  for (std::size_t k = 0; k < indices.size(); ++k)
    for (int j = 0; j < dim; ++j) spec.multi_indices(static_cast<Eigen::Index>(k), j) = indices[k][j];
  return spec;
}

Eigen::VectorXd eval_basis(BasisSpec const& spec, Eigen::Ref<const Eigen::VectorXd> const& point) {
  check_point(spec, point);
  Eigen::MatrixXd table;
  univariate_table(spec, point, table);
  Eigen::RowVectorXd values(spec.size());
  tensorize(spec, table, values);
  return values.transpose();
}

double b_of_xi(BasisSpec const& spec, Eigen::Ref<const Eigen::VectorXd> const& point) {
  return eval_basis(spec, point).norm();
}

Eigen::MatrixXd basis_matrix(BasisSpec const& spec, Eigen::Ref<const Eigen::MatrixXd> const& points) {
  if (points.cols() != spec.dim)
    throw std::invalid_argument("point matrix has " + std::to_string(points.cols()) +
                                " columns, basis dimension is " + std::to_string(spec.dim));
  Eigen::MatrixXd psi(points.rows(), spec.size());
  Eigen::MatrixXd table;
  Eigen::VectorXd point(spec.dim);
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    point = points.row(i).transpose();
    check_point(spec, point);
    univariate_table(spec, point, table);
    tensorize(spec, table, psi.row(i));
  }
  return psi;
}

Eigen::MatrixXd assemble_matrix(BasisSpec const& spec,
                                Eigen::Ref<const Eigen::MatrixXd> const& points,
                                Eigen::Ref<const Eigen::VectorXd> const& weights) {
  if (weights.size() != points.rows())
    throw std::invalid_argument("weights length " + std::to_string(weights.size()) +
                                " does not match " + std::to_string(points.rows()) + " points");
  if ((weights.array() <= 0.0).any()) throw std::invalid_argument("weights must be strictly positive");
  return weights.asDiagonal() * basis_matrix(spec, points);
}

}  // namespace dspce
