#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace dspce {

enum class Family { Legendre, Hermite };

std::string_view to_string(Family family);
Family parse_family(std::string_view name);

/// Total-order tensor basis of orthonormal polynomials.
///
/// Row k of `multi_indices` holds the per-coordinate degrees of psi_k. Rows are
/// graded by total degree; within a grade the first coordinate decreases, then
/// the second, and so on, e.g. (0,0) (1,0) (0,1) (2,0) (1,1) (0,2).
struct BasisSpec {
  Family family = Family::Legendre;
  int dim = 1;
  int order = 0;
  Eigen::MatrixXi multi_indices;

  Eigen::Index size() const { return multi_indices.rows(); }
};

/// C(order + dim, dim). Throws std::overflow_error when the count does not fit in an int.
std::int64_t total_order_size(int dim, int order);

BasisSpec build_basis(Family family, int dim, int order);

/// Orthonormal univariate polynomials psi_0..psi_{max_degree} at x.
///
/// Legendre is normalized against U(-1,1), Hermite against N(0,1) (probabilists').
template <typename Scalar, typename Derived>
void eval_univariate(Family family, Scalar x, int max_degree,
                     Eigen::MatrixBase<Derived> const& out_) {
  auto& out = const_cast<Eigen::MatrixBase<Derived>&>(out_);
  out(0) = Scalar(1);
  if (max_degree == 0) return;
  out(1) = x;
  if (family == Family::Legendre) {
    // Raw three-term recurrence, normalized afterwards.
    for (int n = 1; n < max_degree; ++n)
      out(n + 1) = ((2 * n + 1) * x * out(n) - n * out(n - 1)) / Scalar(n + 1);
    for (int n = 1; n <= max_degree; ++n) out(n) *= std::sqrt(Scalar(2 * n + 1));
  } else {
    // He_n / sqrt(n!) carried through the recurrence so n! never materializes.
    for (int n = 1; n < max_degree; ++n)
      out(n + 1) = (x * out(n) - std::sqrt(Scalar(n)) * out(n - 1)) / std::sqrt(Scalar(n + 1));
  }
}

/// psi_k(point) for every k. Throws std::domain_error for a Legendre point outside [-1,1]^d.
Eigen::VectorXd eval_basis(BasisSpec const& spec, Eigen::Ref<const Eigen::VectorXd> const& point);

/// B(point) = sqrt(sum_k psi_k(point)^2).
double b_of_xi(BasisSpec const& spec, Eigen::Ref<const Eigen::VectorXd> const& point);

/// Unweighted N x P matrix with entries psi_j(points.row(i)).
Eigen::MatrixXd basis_matrix(BasisSpec const& spec, Eigen::Ref<const Eigen::MatrixXd> const& points);

/// Weighted measurement matrix: row i is weights(i) * psi(points.row(i)).
Eigen::MatrixXd assemble_matrix(BasisSpec const& spec,
                                Eigen::Ref<const Eigen::MatrixXd> const& points,
                                Eigen::Ref<const Eigen::VectorXd> const& weights);

}  // namespace dspce
