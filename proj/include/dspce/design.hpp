#pragma once

#include "dspce/linalg.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <stdexcept>

namespace dspce {

/// Ordered, append-only list of distinct candidate rows (0-based).
struct Design {
  IndexList rows;

  Eigen::Index size() const { return static_cast<Eigen::Index>(rows.size()); }
  bool contains(Eigen::Index row) const;
};

/// M = Phi^T Phi / N for the N x K design matrix Phi.
struct InfoMatrix {
  Eigen::MatrixXd matrix;
  Eigen::Index n_rows = 0;
};

InfoMatrix information_matrix(Eigen::Ref<const Eigen::MatrixXd> const& design_matrix);

/// |det M|^(1/K) from the singular values; 0 when M is numerically singular.
template <typename Derived>
typename Derived::Scalar phi_d(Eigen::MatrixBase<Derived> const& m) {
  using Scalar = typename Derived::Scalar;
  if (m.rows() != m.cols()) throw std::invalid_argument("phi_d needs a square matrix");
  if (m.rows() == 0) return Scalar(1);
  Eigen::JacobiSVD<Matrix<Scalar>> svd(m);
  auto const& s = svd.singularValues();
  Scalar const tol = static_cast<Scalar>(m.rows()) * std::numeric_limits<Scalar>::epsilon() * s(0);
  if (!(s(s.size() - 1) > tol)) return Scalar(0);
  return std::exp(s.array().log().mean());
}

inline double phi_d(InfoMatrix const& info) { return phi_d(info.matrix); }

/// phi_d(M / ||M||_F).
template <typename Derived>
typename Derived::Scalar phi_d_normalized(Eigen::MatrixBase<Derived> const& m) {
  auto const frob = m.norm();
  if (!(frob > 0)) throw std::invalid_argument("phi_d_normalized of a zero matrix is undefined");
  return phi_d(m / frob);
}

inline double phi_d_normalized(InfoMatrix const& info) { return phi_d_normalized(info.matrix); }

/// N-point design from the pivots of a column-pivoted QR of candidate^T.
Design rrqr_select(Eigen::Ref<const Eigen::MatrixXd> const& candidate, Eigen::Index n);

/// N-point design from a pivoted QR of the leading right singular vectors of candidate^T.
Design subset_select(Eigen::Ref<const Eigen::MatrixXd> const& candidate, Eigen::Index n);

/// Appends `n_add` unused candidate rows chosen D-optimally for the columns in `support`.
///
/// The candidate columns are projected onto the orthogonal complement of the
/// design's row space on the support, and the largest residual column (QR
/// pivoting) is taken. When the design already spans the support so the residual
/// vanishes, the candidate maximizing det(Phi_S^T Phi_S + x x^T) is taken instead,
/// i.e. the largest x^T (Phi_S^T Phi_S)^+ x. Ties go to the lowest row index.
Design augment(Design const& design, Eigen::Ref<const Eigen::MatrixXd> const& candidate,
               IndexList const& support, Eigen::Index n_add);

/// Ratio det(A')/det(A) after exchanging column i of [A B; 0 C] with column j of [B; C]:
/// sqrt((A^-1 B)(i,j)^2 + (||C(:,j)|| ||A^-1(i,:)||)^2).
double det_ratio_check(Eigen::Ref<const Eigen::MatrixXd> const& a, Eigen::Ref<const Eigen::MatrixXd> const& b,
                       Eigen::Ref<const Eigen::MatrixXd> const& c, Eigen::Index i, Eigen::Index j);

}  // namespace dspce
