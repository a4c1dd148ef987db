#include "dspce/design.hpp"

#include <algorithm>
#include <string>

namespace dspce {

bool Design::contains(Eigen::Index row) const {
  return std::find(rows.begin(), rows.end(), row) != rows.end();
}

InfoMatrix information_matrix(Eigen::Ref<const Eigen::MatrixXd> const& design_matrix) {
  if (design_matrix.rows() == 0) throw std::invalid_argument("information matrix of an empty design");
  InfoMatrix info;
  info.n_rows = design_matrix.rows();
  info.matrix = design_matrix.transpose() * design_matrix / static_cast<double>(design_matrix.rows());
  return info;
}

namespace {

void check_selection_size(Eigen::Ref<const Eigen::MatrixXd> const& candidate, Eigen::Index n) {
  if (n < 1) throw std::invalid_argument("design size must be >= 1");
  if (n > candidate.rows())
    throw std::invalid_argument("design size " + std::to_string(n) + " exceeds the " +
                                std::to_string(candidate.rows()) + " candidate rows");
}

// Lowest index among the unused rows whose score is within a relative 1e-12 of the best.
Eigen::Index argmax_unused(Eigen::VectorXd const& score, std::vector<char> const& used) {
  double best = -1.0;
  for (Eigen::Index i = 0; i < score.size(); ++i)
    if (!used[static_cast<std::size_t>(i)]) best = std::max(best, score(i));
  if (best < 0.0) return -1;
  double const floor = best * (1.0 - 1e-12);
  for (Eigen::Index i = 0; i < score.size(); ++i)
    if (!used[static_cast<std::size_t>(i)] && score(i) >= floor) return i;
  return -1;
}

}  // namespace

Design rrqr_select(Eigen::Ref<const Eigen::MatrixXd> const& candidate, Eigen::Index n) {
  check_selection_size(candidate, n);
  Eigen::MatrixXd const transposed = candidate.transpose();
  return Design{pivoted_qr_select(transposed, n).pivots};
}

Design subset_select(Eigen::Ref<const Eigen::MatrixXd> const& candidate, Eigen::Index n) {
  check_selection_size(candidate, n);
  // Right singular vectors of candidate^T are the left singular vectors of candidate.
  Eigen::BDCSVD<Eigen::MatrixXd> svd(candidate, Eigen::ComputeThinU);
  Eigen::MatrixXd const leading = svd.matrixU().transpose();
  return Design{pivoted_qr_select(leading, n).pivots};
}

Design augment(Design const& design, Eigen::Ref<const Eigen::MatrixXd> const& candidate,
               IndexList const& support, Eigen::Index n_add) {
  if (support.empty()) throw std::invalid_argument("augment needs a non-empty support");
  if (design.rows.empty()) throw std::invalid_argument("augment needs a non-empty design");
  if (n_add < 0) throw std::invalid_argument("n_add must be non-negative");
  for (auto s : support)
    if (s < 0 || s >= candidate.cols()) throw std::out_of_range("support index out of range");

  std::vector<char> used(static_cast<std::size_t>(candidate.rows()), 0);
  for (auto r : design.rows) {
    if (r < 0 || r >= candidate.rows()) throw std::out_of_range("design row out of range");
    used[static_cast<std::size_t>(r)] = 1;
  }
  auto const unused = std::count(used.begin(), used.end(), char{0});
  if (unused < n_add)
    throw std::invalid_argument("only " + std::to_string(unused) + " unused candidates, " +
                                std::to_string(n_add) + " requested");

  Eigen::MatrixXd const restricted = select_columns(candidate, support);  // M x K
  Eigen::Index const k = restricted.cols();
  double const scale = restricted.rowwise().norm().maxCoeff();
  double const residual_tol = std::sqrt(std::numeric_limits<double>::epsilon()) * scale;

  Design out = design;
  for (Eigen::Index step = 0; step < n_add; ++step) {
    Eigen::MatrixXd const current = select_rows(restricted, out.rows);  // N x K
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(current, Eigen::ComputeThinV);
    auto const& sigma = svd.singularValues();
    double const rank_tol = static_cast<double>(std::max(current.rows(), k)) *
                            std::numeric_limits<double>::epsilon() * (sigma.size() ? sigma(0) : 0.0);
    Eigen::Index rank = 0;
    while (rank < sigma.size() && sigma(rank) > rank_tol) ++rank;
    Eigen::MatrixXd const basis = svd.matrixV().leftCols(rank);  // row space of the design on S

    Eigen::Index pick = -1;
    if (rank < k) {
      // Candidate^T minus its projection Phi_N^T (Phi_N^T)^+ Phi_c^T onto the design's row space.
      Eigen::MatrixXd const residual = restricted - (restricted * basis) * basis.transpose();
      Eigen::VectorXd const norms = residual.rowwise().norm();
      pick = argmax_unused(norms, used);
      if (pick >= 0 && !(norms(pick) > residual_tol)) pick = -1;
    }
    if (pick < 0) {
      Eigen::VectorXd const inv_sigma = sigma.head(rank).cwiseInverse();
      Eigen::VectorXd const leverage =
          ((restricted * basis) * inv_sigma.asDiagonal()).rowwise().squaredNorm();
      pick = argmax_unused(leverage, used);
    }
    used[static_cast<std::size_t>(pick)] = 1;
    out.rows.push_back(pick);
  }
  return out;
}

double det_ratio_check(Eigen::Ref<const Eigen::MatrixXd> const& a, Eigen::Ref<const Eigen::MatrixXd> const& b,
                       Eigen::Ref<const Eigen::MatrixXd> const& c, Eigen::Index i, Eigen::Index j) {
  if (a.rows() != a.cols()) throw std::invalid_argument("A must be square");
  if (b.rows() != a.rows() || c.cols() != b.cols()) throw std::invalid_argument("partition shapes disagree");
  if (i < 0 || i >= a.rows() || j < 0 || j >= b.cols()) throw std::out_of_range("exchange index out of range");
  for (Eigen::Index k = 0; k < a.rows(); ++k)
    if (!(std::abs(a(k, k)) > 0.0)) throw std::invalid_argument("A is singular");

  auto const upper = a.triangularView<Eigen::Upper>();
  Eigen::MatrixXd const ainv_b = upper.solve(b);
  Eigen::VectorXd unit = Eigen::VectorXd::Unit(a.rows(), i);
  Eigen::VectorXd const ainv_row = upper.transpose().solve(unit);  // row i of A^-1
  double const term = c.rows() > 0 ? c.col(j).norm() * ainv_row.norm() : 0.0;
  return std::sqrt(ainv_b(i, j) * ainv_b(i, j) + term * term);
}

}  // namespace dspce
