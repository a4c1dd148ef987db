#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace dspce {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using IndexList = std::vector<Eigen::Index>;

/// Column selection produced by Householder QR with column pivoting.
template <typename Scalar>
struct PivotedQr {
  IndexList pivots;              // selected column indices, in pivot order
  std::vector<Scalar> r_diag;    // |R(k,k)| for each pivot
  Eigen::Index rank = 0;         // pivots chosen before the first restart
};

namespace detail {

// One Businger-Golub pass over `work`, selecting at most `wanted` columns.
// `labels` maps work columns to caller indices and is permuted alongside.
template <typename Scalar>
void pivoted_qr_pass(Matrix<Scalar>& work, IndexList& labels, Eigen::Index wanted,
                     PivotedQr<Scalar>& out) {
  using std::abs;
  using std::sqrt;
  Eigen::Index const m = work.rows(), n = work.cols();
  Vector<Scalar> norms = work.colwise().norm().transpose();
  Vector<Scalar> reference = norms;
  Scalar const largest = n > 0 ? norms.maxCoeff() : Scalar(0);
  Scalar const tol = static_cast<Scalar>(std::max(m, n)) * std::numeric_limits<Scalar>::epsilon() * largest;
  Vector<Scalar> w;

  Eigen::Index const steps = std::min({m, n, wanted});
  for (Eigen::Index k = 0; k < steps; ++k) {
    Eigen::Index best = k;
    for (Eigen::Index j = k + 1; j < n; ++j)
      if (norms(j) > norms(best) || (norms(j) == norms(best) && labels[j] < labels[best])) best = j;
    if (!(norms(best) > tol)) return;

    if (best != k) {
      work.col(k).swap(work.col(best));
      std::swap(norms(k), norms(best));
      std::swap(reference(k), reference(best));
      std::swap(labels[k], labels[best]);
    }

    // Householder reflector for work(k:m, k).
    auto x = work.col(k).tail(m - k);
    Scalar const alpha = x.norm();
    Scalar const beta = x(0) >= Scalar(0) ? -alpha : alpha;
    Vector<Scalar> v = x;
    v(0) -= beta;
    Scalar const vnorm2 = v.squaredNorm();
    x.setZero();
    x(0) = beta;
    if (vnorm2 > Scalar(0) && k + 1 < n) {
      auto trailing = work.block(k, k + 1, m - k, n - k - 1);
      w.noalias() = trailing.transpose() * v;
      trailing.noalias() -= (Scalar(2) / vnorm2) * v * w.transpose();
    }
    out.pivots.push_back(labels[k]);
    out.r_diag.push_back(abs(beta));

    // Norm downdating with recomputation once cancellation passes a factor of 100.
    for (Eigen::Index j = k + 1; j < n; ++j) {
      if (norms(j) == Scalar(0)) continue;
      Scalar const ratio = abs(work(k, j)) / norms(j);
      Scalar const remaining = std::max(Scalar(0), (Scalar(1) - ratio) * (Scalar(1) + ratio));
      Scalar const updated = norms(j) * sqrt(remaining);
      if (updated < reference(j) / Scalar(100)) {
        norms(j) = k + 1 < m ? work.col(j).tail(m - k - 1).norm() : Scalar(0);
        reference(j) = norms(j);
      } else {
        norms(j) = updated;
      }
    }
  }
}

}  // namespace detail

/// Selects `count` columns of `a` by QR with column pivoting.
///
/// Columns are chosen greedily by largest residual norm, ties going to the
/// lowest column index, so |R(k,k)| is non-increasing within a pass. Once the
/// numerical rank (or the row count) is exhausted and more columns are wanted,
/// a fresh pass is run on the columns not yet selected.
template <typename Derived>
PivotedQr<typename Derived::Scalar> pivoted_qr_select(Eigen::MatrixBase<Derived> const& a,
                                                      Eigen::Index count) {
  using Scalar = typename Derived::Scalar;
  PivotedQr<Scalar> out;
  count = std::min(count, a.cols());
  IndexList remaining(static_cast<std::size_t>(a.cols()));
  std::iota(remaining.begin(), remaining.end(), Eigen::Index{0});

  bool first = true;
  while (static_cast<Eigen::Index>(out.pivots.size()) < count) {
    Matrix<Scalar> work(a.rows(), static_cast<Eigen::Index>(remaining.size()));
    for (std::size_t j = 0; j < remaining.size(); ++j)
      work.col(static_cast<Eigen::Index>(j)) = a.col(remaining[j]);
    IndexList labels = remaining;
    auto const before = out.pivots.size();
    detail::pivoted_qr_pass(work, labels, count - static_cast<Eigen::Index>(before), out);
    if (first) {
      out.rank = static_cast<Eigen::Index>(out.pivots.size());
      first = false;
    }
    if (out.pivots.size() == before) {
      // Remaining columns are numerically zero: fill by lowest index.
      std::sort(remaining.begin(), remaining.end());
      for (auto idx : remaining) {
        if (static_cast<Eigen::Index>(out.pivots.size()) == count) break;
        out.pivots.push_back(idx);
        out.r_diag.push_back(Scalar(0));
      }
      break;
    }
    IndexList chosen(out.pivots.begin() + static_cast<std::ptrdiff_t>(before), out.pivots.end());
    std::sort(chosen.begin(), chosen.end());
    IndexList rest;
    rest.reserve(remaining.size() - chosen.size());
    std::set_difference(remaining.begin(), remaining.end(), chosen.begin(), chosen.end(),
                        std::back_inserter(rest));
    remaining.swap(rest);
  }
  return out;
}

/// Indices of the k largest |values|, largest first; ties go to the lower index.
template <typename Derived>
IndexList top_k_abs(Eigen::MatrixBase<Derived> const& values, Eigen::Index k) {
  IndexList order(static_cast<std::size_t>(values.size()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  k = std::min(k, values.size());
  std::partial_sort(order.begin(), order.begin() + k, order.end(),
                    [&](Eigen::Index a, Eigen::Index b) {
                      auto const va = std::abs(values(a)), vb = std::abs(values(b));
                      return va > vb || (va == vb && a < b);
                    });
  order.resize(static_cast<std::size_t>(k));
  return order;
}

/// Moore-Penrose pseudoinverse via SVD, rank tolerance max(rows, cols) * eps * sigma_max.
template <typename Derived>
Matrix<typename Derived::Scalar> pinv(Eigen::MatrixBase<Derived> const& a) {
  using Scalar = typename Derived::Scalar;
  Eigen::BDCSVD<Matrix<Scalar>> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  auto const& s = svd.singularValues();
  Scalar const tol = s.size() > 0 ? static_cast<Scalar>(std::max(a.rows(), a.cols())) *
                                        std::numeric_limits<Scalar>::epsilon() * s(0)
                                  : Scalar(0);
  Vector<Scalar> inv = Vector<Scalar>::Zero(s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > tol) inv(i) = Scalar(1) / s(i);
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

/// Columns of `a` listed in `cols`.
template <typename Derived>
Matrix<typename Derived::Scalar> select_columns(Eigen::MatrixBase<Derived> const& a, IndexList const& cols) {
  Matrix<typename Derived::Scalar> out(a.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) out.col(static_cast<Eigen::Index>(j)) = a.col(cols[j]);
  return out;
}

/// Rows of `a` listed in `rows`.
template <typename Derived>
Matrix<typename Derived::Scalar> select_rows(Eigen::MatrixBase<Derived> const& a, IndexList const& rows) {
  Matrix<typename Derived::Scalar> out(static_cast<Eigen::Index>(rows.size()), a.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = a.row(rows[i]);
  return out;
}

}  // namespace dspce
