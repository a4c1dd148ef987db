#pragma once

#include "dspce/linalg.hpp"
#include "dspce/rng.hpp"
#include "dspce/sampling.hpp"

#include <Eigen/Dense>

#include <functional>
#include <unordered_map>
#include <vector>

namespace dspce {

/// Minimum-norm least-squares solution of a x ~= rhs.
///
/// Uses a complete orthogonal decomposition with rank threshold max(rows, cols) * eps,
/// which yields the same minimizer as the SVD pseudoinverse.
template <typename DerivedA, typename DerivedB>
Vector<typename DerivedA::Scalar> lsa(Eigen::MatrixBase<DerivedA> const& a,
                                      Eigen::MatrixBase<DerivedB> const& rhs) {
  using Scalar = typename DerivedA::Scalar;
  if (a.rows() != rhs.rows()) throw std::invalid_argument("lsa: row count mismatch");
  if (a.cols() == 0) return Vector<Scalar>();
  Eigen::CompleteOrthogonalDecomposition<Matrix<Scalar>> cod;
  cod.setThreshold(static_cast<Scalar>(std::max(a.rows(), a.cols())) * std::numeric_limits<Scalar>::epsilon());
  cod.compute(a);
  return cod.solve(rhs);
}

/// rhs minus its projection onto the column space of a.
template <typename DerivedA, typename DerivedB>
Vector<typename DerivedA::Scalar> residual(Eigen::MatrixBase<DerivedA> const& a,
                                           Eigen::MatrixBase<DerivedB> const& rhs) {
  if (a.cols() == 0) return rhs;
  return rhs - a * lsa(a, rhs);
}

struct SparseSolution {
  Eigen::VectorXd coeffs;
  IndexList support;  // ascending
  int k_used = 0;
  std::vector<double> residual_history;
  int n_model_evals = 0;
  int iterations = 0;
  IndexList design;  // candidate rows consumed, in selection order (design-based solvers)
};

/// QoI callback. `candidate_row` identifies the pool row being evaluated so that
/// tabulated QoIs can be looked up; analytic models ignore it.
using QoiFunction = std::function<double(Eigen::Index candidate_row, Eigen::VectorXd const& point)>;

/// Counting, caching wrapper around a QoI; each candidate row is evaluated at most once.
class Oracle {
 public:
  explicit Oracle(QoiFunction fn) : fn_(std::move(fn)) {}

  double operator()(Eigen::Index candidate_row, Eigen::VectorXd const& point);

  int evaluations() const { return evaluations_; }
  int cache_hits() const { return cache_hits_; }

 private:
  QoiFunction fn_;
  std::unordered_map<Eigen::Index, double> cache_;
  int evaluations_ = 0;
  int cache_hits_ = 0;
};

/// Weighted candidate matrix with the points and weights it was built from.
struct CandidateSet {
  Eigen::MatrixXd phi;     // M x P
  Eigen::MatrixXd points;  // M x d
  Eigen::VectorXd weights;

  Eigen::Index size() const { return phi.rows(); }
};

CandidateSet make_candidates(SamplePool const& pool);

/// Subspace Pursuit for a K-sparse solution of v ~= phi c.
SparseSolution subspace_pursuit(int k, Eigen::Ref<const Eigen::MatrixXd> const& phi,
                                Eigen::Ref<const Eigen::VectorXd> const& v);

struct CvParams {
  int n_repeats = 4;  // N_R
  int n_grid = 10;    // N_K
};

struct CvResult {
  int k = 1;
  std::vector<int> grid;
  std::vector<double> mean_errors;
};

/// Holdout cross-validation of the SP sparsity level over a linear grid in [1, N/2].
/// Returns the smallest K whose mean held-out error is within 1e-10 ||v|| of the minimum.
CvResult cross_validation_curve(Eigen::Ref<const Eigen::MatrixXd> const& phi,
                                Eigen::Ref<const Eigen::VectorXd> const& v, CvParams const& params,
                                Engine& engine);

int cross_validate_k(Eigen::Ref<const Eigen::MatrixXd> const& phi, Eigen::Ref<const Eigen::VectorXd> const& v,
                     CvParams const& params, Engine& engine);

/// D-optimal Subspace Pursuit with a fixed sparsity level and evaluation budget n_max.
SparseSolution dsp(int k, CandidateSet const& candidates, Eigen::Index n_max, Oracle& oracle);

/// D-optimal Subspace Pursuit that re-estimates K by cross-validation whenever the design grows.
SparseSolution dsp_cv(CandidateSet const& candidates, Eigen::Index n_max, Oracle& oracle,
                      CvParams const& params, Engine& engine);

}  // namespace dspce
