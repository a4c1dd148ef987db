#include "dspce/solvers.hpp"

#include "dspce/design.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace dspce {

double Oracle::operator()(Eigen::Index candidate_row, Eigen::VectorXd const& point) {
  if (auto it = cache_.find(candidate_row); it != cache_.end()) {
    ++cache_hits_;
    return it->second;
  }
  double const value = fn_(candidate_row, point);
  ++evaluations_;
  cache_.emplace(candidate_row, value);
  return value;
}

CandidateSet make_candidates(SamplePool const& pool) {
  return CandidateSet{candidate_matrix(pool), pool.points, pool.weights};
}

namespace {

IndexList sorted_union(IndexList const& a, IndexList b) {
  IndexList out = a;
  out.insert(out.end(), b.begin(), b.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

IndexList initial_support(Eigen::MatrixXd const& phi, Eigen::VectorXd const& v, int k) {
  Eigen::VectorXd const corr = phi.transpose() * v;
  IndexList s = top_k_abs(corr, k);
  std::sort(s.begin(), s.end());
  return s;
}

// Expand by the K columns most correlated with the residual, fit on the union,
// keep the K largest coefficients.
IndexList pursuit_step(Eigen::MatrixXd const& phi, Eigen::VectorXd const& v, IndexList const& support,
                       Eigen::VectorXd const& resid, int k) {
  Eigen::VectorXd const corr = phi.transpose() * resid;
  IndexList const expanded = sorted_union(support, top_k_abs(corr, k));
  Eigen::VectorXd const coeffs = lsa(select_columns(phi, expanded), v);
  IndexList kept;
  for (auto pos : top_k_abs(coeffs, k)) kept.push_back(expanded[static_cast<std::size_t>(pos)]);
  std::sort(kept.begin(), kept.end());
  return kept;
}

Eigen::VectorXd support_residual(Eigen::MatrixXd const& phi, Eigen::VectorXd const& v, IndexList const& support) {
  return residual(select_columns(phi, support), v);
}

void finalize(SparseSolution& sol, Eigen::MatrixXd const& phi, Eigen::VectorXd const& v, IndexList support) {
  sol.support = std::move(support);
  sol.coeffs = Eigen::VectorXd::Zero(phi.cols());
  Eigen::VectorXd const fit = lsa(select_columns(phi, sol.support), v);
  for (std::size_t j = 0; j < sol.support.size(); ++j) sol.coeffs(sol.support[j]) = fit(static_cast<Eigen::Index>(j));
}

void check_k(int k, Eigen::Index rows, Eigen::Index cols) {
  if (k < 1 || 2 * static_cast<Eigen::Index>(k) > rows || k > cols)
    throw std::invalid_argument("sparsity level K=" + std::to_string(k) + " outside [1, " +
                                std::to_string(std::min(rows / 2, cols)) + "]");
}

// Residual growth beyond roundoff; ties at the 1e-15 level must not trigger the exit rule.
bool residual_grew(Eigen::VectorXd const& next, Eigen::VectorXd const& current, Eigen::VectorXd const& v) {
  return next.norm() > current.norm() + 1e-12 * v.norm();
}

using KChooser = std::function<int(Eigen::MatrixXd const&, Eigen::VectorXd const&)>;

// Shared body of DSP and DSP with cross-validation.
SparseSolution pursue_with_design(CandidateSet const& candidates, Eigen::Index n_max, Eigen::Index n0,
                                  Oracle& oracle, KChooser const& choose_k, bool rechoose_k) {
  Eigen::Index const p = candidates.phi.cols();
  int const evals_before = oracle.evaluations();

  Design design = subset_select(candidates.phi, n0);
  auto weighted_value = [&](Eigen::Index row) {
    Eigen::VectorXd const point = candidates.points.row(row).transpose();
    return candidates.weights(row) * oracle(row, point);
  };

  Eigen::MatrixXd phi = select_rows(candidates.phi, design.rows);
  Eigen::VectorXd v(n0);
  for (Eigen::Index i = 0; i < n0; ++i) v(i) = weighted_value(design.rows[static_cast<std::size_t>(i)]);

  SparseSolution sol;
  int k = choose_k(phi, v);
  check_k(k, phi.rows(), p);
  IndexList support = initial_support(phi, v, k);
  Eigen::VectorXd resid = support_residual(phi, v, support);
  sol.residual_history.push_back(resid.norm());

  Eigen::Index const exit_guard = n_max - n0 + 1;
  Eigen::Index previous_length = v.size();
  for (Eigen::Index iter = 1;; ++iter) {
    Eigen::Index const n = v.size();
    if (rechoose_k && iter > 1 && n != previous_length) k = choose_k(phi, v);
    previous_length = n;

    IndexList next = pursuit_step(phi, v, support, resid, k);

    bool grew = false;
    if (n < n_max) {
      design = augment(design, candidates.phi, next, 1);
      Eigen::Index const row = design.rows.back();
      phi.conservativeResize(n + 1, Eigen::NoChange);
      phi.row(n) = candidates.phi.row(row);
      v.conservativeResize(n + 1);
      v(n) = weighted_value(row);
      grew = true;
    }
    Eigen::VectorXd next_resid = support_residual(phi, v, next);
    sol.iterations = static_cast<int>(iter);

    if (n == n_max && iter == p) {
      support = std::move(next);
      sol.residual_history.push_back(next_resid.norm());
      break;
    }
    if (residual_grew(next_resid, resid, v) && iter >= exit_guard) break;

    bool const fixed_point = !grew && n == n_max && next == support;
    support = std::move(next);
    resid = std::move(next_resid);
    sol.residual_history.push_back(resid.norm());
    if (fixed_point) break;
  }

  finalize(sol, phi, v, std::move(support));
  sol.k_used = k;
  sol.n_model_evals = oracle.evaluations() - evals_before;
  sol.design = design.rows;
  return sol;
}

}  // namespace

SparseSolution subspace_pursuit(int k, Eigen::Ref<const Eigen::MatrixXd> const& phi_in,
                                Eigen::Ref<const Eigen::VectorXd> const& v_in) {
  if (phi_in.rows() != v_in.size()) throw std::invalid_argument("subspace_pursuit: row count mismatch");
  check_k(k, phi_in.rows(), phi_in.cols());
  Eigen::MatrixXd const phi = phi_in;
  Eigen::VectorXd const v = v_in;
  Eigen::Index const p = phi.cols();

  SparseSolution sol;
  IndexList support = initial_support(phi, v, k);
  Eigen::VectorXd resid = support_residual(phi, v, support);
  sol.residual_history.push_back(resid.norm());

  for (Eigen::Index iter = 1;; ++iter) {
    IndexList next = pursuit_step(phi, v, support, resid, k);
    Eigen::VectorXd next_resid = support_residual(phi, v, next);
    sol.iterations = static_cast<int>(iter);
    if (iter == p) {
      support = std::move(next);
      sol.residual_history.push_back(next_resid.norm());
      break;
    }
    if (residual_grew(next_resid, resid, v)) break;
    // An unchanged support reproduces itself forever; stopping here gives the same output.
    bool const fixed_point = next == support;
    support = std::move(next);
    resid = std::move(next_resid);
    sol.residual_history.push_back(resid.norm());
    if (fixed_point) break;
  }

  finalize(sol, phi, v, std::move(support));
  sol.k_used = k;
  return sol;
}

CvResult cross_validation_curve(Eigen::Ref<const Eigen::MatrixXd> const& phi_in,
                                Eigen::Ref<const Eigen::VectorXd> const& v_in, CvParams const& params,
                                Engine& engine) {
  Eigen::Index const n = phi_in.rows();
  if (n != v_in.size()) throw std::invalid_argument("cross_validate_k: row count mismatch");
  if (n < 5) throw std::invalid_argument("cross-validation needs at least 5 rows");
  if (params.n_repeats < 1 || params.n_grid < 1) throw std::invalid_argument("invalid CV parameters");

  Eigen::Index const n_val = n - static_cast<Eigen::Index>(std::floor(0.8 * static_cast<double>(n)));
  Eigen::Index const n_fit = n - n_val;
  if (n_fit < 2 || n_val < 1) throw std::invalid_argument("degenerate cross-validation split");

  Eigen::Index const k_max = n / 2;
  CvResult result;
  for (int i = 0; i < params.n_grid; ++i) {
    double const t = params.n_grid == 1 ? 0.0 : static_cast<double>(i) / (params.n_grid - 1);
    int const kk = static_cast<int>(std::lround(1.0 + t * static_cast<double>(k_max - 1)));
    // SP needs 2K <= retained rows (and K <= P).
    if (2 * static_cast<Eigen::Index>(kk) > n_fit || kk > phi_in.cols()) continue;
    if (result.grid.empty() || result.grid.back() != kk) result.grid.push_back(kk);
  }
  if (result.grid.empty()) result.grid.push_back(1);

  Eigen::MatrixXd const phi = phi_in;
  Eigen::VectorXd const v = v_in;
  IndexList order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});

  for (int kk : result.grid) {
    double total = 0.0;
    for (int r = 0; r < params.n_repeats; ++r) {
      std::shuffle(order.begin(), order.end(), engine);
      IndexList const val(order.begin(), order.begin() + n_val);
      IndexList const fit(order.begin() + n_val, order.end());
      Eigen::MatrixXd const phi_fit = select_rows(phi, fit);
      Eigen::VectorXd const v_fit = select_rows(v, fit);
      SparseSolution const sol = subspace_pursuit(kk, phi_fit, v_fit);
      total += (select_rows(phi, val) * sol.coeffs - select_rows(v, val)).norm();
    }
    result.mean_errors.push_back(total / params.n_repeats);
  }
  // Errors within roundoff of the minimum count as ties, so exact data picks the smallest K.
  double const best = *std::min_element(result.mean_errors.begin(), result.mean_errors.end());
  double const tie = best + 1e-10 * v.norm();
  for (std::size_t g = 0; g < result.grid.size(); ++g)
    if (result.mean_errors[g] <= tie) {
      result.k = result.grid[g];
      break;
    }
  return result;
}

int cross_validate_k(Eigen::Ref<const Eigen::MatrixXd> const& phi, Eigen::Ref<const Eigen::VectorXd> const& v,
                     CvParams const& params, Engine& engine) {
  return cross_validation_curve(phi, v, params, engine).k;
}

SparseSolution dsp(int k, CandidateSet const& candidates, Eigen::Index n_max, Oracle& oracle) {
  if (n_max > candidates.size())
    throw std::invalid_argument("budget exceeds the " + std::to_string(candidates.size()) + " candidates");
  if (k < 1 || 2 * static_cast<Eigen::Index>(k) > n_max)
    throw std::invalid_argument("budget " + std::to_string(n_max) + " is below 2K=" + std::to_string(2 * k));
  Eigen::Index const n0 = std::max<Eigen::Index>(2 * k, static_cast<Eigen::Index>(std::floor(0.8 * static_cast<double>(n_max))));
  return pursue_with_design(
      candidates, n_max, n0, oracle, [k](auto const&, auto const&) { return k; }, false);
}

SparseSolution dsp_cv(CandidateSet const& candidates, Eigen::Index n_max, Oracle& oracle, CvParams const& params,
                      Engine& engine) {
  if (n_max > candidates.size())
    throw std::invalid_argument("budget exceeds the " + std::to_string(candidates.size()) + " candidates");
  Eigen::Index const n0 = static_cast<Eigen::Index>(std::floor(0.8 * static_cast<double>(n_max)));
  if (n0 < 5) throw std::invalid_argument("budget too small for cross-validation (need floor(0.8 N) >= 5)");
  return pursue_with_design(
      candidates, n_max, n0, oracle,
      [&](Eigen::MatrixXd const& phi, Eigen::VectorXd const& v) { return cross_validate_k(phi, v, params, engine); },
      true);
}

}  // namespace dspce
