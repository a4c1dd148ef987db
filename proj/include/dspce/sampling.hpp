#pragma once

#include "dspce/basis.hpp"
#include "dspce/rng.hpp"

#include <Eigen/Dense>

#include <string_view>
#include <vector>

namespace dspce {

enum class SamplingStrategy { StandardMC, CoherenceOptimal };

std::string_view to_string(SamplingStrategy strategy);
SamplingStrategy parse_sampling(std::string_view name);

struct McmcParams {
  int burn_in = 1000;
  /// 0 selects max(1, ceil(d * p / 10)).
  int thinning = 0;
};

/// Candidate inputs with their importance weights.
///
/// StandardMC pools carry unit weights. CoherenceOptimal pools carry
/// w = sqrt(P) / B(xi), so that every weighted basis row has squared norm P.
struct SamplePool {
  Eigen::MatrixXd points;  // M x d
  Eigen::VectorXd weights;
  SamplingStrategy strategy = SamplingStrategy::StandardMC;
  BasisSpec basis;
  RngStream rng;
  double acceptance_rate = 1.0;  // MCMC only

  Eigen::Index size() const { return points.rows(); }
};

SamplePool sample_standard(BasisSpec const& spec, Eigen::Index count, RngStream const& rng);

/// Metropolis-Hastings with independence proposals targeting f(xi) * B(xi)^2.
SamplePool sample_coherence_optimal(BasisSpec const& spec, Eigen::Index count, RngStream const& rng,
                                    McmcParams const& params = {});

SamplePool sample_pool(BasisSpec const& spec, SamplingStrategy strategy, Eigen::Index count,
                       RngStream const& rng, McmcParams const& params = {});

/// max_i sum_k (w_i psi_k(xi_i))^2 over the pool.
double coherence(BasisSpec const& spec, SamplePool const& pool);

/// Weighted candidate matrix Phi_c = W Psi_c.
Eigen::MatrixXd candidate_matrix(SamplePool const& pool);

/// Rows of `pool` listed in `rows`, in that order.
SamplePool subsample(SamplePool const& pool, std::vector<Eigen::Index> const& rows);

}  // namespace dspce
