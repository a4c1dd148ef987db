#include "dspce/sampling.hpp"

#include <numbers>
#include <stdexcept>
#include <string>

namespace dspce {

std::string_view to_string(SamplingStrategy strategy) {
  return strategy == SamplingStrategy::StandardMC ? "standard" : "coherence-optimal";
}

SamplingStrategy parse_sampling(std::string_view name) {
  if (name == "standard" || name == "mc" || name == "MC") return SamplingStrategy::StandardMC;
  if (name == "coherence-optimal" || name == "coh-opt" || name == "coherence")
    return SamplingStrategy::CoherenceOptimal;
  throw std::invalid_argument("unknown sampling strategy: " + std::string(name));
}

namespace {

void draw_from_measure(Family family, Engine& engine, Eigen::Ref<Eigen::VectorXd> x) {
  if (family == Family::Legendre) {
    std::uniform_real_distribution<double> uniform(-1.0, 1.0);
    for (Eigen::Index j = 0; j < x.size(); ++j) x(j) = uniform(engine);
  } else {
    std::normal_distribution<double> normal;
    for (Eigen::Index j = 0; j < x.size(); ++j) x(j) = normal(engine);
  }
}

enum class Proposal { Measure, Ball, Chebyshev };

struct IndependenceSampler {
  BasisSpec const& spec;
  Proposal proposal;
  double radius = 0.0;

  void draw(Engine& engine, Eigen::Ref<Eigen::VectorXd> x) const {
    switch (proposal) {
      case Proposal::Measure:
        draw_from_measure(spec.family, engine, x);
        return;
      case Proposal::Ball: {
        std::normal_distribution<double> normal;
        std::uniform_real_distribution<double> uniform;
        for (Eigen::Index j = 0; j < x.size(); ++j) x(j) = normal(engine);
        double const r = radius * std::pow(uniform(engine), 1.0 / static_cast<double>(x.size()));
        x *= r / x.norm();
        return;
      }
      case Proposal::Chebyshev: {
        std::uniform_real_distribution<double> uniform;
        for (Eigen::Index j = 0; j < x.size(); ++j) {
          double v;
          do v = -std::cos(std::numbers::pi * uniform(engine));
          while (std::abs(v) >= 1.0);
          x(j) = v;
        }
        return;
      }
    }
  }

  // log(target / proposal) up to an additive constant.
  double log_ratio(Eigen::Ref<const Eigen::VectorXd> const& x) const {
    double const log_b2 = std::log(eval_basis(spec, x).squaredNorm());
    switch (proposal) {
      case Proposal::Measure:
        return log_b2;
      case Proposal::Ball:
        return log_b2 - 0.5 * x.squaredNorm();
      case Proposal::Chebyshev:
        return log_b2 + 0.5 * (1.0 - x.array().square()).log().sum();
    }
    throw std::logic_error("unreachable proposal kind");
  }
};

}  // namespace

SamplePool sample_standard(BasisSpec const& spec, Eigen::Index count, RngStream const& rng) {
  if (count < 1) throw std::invalid_argument("pool size must be >= 1");
  SamplePool pool;
  pool.points.resize(count, spec.dim);
  pool.weights = Eigen::VectorXd::Ones(count);
  pool.strategy = SamplingStrategy::StandardMC;
  pool.basis = spec;
  pool.rng = rng;
  auto engine = rng.engine();
  Eigen::VectorXd x(spec.dim);
  for (Eigen::Index i = 0; i < count; ++i) {
    draw_from_measure(spec.family, engine, x);
    pool.points.row(i) = x.transpose();
  }
  return pool;
}

SamplePool sample_coherence_optimal(BasisSpec const& spec, Eigen::Index count, RngStream const& rng,
                                    McmcParams const& params) {
  if (count < 1) throw std::invalid_argument("pool size must be >= 1");
  if (params.burn_in < 0 || params.thinning < 0) throw std::invalid_argument("invalid MCMC parameters");

  IndependenceSampler sampler{spec, Proposal::Measure};
  if (spec.order > spec.dim) {
    if (spec.family == Family::Hermite) {
      sampler.proposal = Proposal::Ball;
      sampler.radius = std::sqrt(2.0) * std::sqrt(2.0 * spec.order + 1.0);
    } else {
      sampler.proposal = Proposal::Chebyshev;
    }
  }
  int const thin = params.thinning > 0
                       ? params.thinning
                       : std::max(1, (spec.dim * spec.order + 9) / 10);

  auto engine = rng.engine();
  std::uniform_real_distribution<double> uniform;
  Eigen::VectorXd current(spec.dim), candidate(spec.dim);
  sampler.draw(engine, current);
  double current_log = sampler.log_ratio(current);
  if (!std::isfinite(current_log)) throw std::logic_error("MCMC initial state has zero density");

  SamplePool pool;
  pool.points.resize(count, spec.dim);
  pool.strategy = SamplingStrategy::CoherenceOptimal;
  pool.basis = spec;
  pool.rng = rng;

  std::int64_t accepted = 0, steps = 0;
  auto step = [&] {
    sampler.draw(engine, candidate);
    double const candidate_log = sampler.log_ratio(candidate);
    double const log_alpha = candidate_log - current_log;
    ++steps;
    if (log_alpha >= 0.0 || std::log(uniform(engine)) < log_alpha) {
      current.swap(candidate);
      current_log = candidate_log;
      ++accepted;
    }
  };
  for (int b = 0; b < params.burn_in; ++b) step();
  for (Eigen::Index i = 0; i < count; ++i) {
    for (int t = 0; t < thin; ++t) step();
    pool.points.row(i) = current.transpose();
  }
  pool.acceptance_rate = steps > 0 ? static_cast<double>(accepted) / static_cast<double>(steps) : 1.0;

  double const sqrt_p = std::sqrt(static_cast<double>(spec.size()));
  pool.weights.resize(count);
  for (Eigen::Index i = 0; i < count; ++i)
    pool.weights(i) = sqrt_p / b_of_xi(spec, pool.points.row(i).transpose());
  return pool;
}

SamplePool sample_pool(BasisSpec const& spec, SamplingStrategy strategy, Eigen::Index count,
                       RngStream const& rng, McmcParams const& params) {
  return strategy == SamplingStrategy::StandardMC ? sample_standard(spec, count, rng)
                                                  : sample_coherence_optimal(spec, count, rng, params);
}

double coherence(BasisSpec const& spec, SamplePool const& pool) {
  if (pool.size() == 0) throw std::invalid_argument("empty pool");
  return assemble_matrix(spec, pool.points, pool.weights).rowwise().squaredNorm().maxCoeff();
}

Eigen::MatrixXd candidate_matrix(SamplePool const& pool) {
  return assemble_matrix(pool.basis, pool.points, pool.weights);
}

SamplePool subsample(SamplePool const& pool, std::vector<Eigen::Index> const& rows) {
  SamplePool out;
  out.points.resize(static_cast<Eigen::Index>(rows.size()), pool.points.cols());
  out.weights.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    auto const i = rows[r];
    if (i < 0 || i >= pool.size()) throw std::out_of_range("pool row index out of range");
    out.points.row(static_cast<Eigen::Index>(r)) = pool.points.row(i);
    out.weights(static_cast<Eigen::Index>(r)) = pool.weights(i);
  }
  out.strategy = pool.strategy;
  out.basis = pool.basis;
  out.rng = pool.rng;
  out.acceptance_rate = pool.acceptance_rate;
  return out;
}

}  // namespace dspce
