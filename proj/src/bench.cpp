#include "dspce/bench.hpp"

#include "dspce/design.hpp"
#include "dspce/io.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace dspce {

namespace {

constexpr std::array<std::pair<Strategy, std::string_view>, 6> kStrategyNames{{
    {Strategy::CohOpt, "Coh-Opt"},
    {Strategy::DCohOpt, "D-Coh-Opt"},
    {Strategy::SeqDCohOpt, "Seq-D-Coh-Opt"},
    {Strategy::MC, "MC"},
    {Strategy::DMC, "D-MC"},
    {Strategy::SeqDMC, "Seq-D-MC"},
}};

enum class Selection { Random, DOptimal, Sequential };

Selection selection_of(Strategy strategy) {
  switch (strategy) {
    case Strategy::CohOpt:
    case Strategy::MC: return Selection::Random;
    case Strategy::DCohOpt:
    case Strategy::DMC: return Selection::DOptimal;
    case Strategy::SeqDCohOpt:
    case Strategy::SeqDMC: return Selection::Sequential;
  }
  return Selection::Random;
}

std::uint64_t strategy_code(Strategy s) { return static_cast<std::uint64_t>(s); }

}  // namespace

std::string_view to_string(Strategy strategy) {
  for (auto const& [s, name] : kStrategyNames)
    if (s == strategy) return name;
  return "unknown";
}

Strategy parse_strategy(std::string_view name) {
  for (auto const& [s, n] : kStrategyNames)
    if (n == name) return s;
  throw std::invalid_argument("unknown strategy: " + std::string(name));
}

SamplingStrategy sampling_of(Strategy strategy) {
  switch (strategy) {
    case Strategy::MC:
    case Strategy::DMC:
    case Strategy::SeqDMC: return SamplingStrategy::StandardMC;
    default: return SamplingStrategy::CoherenceOptimal;
  }
}

// ---------------------------------------------------------------------------
// Configuration

ExperimentConfig parse_config(std::string const& json_text) {
  auto const j = nlohmann::json::parse(json_text);
  if (!j.is_object()) throw std::invalid_argument("experiment config must be a JSON object");
  static std::set<std::string> const known{"model", "family", "d", "p", "s", "alpha", "strategies", "N_grid",
                                           "M", "R", "N_val", "seed", "share_pool", "threads", "cv_repeats",
                                           "cv_grid", "mcmc_burn_in", "output_dir"};
  for (auto const& [key, value] : j.items())
    if (!known.count(key)) throw std::invalid_argument("unknown config key: " + key);

  ExperimentConfig c;
  c.model = j.value("model", c.model);
  if (j.contains("family")) c.family = parse_family(j.at("family").get<std::string>());
  c.d = j.value("d", c.d);
  c.p = j.value("p", c.p);
  c.s = j.value("s", c.s);
  c.alpha = j.value("alpha", c.alpha);
  if (j.contains("strategies")) {
    c.strategies.clear();
    for (auto const& s : j.at("strategies")) c.strategies.push_back(parse_strategy(s.get<std::string>()));
  }
  if (j.contains("N_grid")) c.N_grid = j.at("N_grid").get<std::vector<int>>();
  c.M = j.value("M", c.M);
  c.R = j.value("R", c.R);
  c.N_val = j.value("N_val", c.N_val);
  c.seed = j.value("seed", c.seed);
  c.share_pool = j.value("share_pool", c.share_pool);
  c.threads = j.value("threads", c.threads);
  c.cv_repeats = j.value("cv_repeats", c.cv_repeats);
  c.cv_grid = j.value("cv_grid", c.cv_grid);
  c.mcmc_burn_in = j.value("mcmc_burn_in", c.mcmc_burn_in);
  c.output_dir = j.value("output_dir", c.output_dir);
  return c;
}

ExperimentConfig load_config(std::string const& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string config_to_json(ExperimentConfig const& c) {
  nlohmann::ordered_json j;
  j["model"] = c.model;
  j["family"] = std::string(to_string(c.family));
  j["d"] = c.d;
  j["p"] = c.p;
  j["s"] = c.s;
  j["alpha"] = c.alpha;
  auto strategies = nlohmann::ordered_json::array();
  for (auto s : c.strategies) strategies.push_back(std::string(to_string(s)));
  j["strategies"] = strategies;
  j["N_grid"] = c.N_grid;
  j["M"] = c.M;
  j["R"] = c.R;
  j["N_val"] = c.N_val;
  j["seed"] = c.seed;
  j["share_pool"] = c.share_pool;
  j["threads"] = c.threads;
  j["cv_repeats"] = c.cv_repeats;
  j["cv_grid"] = c.cv_grid;
  j["mcmc_burn_in"] = c.mcmc_burn_in;
  j["output_dir"] = c.output_dir;
  return j.dump(2);
}

ReportRow const& ExperimentReport::at(Strategy strategy, int n) const {
  for (auto const& row : rows)
    if (row.strategy == strategy && row.N == n) return row;
  throw std::out_of_range("no report row for " + std::string(to_string(strategy)) + " at N=" + std::to_string(n));
}

// ---------------------------------------------------------------------------
// Error measures

double relative_validation_error(Eigen::Ref<const Eigen::VectorXd> const& coeffs,
                                 Eigen::Ref<const Eigen::MatrixXd> const& psi_val,
                                 Eigen::Ref<const Eigen::VectorXd> const& u_val) {
  double const denom = u_val.norm();
  if (!(denom > 0.0)) throw std::invalid_argument("validation data has zero norm");
  return (psi_val * coeffs - u_val).norm() / denom;
}

double relative_validation_error(Eigen::Ref<const Eigen::VectorXd> const& coeffs, BasisSpec const& spec,
                                 Eigen::Ref<const Eigen::MatrixXd> const& points,
                                 Eigen::Ref<const Eigen::VectorXd> const& u_val) {
  return relative_validation_error(coeffs, basis_matrix(spec, points), u_val);
}

Eigen::VectorXd oracle_solution(ManufacturedProblem const& problem, Eigen::Ref<const Eigen::MatrixXd> const& candidate,
                                Eigen::Ref<const Eigen::VectorXd> const& v, Eigen::Index n) {
  IndexList support;
  for (Eigen::Index k = 0; k < problem.truth.size(); ++k)
    if (problem.truth(k) != 0.0) support.push_back(k);
  if (n < static_cast<Eigen::Index>(support.size()))
    throw std::invalid_argument("oracle solution needs N >= s");
  if (candidate.rows() != v.size()) throw std::invalid_argument("candidate rows and rhs length differ");

  Eigen::VectorXd coeffs = Eigen::VectorXd::Zero(problem.truth.size());
  if (support.empty()) return coeffs;
  Eigen::MatrixXd const restricted = select_columns(candidate, support);
  Design const design = rrqr_select(restricted, n);
  Eigen::VectorXd const fit = lsa(select_rows(restricted, design.rows), select_rows(v, design.rows));
  for (std::size_t j = 0; j < support.size(); ++j) coeffs(support[j]) = fit(static_cast<Eigen::Index>(j));
  return coeffs;
}

// ---------------------------------------------------------------------------
// Experiment

struct Experiment::Repetition {
  CandidateSet candidates;
  IndexList pool_rows;                 // rows of the reconstruction pool used as candidates
  std::optional<ManufacturedProblem> problem;
  Eigen::VectorXd tabulated_qoi;       // manufactured: noisy, unweighted u per candidate
  double oracle_err = kNotApplicable;
  RngStream stream;
};

Experiment::Experiment(ExperimentConfig config) : config_(std::move(config)) {
  if (!config_.manufactured()) {
    model_ = parse_model(config_.model);
    config_.family = Family::Legendre;
    if (config_.d != input_dim(*model_))
      throw std::invalid_argument(config_.model + " has " + std::to_string(input_dim(*model_)) +
                                  " inputs, config has d=" + std::to_string(config_.d));
  }
  if (config_.strategies.empty()) throw std::invalid_argument("no strategies configured");
  if (config_.N_grid.empty()) throw std::invalid_argument("empty N grid");
  if (config_.R < 1) throw std::invalid_argument("R must be >= 1");

  basis_ = build_basis(config_.family, config_.d, config_.p);
  pool_size_ = config_.M > 0 ? config_.M : 10 * basis_.size();
  int const n_max = *std::max_element(config_.N_grid.begin(), config_.N_grid.end());
  if (pool_size_ < n_max)
    throw std::invalid_argument("pool size M=" + std::to_string(pool_size_) + " is below max N=" + std::to_string(n_max));
  if (config_.manufactured() && *std::min_element(config_.N_grid.begin(), config_.N_grid.end()) < config_.s)
    throw std::invalid_argument("every N must be >= s for the oracle solution");

  McmcParams mcmc;
  mcmc.burn_in = config_.mcmc_burn_in;
  reconstruction_.resize(2);
  for (auto s : config_.strategies) {
    auto const sampling = sampling_of(s);
    auto& slot = reconstruction_[static_cast<std::size_t>(sampling)];
    if (!slot)
      slot = sample_pool(basis_, sampling, 2 * pool_size_,
                         RngStream{config_.seed, 1 + static_cast<std::uint64_t>(sampling)}, mcmc);
  }

  if (model_) {
    auto const validation = sample_standard(basis_, config_.N_val, RngStream{config_.seed, 100});
    psi_val_ = basis_matrix(basis_, validation.points);
    u_val_.resize(config_.N_val);
    for (Eigen::Index i = 0; i < config_.N_val; ++i) u_val_(i) = evaluate(*model_, validation.points.row(i).transpose());
  }
}

RngStream Experiment::rep_stream(int n, int rep, std::optional<Strategy> owner) const {
  RngStream stream = RngStream{config_.seed, 1000}.substream(static_cast<std::uint64_t>(n)).substream(
      static_cast<std::uint64_t>(rep));
  if (owner) stream = stream.substream(100 + strategy_code(*owner));
  return stream;
}

Experiment::Repetition Experiment::prepare(SamplingStrategy sampling, int n, int rep,
                                           std::optional<Strategy> owner) const {
  Repetition ctx;
  ctx.stream = rep_stream(n, rep, owner);
  auto const& recon = *reconstruction_[static_cast<std::size_t>(sampling)];

  // M of the 2M reconstruction rows, without replacement.
  auto subset_engine = ctx.stream.substream(1).engine();
  IndexList rows(static_cast<std::size_t>(recon.size()));
  std::iota(rows.begin(), rows.end(), Eigen::Index{0});
  for (Eigen::Index i = 0; i < pool_size_; ++i) {
    std::uniform_int_distribution<Eigen::Index> pick(i, recon.size() - 1);
    std::swap(rows[static_cast<std::size_t>(i)], rows[static_cast<std::size_t>(pick(subset_engine))]);
  }
  rows.resize(static_cast<std::size_t>(pool_size_));
  ctx.pool_rows = rows;
  ctx.candidates = make_candidates(subsample(recon, rows));

  if (config_.manufactured()) {
    auto truth_engine = ctx.stream.substream(2).engine();
    auto noise_engine = ctx.stream.substream(3).engine();
    ctx.problem = manufacture(basis_, config_.s, config_.alpha, truth_engine);
    Eigen::MatrixXd const psi = basis_matrix(basis_, ctx.candidates.points);
    Eigen::VectorXd const v = noisy_rhs(*ctx.problem, psi, ctx.candidates.weights, noise_engine);
    ctx.tabulated_qoi = v.cwiseQuotient(ctx.candidates.weights);
    Eigen::VectorXd const oracle = oracle_solution(*ctx.problem, ctx.candidates.phi, v, n);
    ctx.oracle_err = (oracle - ctx.problem->truth).norm() / ctx.problem->truth.norm();
  }
  return ctx;
}

RepetitionRecord Experiment::solve(Strategy strategy, int n, int rep, Repetition const& ctx) const {
  QoiFunction qoi;
  if (config_.manufactured()) {
    qoi = [&ctx](Eigen::Index row, Eigen::VectorXd const&) { return ctx.tabulated_qoi(row); };
  } else {
    auto const model = *model_;
    qoi = [model](Eigen::Index, Eigen::VectorXd const& point) { return evaluate(model, point); };
  }
  Oracle oracle(qoi);
  auto engine = ctx.stream.substream(10 + strategy_code(strategy)).engine();
  CvParams const cv{config_.cv_repeats, config_.cv_grid};

  SparseSolution sol;
  auto const selection = selection_of(strategy);
  if (selection == Selection::Sequential) {
    sol = dsp_cv(ctx.candidates, n, oracle, cv, engine);
  } else {
    Design design;
    if (selection == Selection::DOptimal) {
      design = rrqr_select(ctx.candidates.phi, n);
    } else {
      IndexList rows(static_cast<std::size_t>(ctx.candidates.size()));
      std::iota(rows.begin(), rows.end(), Eigen::Index{0});
      std::shuffle(rows.begin(), rows.end(), engine);
      rows.resize(static_cast<std::size_t>(n));
      design.rows = rows;
    }
    Eigen::MatrixXd const phi = select_rows(ctx.candidates.phi, design.rows);
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) {
      auto const row = design.rows[static_cast<std::size_t>(i)];
      v(i) = ctx.candidates.weights(row) * oracle(row, ctx.candidates.points.row(row).transpose());
    }
    int const k = cross_validate_k(phi, v, cv, engine);
    sol = subspace_pursuit(k, phi, v);
    sol.n_model_evals = oracle.evaluations();
    sol.design = design.rows;
  }

  RepetitionRecord record;
  record.strategy = strategy;
  record.N = n;
  record.rep = rep;
  record.k_used = sol.k_used;
  record.n_model_evals = sol.n_model_evals;
  if (ctx.problem) {
    auto const& truth = ctx.problem->truth;
    record.rel_err = (sol.coeffs - truth).norm() / truth.norm();
    int hits = 0;
    for (Eigen::Index k = 0; k < truth.size(); ++k)
      if (truth(k) != 0.0 && sol.coeffs(k) != 0.0) ++hits;
    record.support_pct = 100.0 * hits / ctx.problem->sparsity;
    record.oracle_err = ctx.oracle_err;
  } else {
    record.rel_err = relative_validation_error(sol.coeffs, psi_val_, u_val_);
  }
  return record;
}

RepetitionRecord Experiment::run_strategy(Strategy strategy, int n, int rep) const {
  std::optional<Strategy> owner;
  if (!config_.share_pool) owner = strategy;
  return solve(strategy, n, rep, prepare(sampling_of(strategy), n, rep, owner));
}

std::vector<RepetitionRecord> Experiment::run_all() const {
  auto const n_strategies = config_.strategies.size();
  auto const n_cells = config_.N_grid.size() * static_cast<std::size_t>(config_.R);
  std::vector<RepetitionRecord> records(n_cells * n_strategies);

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t cell = next++; cell < n_cells; cell = next++) {
      int const n = config_.N_grid[cell / static_cast<std::size_t>(config_.R)];
      int const rep = static_cast<int>(cell % static_cast<std::size_t>(config_.R));
      Strategy current = config_.strategies.front();
      try {
        std::optional<Repetition> shared[2];
        for (std::size_t si = 0; si < n_strategies; ++si) {
          current = config_.strategies[si];
          auto const sampling = sampling_of(current);
          RepetitionRecord record;
          if (config_.share_pool) {
            auto& ctx = shared[static_cast<std::size_t>(sampling)];
            if (!ctx) ctx = prepare(sampling, n, rep, std::nullopt);
            record = solve(current, n, rep, *ctx);
          } else {
            record = run_strategy(current, n, rep);
          }
          records[cell * n_strategies + si] = record;
        }
      } catch (std::exception const& e) {
        std::lock_guard lock(failure_mutex);
        if (!failure)
          failure = std::make_exception_ptr(std::runtime_error(
              "repetition " + std::to_string(rep) + ", N=" + std::to_string(n) + ", strategy " +
              std::string(to_string(current)) + ": " + e.what()));
        next = n_cells;
      }
    }
  };

  unsigned threads = config_.threads > 0 ? static_cast<unsigned>(config_.threads)
                                         : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(n_cells));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  return records;
}

// ---------------------------------------------------------------------------
// Aggregation and output

ExperimentReport aggregate(std::vector<RepetitionRecord> const& records, ExperimentConfig const& config) {
  ExperimentReport report;
  std::vector<std::string> missing;
  for (auto strategy : config.strategies) {
    for (int n : config.N_grid) {
      std::vector<RepetitionRecord const*> cell;
      for (auto const& r : records)
        if (r.strategy == strategy && r.N == n) cell.push_back(&r);
      if (cell.empty()) {
        missing.push_back(std::string(to_string(strategy)) + "@N=" + std::to_string(n));
        continue;
      }
      ReportRow row;
      row.strategy = strategy;
      row.N = n;
      row.count = static_cast<int>(cell.size());
      auto mean_of = [&](auto field) {
        double sum = 0.0;
        for (auto const* r : cell) sum += field(*r);
        return sum / static_cast<double>(cell.size());
      };
      row.mean_rel_err = mean_of([](auto const& r) { return r.rel_err; });
      if (cell.size() > 1) {
        double ss = 0.0;
        for (auto const* r : cell) ss += (r->rel_err - row.mean_rel_err) * (r->rel_err - row.mean_rel_err);
        row.std_rel_err = std::sqrt(ss / static_cast<double>(cell.size() - 1));
      }
      row.support_pct = mean_of([](auto const& r) { return r.support_pct; });
      row.oracle_err = mean_of([](auto const& r) { return r.oracle_err; });
      report.rows.push_back(row);
    }
  }
  if (!missing.empty()) {
    std::string msg = "missing report cells:";
    for (auto const& m : missing) msg += " " + m;
    throw std::runtime_error(msg);
  }
  return report;
}

std::string report_csv(ExperimentReport const& report) {
  std::ostringstream out;
  out << "strategy,N,mean_rel_err,std_rel_err,support_pct,oracle_err\n";
  for (auto const& row : report.rows)
    out << to_string(row.strategy) << ',' << row.N << ',' << format_double(row.mean_rel_err) << ','
        << format_double(row.std_rel_err) << ',' << format_double(row.support_pct) << ','
        << format_double(row.oracle_err) << '\n';
  return out.str();
}

std::string record_json(RepetitionRecord const& r) {
  auto num = [](double x) { return std::isnan(x) ? std::string("null") : format_double(x); };
  std::ostringstream out;
  out << "{\"strategy\":\"" << to_string(r.strategy) << "\",\"N\":" << r.N << ",\"rep\":" << r.rep
      << ",\"rel_err\":" << num(r.rel_err) << ",\"k_used\":" << r.k_used << ",\"n_model_evals\":" << r.n_model_evals
      << ",\"support_pct\":" << num(r.support_pct) << ",\"oracle_err\":" << num(r.oracle_err) << "}";
  return out.str();
}

ExperimentReport run_experiment(ExperimentConfig const& config) {
  Experiment const experiment(config);
  auto const records = experiment.run_all();
  auto const report = aggregate(records, config);

  std::filesystem::path const dir(config.output_dir);
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "report.csv");
    out << report_csv(report);
  }
  {
    std::ofstream out(dir / "records.jsonl");
    for (auto const& r : records) out << record_json(r) << '\n';
  }
  {
    nlohmann::ordered_json manifest;
    manifest["config"] = nlohmann::ordered_json::parse(config_to_json(config));
    manifest["version"] = DSPCE_VERSION;
    manifest["basis_size"] = experiment.basis().size();
    manifest["pool_size"] = experiment.pool_size();
    manifest["reconstruction_pool_size"] = 2 * experiment.pool_size();
    manifest["seeds"] = {{"master", config.seed},
                         {"reconstruction_streams", {{"standard", 1}, {"coherence-optimal", 2}}},
                         {"validation_stream", 100},
                         {"repetition_stream_root", 1000}};
    manifest["records"] = records.size();
    std::ofstream out(dir / "manifest.json");
    out << manifest.dump(2) << '\n';
  }
  return report;
}

// ---------------------------------------------------------------------------
// Design-quality distribution

CdfStudy cdf_study(Family family, int d, int p, Eigen::Index n, Eigen::Index m, int n_designs, std::uint64_t seed,
                   int grid_points) {
  if (n > m) throw std::invalid_argument("design size exceeds pool size");
  if (n_designs < 1 || grid_points < 1) throw std::invalid_argument("invalid CDF study size");
  auto const spec = build_basis(family, d, p);

  CdfStudy study;
  for (int t = 0; t < n_designs; ++t) {
    for (auto sampling : {SamplingStrategy::StandardMC, SamplingStrategy::CoherenceOptimal}) {
      RngStream const stream = RngStream{seed, 2000 + static_cast<std::uint64_t>(sampling)}.substream(
          static_cast<std::uint64_t>(t));
      auto const pool = sample_pool(spec, sampling, m, stream);
      Eigen::MatrixXd const phi = candidate_matrix(pool);
      Design const design = subset_select(phi, n);
      double const value = phi_d_normalized(information_matrix(select_rows(phi, design.rows)));
      (sampling == SamplingStrategy::StandardMC ? study.standard : study.coherence_optimal).push_back(value);
    }
  }
  std::sort(study.standard.begin(), study.standard.end());
  std::sort(study.coherence_optimal.begin(), study.coherence_optimal.end());

  double const lo = std::min(study.standard.front(), study.coherence_optimal.front());
  double const hi = std::max(study.standard.back(), study.coherence_optimal.back());
  auto ecdf = [](std::vector<double> const& sorted, double x) {
    return static_cast<double>(std::upper_bound(sorted.begin(), sorted.end(), x) - sorted.begin()) /
           static_cast<double>(sorted.size());
  };
  int below = 0;
  bool strict = false;
  for (int g = 0; g < grid_points; ++g) {
    double const x = grid_points == 1 ? lo : lo + (hi - lo) * g / (grid_points - 1);
    study.grid.push_back(x);
    double const f_coh = ecdf(study.coherence_optimal, x), f_mc = ecdf(study.standard, x);
    if (f_coh <= f_mc) ++below;
    if (f_coh < f_mc) strict = true;
  }
  study.fraction_at_or_below = static_cast<double>(below) / grid_points;
  study.dominates = below == grid_points && strict;
  return study;
}

}  // namespace dspce
