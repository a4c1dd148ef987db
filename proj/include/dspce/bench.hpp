#pragma once

#include "dspce/basis.hpp"
#include "dspce/models.hpp"
#include "dspce/rng.hpp"
#include "dspce/sampling.hpp"
#include "dspce/solvers.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dspce {

/// Sampling + design strategies compared by the harness.
///   Coh-Opt / MC:             SP on N rows drawn uniformly from the candidates
///   D-Coh-Opt / D-MC:         SP on the N-point RRQR design
///   Seq-D-Coh-Opt / Seq-D-MC: DSP with cross-validated K and budget N
enum class Strategy { CohOpt, DCohOpt, SeqDCohOpt, MC, DMC, SeqDMC };

std::string_view to_string(Strategy strategy);
Strategy parse_strategy(std::string_view name);
SamplingStrategy sampling_of(Strategy strategy);

inline constexpr double kNotApplicable = std::numeric_limits<double>::quiet_NaN();

struct ExperimentConfig {
  std::string model = "manufactured";  // manufactured | duffing | wingweight | ishigami
  Family family = Family::Hermite;
  int d = 2;
  int p = 10;
  int s = 12;           // manufactured sparsity
  double alpha = 0.03;  // manufactured noise level
  std::vector<Strategy> strategies{Strategy::CohOpt, Strategy::DCohOpt, Strategy::SeqDCohOpt};
  std::vector<int> N_grid{40, 60, 80};
  int M = 0;  // candidate pool size; 0 means 10 P
  int R = 50;
  int N_val = 20000;
  std::uint64_t seed = 1;
  bool share_pool = true;  // strategies in one repetition see the same candidates and noise
  int threads = 0;         // 0 means hardware concurrency
  int cv_repeats = 4;
  int cv_grid = 10;
  int mcmc_burn_in = 1000;
  std::string output_dir = ".";

  bool manufactured() const { return model == "manufactured"; }
};

/// Reads a JSON object whose keys match the ExperimentConfig field names.
ExperimentConfig load_config(std::string const& path);
ExperimentConfig parse_config(std::string const& json_text);
std::string config_to_json(ExperimentConfig const& config);

struct RepetitionRecord {
  Strategy strategy = Strategy::CohOpt;
  int N = 0;
  int rep = 0;
  double rel_err = 0.0;
  int k_used = 0;
  int n_model_evals = 0;
  double support_pct = kNotApplicable;  // manufactured only
  double oracle_err = kNotApplicable;   // manufactured only
};

struct ReportRow {
  Strategy strategy = Strategy::CohOpt;
  int N = 0;
  int count = 0;
  double mean_rel_err = 0.0;
  double std_rel_err = kNotApplicable;  // undefined for a single record
  double support_pct = kNotApplicable;
  double oracle_err = kNotApplicable;
};

struct ExperimentReport {
  std::vector<ReportRow> rows;

  ReportRow const& at(Strategy strategy, int n) const;
};

/// ||psi_val c - u_val|| / ||u_val||.
double relative_validation_error(Eigen::Ref<const Eigen::VectorXd> const& coeffs,
                                 Eigen::Ref<const Eigen::MatrixXd> const& psi_val,
                                 Eigen::Ref<const Eigen::VectorXd> const& u_val);
double relative_validation_error(Eigen::Ref<const Eigen::VectorXd> const& coeffs, BasisSpec const& spec,
                                 Eigen::Ref<const Eigen::MatrixXd> const& points,
                                 Eigen::Ref<const Eigen::VectorXd> const& u_val);

/// Least squares on the exact support over an N-point RRQR design restricted to it.
Eigen::VectorXd oracle_solution(ManufacturedProblem const& problem, Eigen::Ref<const Eigen::MatrixXd> const& candidate,
                                Eigen::Ref<const Eigen::VectorXd> const& v, Eigen::Index n);

/// Fixed inputs of one experiment: basis, reconstruction pools (2M points per
/// sampling strategy) and validation data. Repetitions only read from it.
class Experiment {
 public:
  explicit Experiment(ExperimentConfig config);

  ExperimentConfig const& config() const { return config_; }
  BasisSpec const& basis() const { return basis_; }
  Eigen::Index pool_size() const { return pool_size_; }

  /// One repetition of one strategy at budget N. Deterministic in (strategy, N, rep).
  RepetitionRecord run_strategy(Strategy strategy, int n, int rep) const;

  /// Every (strategy, N, rep) cell, ordered by N, then rep, then strategy.
  std::vector<RepetitionRecord> run_all() const;

 private:
  struct Repetition;
  Repetition prepare(SamplingStrategy sampling, int n, int rep, std::optional<Strategy> owner) const;
  RepetitionRecord solve(Strategy strategy, int n, int rep, Repetition const& ctx) const;
  RngStream rep_stream(int n, int rep, std::optional<Strategy> owner) const;

  ExperimentConfig config_;
  BasisSpec basis_;
  Eigen::Index pool_size_ = 0;
  std::optional<PhysicalModel> model_;
  std::vector<std::optional<SamplePool>> reconstruction_;  // indexed by SamplingStrategy
  Eigen::MatrixXd psi_val_;
  Eigen::VectorXd u_val_;
};

/// Mean and sample standard deviation per (strategy, N). Throws if any cell is empty.
ExperimentReport aggregate(std::vector<RepetitionRecord> const& records, ExperimentConfig const& config);

std::string report_csv(ExperimentReport const& report);
std::string record_json(RepetitionRecord const& record);

/// Runs the experiment and writes report.csv, records.jsonl and manifest.json to config.output_dir.
ExperimentReport run_experiment(ExperimentConfig const& config);

struct CdfStudy {
  std::vector<double> standard;           // sorted phi_d_normalized samples, standard MC pools
  std::vector<double> coherence_optimal;  // sorted samples, coherence-optimal pools
  std::vector<double> grid;               // evaluation points for the dominance check
  double fraction_at_or_below = 0.0;      // share of grid where F_coh <= F_mc
  bool dominates = false;                 // F_coh <= F_mc on the whole grid, strictly somewhere
};

/// Empirical distribution of phi_d_normalized for N-point subset-selected designs
/// drawn from fresh M-point pools of each sampling strategy.
CdfStudy cdf_study(Family family, int d, int p, Eigen::Index n, Eigen::Index m, int n_designs,
                   std::uint64_t seed, int grid_points = 50);

}  // namespace dspce
