// Command-line front end: sample, design, solve, model eval, bench, cdf-study.

#include "dspce/basis.hpp"
#include "dspce/bench.hpp"
#include "dspce/design.hpp"
#include "dspce/io.hpp"
#include "dspce/models.hpp"
#include "dspce/sampling.hpp"
#include "dspce/solvers.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace dspce;

std::ofstream open_out(std::string const& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  return out;
}

// Basis for a pool file whose columns are d coordinates plus a weight.
BasisSpec pool_basis(PoolTable const& table, std::string const& family, int p) {
  return build_basis(parse_family(family), static_cast<int>(table.points.cols()), p);
}

Eigen::VectorXd parse_point(std::string const& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) values.push_back(std::stod(cell));
  return Eigen::Map<Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

struct SampleArgs {
  std::string family = "hermite";
  int d = 2, p = 10;
  Eigen::Index m = 0;
  std::string strategy = "coherence-optimal";
  std::uint64_t seed = 1;
  std::string out;
};

struct DesignArgs {
  std::string pool, method = "rrqr", family = "hermite", out;
  int p = 10;
  Eigen::Index n = 0;
};

struct SolveArgs {
  std::string pool, model, method = "dsp-cv", k = "auto", family = "legendre", selection = "rrqr", out;
  int p = 5;
  Eigen::Index n = 0;
  std::uint64_t seed = 1;
};

struct EvalArgs {
  std::string model, point, points_csv;
};

struct CdfArgs {
  std::string family = "hermite", out_dir = ".";
  int d = 2, p = 10, n_designs = 100, grid = 50;
  Eigen::Index n = 60, m = 240;
  std::uint64_t seed = 1;
};

void run_sample(SampleArgs const& a) {
  auto const spec = build_basis(parse_family(a.family), a.d, a.p);
  auto const pool = sample_pool(spec, parse_sampling(a.strategy), a.m, RngStream{a.seed, 0});
  if (a.out.empty()) {
    write_pool_csv(std::cout, pool);
  } else {
    write_pool_csv(a.out, pool);
  }
}

void run_design(DesignArgs const& a) {
  auto const table = read_pool_csv(a.pool);
  auto const spec = pool_basis(table, a.family, a.p);
  Eigen::MatrixXd const phi = assemble_matrix(spec, table.points, table.weights);
  Design design;
  if (a.method == "rrqr") {
    design = rrqr_select(phi, a.n);
  } else if (a.method == "subset") {
    design = subset_select(phi, a.n);
  } else {
    throw std::invalid_argument("unknown design method: " + a.method);
  }
  if (a.out.empty()) {
    write_design_csv(std::cout, design);
  } else {
    auto out = open_out(a.out);
    write_design_csv(out, design);
  }
}

void run_solve(SolveArgs const& a) {
  auto const table = read_pool_csv(a.pool);
  auto const model = parse_model(a.model);
  auto const spec = pool_basis(table, a.family, a.p);
  CandidateSet const candidates{assemble_matrix(spec, table.points, table.weights), table.points, table.weights};
  Oracle oracle([model](Eigen::Index, Eigen::VectorXd const& x) { return evaluate(model, x); });
  auto engine = RngStream{a.seed, 0}.engine();
  CvParams const cv;

  bool const auto_k = a.k == "auto";
  int const k = auto_k ? 0 : std::stoi(a.k);
  SparseSolution sol;
  if (a.method == "dsp") {
    if (auto_k) throw std::invalid_argument("dsp needs an integer --K; use dsp-cv for automatic K");
    sol = dsp(k, candidates, a.n, oracle);
  } else if (a.method == "dsp-cv") {
    sol = dsp_cv(candidates, a.n, oracle, cv, engine);
  } else if (a.method == "sp") {
    Design design;
    if (a.selection == "rrqr") {
      design = rrqr_select(candidates.phi, a.n);
    } else if (a.selection == "random") {
      IndexList rows(static_cast<std::size_t>(candidates.size()));
      std::iota(rows.begin(), rows.end(), Eigen::Index{0});
      std::shuffle(rows.begin(), rows.end(), engine);
      if (a.n > candidates.size()) throw std::invalid_argument("N exceeds the pool size");
      rows.resize(static_cast<std::size_t>(a.n));
      design.rows = rows;
    } else {
      throw std::invalid_argument("unknown selection: " + a.selection);
    }
    Eigen::MatrixXd const phi = select_rows(candidates.phi, design.rows);
    Eigen::VectorXd v(a.n);
    for (Eigen::Index i = 0; i < a.n; ++i) {
      auto const row = design.rows[static_cast<std::size_t>(i)];
      v(i) = candidates.weights(row) * oracle(row, candidates.points.row(row).transpose());
    }
    sol = subspace_pursuit(auto_k ? cross_validate_k(phi, v, cv, engine) : k, phi, v);
    sol.n_model_evals = oracle.evaluations();
    sol.design = design.rows;
  } else {
    throw std::invalid_argument("unknown solve method: " + a.method);
  }
  if (a.out.empty()) {
    std::cout << solution_json(sol) << '\n';
  } else {
    open_out(a.out) << solution_json(sol) << '\n';
  }
}

void run_eval(EvalArgs const& a) {
  auto const model = parse_model(a.model);
  if (!a.point.empty()) std::cout << format_double(evaluate(model, parse_point(a.point))) << '\n';
  if (!a.points_csv.empty()) {
    std::ifstream in(a.points_csv);
    if (!in) throw std::runtime_error("cannot open " + a.points_csv);
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#') continue;
      std::cout << format_double(evaluate(model, parse_point(line))) << '\n';
    }
  }
}

void run_cdf(CdfArgs const& a) {
  auto const study = cdf_study(parse_family(a.family), a.d, a.p, a.n, a.m, a.n_designs, a.seed, a.grid);
  std::filesystem::create_directories(a.out_dir);
  auto dump = [&](SamplingStrategy s, std::vector<double> const& values) {
    auto out = open_out((std::filesystem::path(a.out_dir) / ("cdf_" + std::string(to_string(s)) + ".csv")).string());
    out << "phi_d_normalized,cdf\n";
    for (std::size_t i = 0; i < values.size(); ++i)
      out << format_double(values[i]) << ',' << format_double(static_cast<double>(i + 1) / values.size()) << '\n';
  };
  dump(SamplingStrategy::StandardMC, study.standard);
  dump(SamplingStrategy::CoherenceOptimal, study.coherence_optimal);
  std::cout << "fraction_at_or_below=" << format_double(study.fraction_at_or_below)
            << " dominates=" << (study.dominates ? "true" : "false") << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse polynomial chaos with D-optimal designs"};
  app.set_version_flag("--version", std::string(DSPCE_VERSION));
  app.require_subcommand(1);

  SampleArgs sample;
  auto* cmd_sample = app.add_subcommand("sample", "Draw a candidate pool");
  cmd_sample->add_option("--family", sample.family, "legendre | hermite")->capture_default_str();
  cmd_sample->add_option("--d", sample.d, "Input dimension")->required();
  cmd_sample->add_option("--p", sample.p, "Total order")->required();
  cmd_sample->add_option("--M", sample.m, "Pool size")->required();
  cmd_sample->add_option("--strategy", sample.strategy, "standard | coherence-optimal")->capture_default_str();
  cmd_sample->add_option("--seed", sample.seed)->capture_default_str();
  cmd_sample->add_option("--out", sample.out, "Output CSV (stdout if omitted)");

  DesignArgs design;
  auto* cmd_design = app.add_subcommand("design", "Select D-optimal rows from a pool");
  cmd_design->add_option("--pool", design.pool)->required();
  cmd_design->add_option("--N", design.n, "Design size")->required();
  cmd_design->add_option("--method", design.method, "rrqr | subset")->capture_default_str();
  cmd_design->add_option("--family", design.family)->capture_default_str();
  cmd_design->add_option("--p", design.p)->capture_default_str();
  cmd_design->add_option("--out", design.out);

  SolveArgs solve;
  auto* cmd_solve = app.add_subcommand("solve", "Build a sparse surrogate of a model");
  cmd_solve->add_option("--pool", solve.pool)->required();
  cmd_solve->add_option("--model", solve.model, "duffing | wingweight | ishigami")->required();
  cmd_solve->add_option("--method", solve.method, "sp | dsp | dsp-cv")->capture_default_str();
  cmd_solve->add_option("--K", solve.k, "Sparsity level or 'auto'")->capture_default_str();
  cmd_solve->add_option("--N", solve.n, "Evaluation budget")->required();
  cmd_solve->add_option("--seed", solve.seed)->capture_default_str();
  cmd_solve->add_option("--family", solve.family)->capture_default_str();
  cmd_solve->add_option("--p", solve.p)->capture_default_str();
  cmd_solve->add_option("--selection", solve.selection, "sp rows: rrqr | random")->capture_default_str();
  cmd_solve->add_option("--out", solve.out);

  EvalArgs eval;
  auto* cmd_model = app.add_subcommand("model", "Benchmark models");
  cmd_model->require_subcommand(1);
  auto* cmd_eval = cmd_model->add_subcommand("eval", "Evaluate a model");
  cmd_eval->add_option("--model", eval.model)->required();
  auto* opt_point = cmd_eval->add_option("--point", eval.point, "Comma-separated point in [-1,1]^d");
  auto* opt_points = cmd_eval->add_option("--points", eval.points_csv, "CSV of points, one per line");
  opt_point->excludes(opt_points);
  cmd_eval->callback([&] {
    if (eval.point.empty() && eval.points_csv.empty()) throw CLI::RequiredError("--point or --points");
  });

  std::string config_path;
  auto* cmd_bench = app.add_subcommand("bench", "Run a benchmark experiment");
  cmd_bench->add_option("--config", config_path, "JSON config")->required()->check(CLI::ExistingFile);

  CdfArgs cdf;
  auto* cmd_cdf = app.add_subcommand("cdf-study", "Design-quality distribution per sampling strategy");
  cmd_cdf->add_option("--family", cdf.family)->capture_default_str();
  cmd_cdf->add_option("--d", cdf.d)->capture_default_str();
  cmd_cdf->add_option("--p", cdf.p)->capture_default_str();
  cmd_cdf->add_option("--N", cdf.n)->capture_default_str();
  cmd_cdf->add_option("--M", cdf.m)->capture_default_str();
  cmd_cdf->add_option("--n-designs", cdf.n_designs)->capture_default_str();
  cmd_cdf->add_option("--grid", cdf.grid, "Grid points for the dominance check")->capture_default_str();
  cmd_cdf->add_option("--seed", cdf.seed)->capture_default_str();
  cmd_cdf->add_option("--out-dir", cdf.out_dir)->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*cmd_sample) run_sample(sample);
    else if (*cmd_design) run_design(design);
    else if (*cmd_solve) run_solve(solve);
    else if (*cmd_model) run_eval(eval);
    else if (*cmd_bench) {
      auto const report = run_experiment(load_config(config_path));
      std::cout << report_csv(report);
    } else if (*cmd_cdf) run_cdf(cdf);
  } catch (std::exception const& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
