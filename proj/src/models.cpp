#include "dspce/models.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace dspce {

ManufacturedProblem manufacture(BasisSpec const& spec, int sparsity, double alpha, Engine& engine) {
  if (sparsity < 0 || sparsity > spec.size())
    throw std::invalid_argument("sparsity " + std::to_string(sparsity) + " outside [0, " +
                                std::to_string(spec.size()) + "]");
  if (alpha < 0.0) throw std::invalid_argument("noise level must be non-negative");

  // Partial Fisher-Yates: the first `sparsity` entries are a uniform draw without replacement.
  std::vector<Eigen::Index> positions(static_cast<std::size_t>(spec.size()));
  std::iota(positions.begin(), positions.end(), Eigen::Index{0});
  for (int i = 0; i < sparsity; ++i) {
    std::uniform_int_distribution<Eigen::Index> pick(i, spec.size() - 1);
    std::swap(positions[static_cast<std::size_t>(i)], positions[static_cast<std::size_t>(pick(engine))]);
  }
  std::normal_distribution<double> normal;
  ManufacturedProblem problem;
  problem.truth = Eigen::VectorXd::Zero(spec.size());
  for (int i = 0; i < sparsity; ++i) {
    double value;
    do value = normal(engine);
    while (value == 0.0);
    problem.truth(positions[static_cast<std::size_t>(i)]) = value;
  }
  problem.sparsity = sparsity;
  problem.alpha = alpha;
  problem.basis = spec;
  return problem;
}

Eigen::VectorXd noisy_rhs(ManufacturedProblem const& problem, Eigen::Ref<const Eigen::MatrixXd> const& psi,
                          Eigen::Ref<const Eigen::VectorXd> const& weights, Engine& engine) {
  if (psi.cols() != problem.truth.size()) throw std::invalid_argument("basis rows do not match the problem size");
  if (weights.size() != psi.rows()) throw std::invalid_argument("weights length does not match the rows");
  Eigen::VectorXd const clean = psi * problem.truth;
  std::normal_distribution<double> normal;
  Eigen::VectorXd v(clean.size());
  for (Eigen::Index i = 0; i < clean.size(); ++i) {
    double const x = normal(engine);
    v(i) = weights(i) * (clean(i) + problem.alpha * std::abs(clean(i)) * x);
  }
  return v;
}

std::string_view to_string(PhysicalModel model) {
  switch (model) {
    case PhysicalModel::Duffing: return "duffing";
    case PhysicalModel::WingWeight: return "wingweight";
    case PhysicalModel::Ishigami: return "ishigami";
  }
  return "unknown";
}

PhysicalModel parse_model(std::string_view name) {
  if (name == "duffing") return PhysicalModel::Duffing;
  if (name == "wingweight" || name == "wing-weight" || name == "wing_weight") return PhysicalModel::WingWeight;
  if (name == "ishigami") return PhysicalModel::Ishigami;
  throw std::invalid_argument("unknown model: " + std::string(name));
}

int input_dim(PhysicalModel model) {
  return model == PhysicalModel::WingWeight ? 10 : 3;
}

double evaluate(PhysicalModel model, Eigen::Ref<const Eigen::VectorXd> const& xi) {
  switch (model) {
    case PhysicalModel::Duffing: return duffing_qoi(xi);
    case PhysicalModel::WingWeight: return wing_weight(xi);
    case PhysicalModel::Ishigami: return ishigami(xi);
  }
  throw std::invalid_argument("unknown model");
}

namespace {

void check_cube(Eigen::Ref<const Eigen::VectorXd> const& xi, Eigen::Index dim, char const* name) {
  if (xi.size() != dim)
    throw std::invalid_argument(std::string(name) + " expects " + std::to_string(dim) + " inputs");
  for (Eigen::Index j = 0; j < dim; ++j)
    if (!(std::abs(xi(j)) <= 1.0)) throw std::domain_error(std::string(name) + " input outside [-1,1]");
}

using State = std::array<double, 2>;

}  // namespace

double duffing_displacement(double omega1, double omega2, double omega3, double t_end, double tol) {
  auto rhs = [&](State const& y) -> State {
    return {y[1], -2.0 * omega1 * omega2 * y[1] - omega1 * omega1 * (y[0] + omega3 * y[0] * y[0] * y[0])};
  };

  // Dormand-Prince 5(4) tableau; the system is autonomous so the nodes c_i are unused.
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                   a65 = -5103.0 / 18656;
  constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                   e6 = 22.0 / 525, e7 = -1.0 / 40;

  State y{1.0, 0.0};
  double t = 0.0;
  double h = 1e-3;
  State k1 = rhs(y);
  while (t < t_end) {
    if (t + h > t_end) h = t_end - t;
    auto combine = [&](std::initializer_list<std::pair<double, State const*>> terms) {
      State out = y;
      for (auto const& [coef, k] : terms) {
        out[0] += h * coef * (*k)[0];
        out[1] += h * coef * (*k)[1];
      }
      return out;
    };
    State const k2 = rhs(combine({{a21, &k1}}));
    State const k3 = rhs(combine({{a31, &k1}, {a32, &k2}}));
    State const k4 = rhs(combine({{a41, &k1}, {a42, &k2}, {a43, &k3}}));
    State const k5 = rhs(combine({{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
    State const k6 = rhs(combine({{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
    State const next = combine({{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
    State const k7 = rhs(next);

    double err = 0.0;
    for (int c = 0; c < 2; ++c) {
      double const e = h * (e1 * k1[c] + e3 * k3[c] + e4 * k4[c] + e5 * k5[c] + e6 * k6[c] + e7 * k7[c]);
      double const scale = tol + tol * std::max(std::abs(y[c]), std::abs(next[c]));
      err = std::max(err, std::abs(e) / scale);
    }
    if (err <= 1.0) {
      t += h;
      y = next;
      k1 = k7;  // first-same-as-last
    }
    double const factor = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
    h *= factor;
    if (!(h > 1e-14)) throw std::runtime_error("Duffing integration step underflow");
  }
  return y[0];
}

double duffing_qoi(Eigen::Ref<const Eigen::VectorXd> const& xi) {
  check_cube(xi, 3, "duffing");
  double const omega1 = 2.0 * std::numbers::pi * (1.0 + 0.2 * xi(0));
  double const omega2 = 0.05 * (1.0 + 0.05 * xi(1));
  double const omega3 = -0.5 * (1.0 + 0.5 * xi(2));
  return duffing_displacement(omega1, omega2, omega3, 4.0);
}

double wing_weight(Eigen::Ref<const Eigen::VectorXd> const& xi) {
  check_cube(xi, 10, "wing_weight");
  static constexpr std::array<std::array<double, 2>, 10> ranges{{
      {150.0, 200.0},   // S_w, wing area (ft^2)
      {220.0, 300.0},   // W_fw, fuel weight in the wing (lb)
      {6.0, 10.0},      // A, aspect ratio
      {-10.0, 10.0},    // Lambda, quarter-chord sweep (deg)
      {16.0, 45.0},     // q, dynamic pressure at cruise (lb/ft^2)
      {0.5, 1.0},       // lambda, taper ratio
      {0.08, 0.18},     // t_c, thickness to chord ratio
      {2.5, 6.0},       // N_z, ultimate load factor
      {1700.0, 2500.0}, // W_dg, design gross weight (lb)
      {0.025, 0.08},    // W_p, paint weight (lb/ft^2)
  }};
  std::array<double, 10> x{};
  for (std::size_t j = 0; j < 10; ++j)
    x[j] = ranges[j][0] + (xi(static_cast<Eigen::Index>(j)) + 1.0) * (ranges[j][1] - ranges[j][0]) / 2.0;
  auto const [sw, wfw, a, sweep_deg, q, taper, tc, nz, wdg, wp] = x;
  double const cos_sweep = std::cos(sweep_deg * std::numbers::pi / 180.0);
  return 0.036 * std::pow(sw, 0.758) * std::pow(wfw, 0.0035) * std::pow(a / (cos_sweep * cos_sweep), 0.6) *
             std::pow(q, 0.006) * std::pow(taper, 0.04) * std::pow(100.0 * tc / cos_sweep, -0.3) *
             std::pow(nz * wdg, 0.49) +
         sw * wp;
}

double ishigami(Eigen::Ref<const Eigen::VectorXd> const& xi) {
  check_cube(xi, 3, "ishigami");
  constexpr double a = 7.0, b = 0.1;
  double const x1 = std::numbers::pi * xi(0), x2 = std::numbers::pi * xi(1), x3 = std::numbers::pi * xi(2);
  double const s2 = std::sin(x2);
  return std::sin(x1) + a * s2 * s2 + b * x3 * x3 * x3 * x3 * std::sin(x1);
}

}  // namespace dspce
