#include "dspce/models.hpp"

#include "reference_oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace dspce;

TEST_CASE("manufactured truth") {
  auto const spec = build_basis(Family::Hermite, 2, 5);
  Engine engine(1);
  auto const dense = manufacture(spec, static_cast<int>(spec.size()), 0.03, engine);
  CHECK((dense.truth.array() != 0.0).count() == spec.size());

  std::vector<int> hits(static_cast<std::size_t>(spec.size()), 0);
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    auto e = RngStream{seed, 7}.engine();
    auto const problem = manufacture(spec, 4, 0.0, e);
    CHECK((problem.truth.array() != 0.0).count() == 4);
    for (Eigen::Index k = 0; k < spec.size(); ++k)
      if (problem.truth(k) != 0.0) hits[static_cast<std::size_t>(k)]++;
  }
  // Each of 21 positions is chosen with probability 4/21, i.e. about 190 of 1000 times.
  for (int h : hits) CHECK(std::abs(h - 190.5) < 5 * std::sqrt(1000 * (4.0 / 21) * (17.0 / 21)));

  auto e1 = RngStream{5, 0}.engine(), e2 = RngStream{5, 0}.engine();
  CHECK(manufacture(spec, 6, 0.1, e1).truth == manufacture(spec, 6, 0.1, e2).truth);

  CHECK_THROWS_AS(manufacture(spec, 22, 0.0, engine), std::invalid_argument);
  CHECK(manufacture(build_basis(Family::Hermite, 2, 20), 60, 0.03, engine).truth.size() == 231);
}

TEST_CASE("noisy right-hand sides") {
  auto const spec = build_basis(Family::Hermite, 2, 3);
  Engine engine(3);
  auto const problem = manufacture(spec, 4, 0.0, engine);
  std::normal_distribution<double> g;
  Eigen::MatrixXd psi(50, spec.size());
  for (Eigen::Index i = 0; i < psi.rows(); ++i) {
    Eigen::Vector2d const x(g(engine), g(engine));
    psi.row(i) = eval_basis(spec, x).transpose();
  }
  Eigen::VectorXd const w = Eigen::VectorXd::LinSpaced(50, 0.5, 2.0);
  CHECK(noisy_rhs(problem, psi, w, engine) == w.asDiagonal() * (psi * problem.truth));

  ManufacturedProblem zero = problem;
  zero.truth.setZero();
  zero.alpha = 0.3;
  CHECK(noisy_rhs(zero, psi, w, engine).isZero(0.0));

  // Moment check: (v/w - psi c) / |psi c| = alpha x has variance alpha^2.
  ManufacturedProblem noisy = problem;
  noisy.alpha = 0.03;
  constexpr int kDraws = 100000;
  Eigen::MatrixXd big(kDraws, spec.size());
  for (Eigen::Index i = 0; i < kDraws; ++i) big.row(i) = psi.row(i % 50);
  Eigen::VectorXd const ones = Eigen::VectorXd::Ones(kDraws);
  Eigen::VectorXd const v = noisy_rhs(noisy, big, ones, engine);
  Eigen::VectorXd const clean = big * noisy.truth;
  Eigen::ArrayXd const z = (v - clean).array() / clean.array().abs();
  double const var = (z - z.mean()).square().sum() / (kDraws - 1);
  double const se = 0.03 * 0.03 * std::sqrt(2.0 / kDraws);
  CHECK(std::abs(var - 0.03 * 0.03) < 3 * se);

  CHECK_THROWS_AS(noisy_rhs(problem, psi, Eigen::VectorXd::Ones(49), engine), std::invalid_argument);
}

TEST_CASE("ishigami") {
  CHECK(ishigami(Eigen::Vector3d(0.5, 0.0, 0.0)) == 1.0);
  CHECK(ishigami(Eigen::Vector3d(0.0, 0.5, 0.3)) == doctest::Approx(7.0).epsilon(1e-15));
  CHECK(ishigami(Eigen::Vector3d(0.0, -0.5, -0.8)) == doctest::Approx(7.0).epsilon(1e-15));
  CHECK(std::abs(ishigami(Eigen::Vector3d(0.5, 0.5, 1.0)) - 17.740909103400244) < 1e-12);

  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int t = 0; t < 100; ++t) {
    Eigen::Vector3d const x(u(rng), u(rng), u(rng));
    Eigen::Vector3d mirrored = x;
    mirrored(0) = -x(0);
    double const s2 = std::sin(std::numbers::pi * x(1));
    CHECK(ishigami(x) + ishigami(mirrored) == doctest::Approx(14.0 * s2 * s2).epsilon(1e-12).scale(1.0));
    CHECK(ishigami(x) == ishigami(x));
  }
  CHECK_THROWS_AS(ishigami(Eigen::Vector3d(1.01, 0.0, 0.0)), std::domain_error);
  CHECK_THROWS_AS(ishigami(Eigen::Vector2d(0.0, 0.0)), std::invalid_argument);
}

TEST_CASE("wing weight") {
  // Reference values computed with 30-digit arithmetic at the range midpoints and lower bounds.
  double const mid = wing_weight(Eigen::VectorXd::Zero(10));
  CHECK(std::abs(mid / 267.624692570435684965867484925 - 1.0) < 1e-12);
  CHECK(std::abs(mid / ref::wing_weight_direct(175, 260, 8, 0, 30.5, 0.75, 0.13, 4.25, 2100, 0.0525) - 1.0) < 1e-12);
  double const low = wing_weight(Eigen::VectorXd::Constant(10, -1.0));
  CHECK(std::abs(low / 158.282450458648292698383347723 - 1.0) < 1e-12);

  Eigen::VectorXd x = Eigen::VectorXd::Constant(10, 0.2);
  double previous = -1.0;
  for (double nz : {-1.0, -0.5, 0.0, 0.5, 1.0}) {
    x(7) = nz;
    double const value = wing_weight(x);
    CHECK(value > previous);
    previous = value;
  }
  x(3) = -1.5;
  CHECK_THROWS_AS(wing_weight(x), std::domain_error);
}

TEST_CASE("duffing") {
  CHECK(duffing_displacement(2.0 * std::numbers::pi, 0.05, -0.5, 0.0) == 1.0);

  double const omega1 = 2.0 * std::numbers::pi, omega2 = 0.05, omega3 = -0.5;
  double const reference = ref::duffing_step_halving(omega1, omega2, omega3, 4.0);
  CHECK(std::abs(duffing_qoi(Eigen::Vector3d::Zero()) - reference) < 1e-8);

  for (double t : {0.7, 2.0, 4.0}) {
    double const exact = ref::damped_linear(omega1, omega2, t);
    CHECK(std::abs(duffing_displacement(omega1, omega2, 0.0, t) - exact) < 1e-7);
  }

  // Tightening the tolerance moves the answer toward the reference.
  double const loose = std::abs(duffing_displacement(omega1, omega2, omega3, 4.0, 1e-5) - reference);
  double const tight = std::abs(duffing_displacement(omega1, omega2, omega3, 4.0, 1e-10) - reference);
  CHECK(tight < loose);

  Eigen::Vector3d const x(0.3, -0.9, 0.6);
  CHECK(duffing_qoi(x) == duffing_qoi(x));
  CHECK_THROWS_AS(duffing_qoi(Eigen::Vector3d(0.0, 2.0, 0.0)), std::domain_error);
}

TEST_CASE("physical model registry") {
  CHECK(input_dim(PhysicalModel::Duffing) == 3);
  CHECK(input_dim(PhysicalModel::WingWeight) == 10);
  CHECK(input_dim(PhysicalModel::Ishigami) == 3);
  for (auto m : {PhysicalModel::Duffing, PhysicalModel::WingWeight, PhysicalModel::Ishigami})
    CHECK(parse_model(to_string(m)) == m);
  CHECK(evaluate(PhysicalModel::Ishigami, Eigen::Vector3d(0.5, 0.0, 0.0)) == 1.0);
  CHECK_THROWS_AS(parse_model("borehole"), std::invalid_argument);
}
