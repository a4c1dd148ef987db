#include "dspce/design.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

using namespace dspce;

namespace {

Eigen::MatrixXd gaussian(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m(i) = g(rng);
  return m;
}

double design_phi_d(Eigen::MatrixXd const& candidate, IndexList const& rows) {
  return phi_d(information_matrix(select_rows(candidate, rows)));
}

double condition(Eigen::MatrixXd const& m) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  auto const& s = svd.singularValues();
  return s(0) / s(s.size() - 1);
}

}  // namespace

TEST_CASE("phi_d examples") {
  for (int k = 1; k <= 6; ++k) CHECK(phi_d(Eigen::MatrixXd::Identity(k, k)) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(phi_d(Eigen::MatrixXd(2.0 * Eigen::MatrixXd::Identity(3, 3))) == doctest::Approx(2.0).epsilon(1e-14));

  Eigen::MatrixXd const x = gaussian(9, 5, 1);
  Eigen::MatrixXd const gram = x.transpose() * x;
  double const direct = std::pow(gram.partialPivLu().determinant(), 1.0 / 5.0);
  CHECK(phi_d(gram) == doctest::Approx(direct).epsilon(1e-9));
  CHECK(phi_d(Eigen::MatrixXd(3.0 * gram)) == doctest::Approx(3.0 * phi_d(gram)).epsilon(1e-12));

  Eigen::MatrixXd singular = gram;
  singular.col(4) = singular.col(3);
  singular.row(4) = singular.row(3);
  CHECK(phi_d(singular) == 0.0);
  CHECK_THROWS_AS(phi_d(Eigen::MatrixXd(2, 3)), std::invalid_argument);

  auto const info = information_matrix(x);
  CHECK(info.n_rows == 9);
  CHECK(info.matrix.isApprox(gram / 9.0, 1e-14));
  CHECK((info.matrix - info.matrix.transpose()).norm() < 1e-10);
}

TEST_CASE("phi_d_normalized") {
  for (int p : {1, 4, 10}) {
    Eigen::MatrixXd const m = 7.5 * Eigen::MatrixXd::Identity(p, p);
    CHECK(phi_d_normalized(m) == doctest::Approx(1.0 / std::sqrt(static_cast<double>(p))).epsilon(1e-13));
  }
  Eigen::MatrixXd const x = gaussian(12, 4, 2);
  Eigen::MatrixXd const m = x.transpose() * x;
  CHECK(phi_d_normalized(m) == doctest::Approx(phi_d_normalized(Eigen::MatrixXd(10.0 * m))).epsilon(1e-12));
  Eigen::MatrixXd const scaled = m / m.norm();
  CHECK(phi_d_normalized(m) == doctest::Approx(std::pow(scaled.determinant(), 0.25)).epsilon(1e-10));
  CHECK_THROWS_AS(phi_d_normalized(Eigen::MatrixXd::Zero(3, 3)), std::invalid_argument);
}

TEST_CASE("rrqr_select on scaled identity rows picks descending scale") {
  Eigen::VectorXd scale(5);
  scale << 1.0, 4.0, 2.0, 5.0, 3.0;
  Eigen::MatrixXd const candidate = scale.asDiagonal();
  CHECK(rrqr_select(candidate, 5).rows == IndexList{3, 1, 4, 2, 0});
  CHECK(rrqr_select(candidate, 2).rows == IndexList{3, 1});
}

TEST_CASE("rrqr_select lands in the top quartile of exhaustive 3-of-8 designs") {
  int in_top_quartile = 0;
  constexpr int kTrials = 20;
  for (int t = 0; t < kTrials; ++t) {
    Eigen::MatrixXd const c = gaussian(8, 3, 100 + t);
    std::vector<double> all;
    for (int a = 0; a < 8; ++a)
      for (int b = a + 1; b < 8; ++b)
        for (int e = b + 1; e < 8; ++e) all.push_back(design_phi_d(c, {a, b, e}));
    CHECK(all.size() == 56);
    std::sort(all.begin(), all.end(), std::greater<>());
    double const chosen = design_phi_d(c, rrqr_select(c, 3).rows);
    if (chosen >= all[13] * (1 - 1e-12)) ++in_top_quartile;
  }
  MESSAGE(in_top_quartile << " of " << kTrials << " trials in the top quartile");
  CHECK(in_top_quartile >= kTrials * 9 / 10);
}

TEST_CASE("rrqr_select properties") {
  Eigen::MatrixXd c = gaussian(30, 6, 7);
  c.row(5) = c.row(2);
  c.row(9) = c.row(2);
  auto const d = rrqr_select(c, 30);
  CHECK(std::set<Eigen::Index>(d.rows.begin(), d.rows.end()).size() == 30);
  CHECK(rrqr_select(c, 12).rows == rrqr_select(c, 12).rows);
  CHECK_THROWS_AS(rrqr_select(c, 31), std::invalid_argument);
  CHECK_THROWS_AS(rrqr_select(c, 0), std::invalid_argument);

  Eigen::MatrixXd const wide = gaussian(40, 12, 8).transpose();  // 12 x 40, so 12 pivots fit one pass
  auto const qr = pivoted_qr_select(wide, 12);
  CHECK(qr.rank == 12);
  for (std::size_t k = 1; k < qr.r_diag.size(); ++k) CHECK(qr.r_diag[k] <= qr.r_diag[k - 1] * (1 + 1e-12));
  // Same pivots as Eigen's Householder QR with column pivoting (no ties at random data).
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> ref(wide);
  for (Eigen::Index k = 0; k < 12; ++k) CHECK(qr.pivots[static_cast<std::size_t>(k)] == ref.colsPermutation().indices()(k));
}

TEST_CASE("subset_select") {
  Eigen::MatrixXd const eye = Eigen::MatrixXd::Identity(6, 6);
  CHECK(subset_select(eye, 4).rows == IndexList{0, 1, 2, 3});

  int better = 0;
  for (int t = 0; t < 100; ++t) {
    Eigen::MatrixXd c = gaussian(60, 10, 500 + t);
    // Heavy-tailed row scales, as produced by unweighted Hermite rows.
    std::mt19937_64 rng(900 + t);
    std::exponential_distribution<double> e(1.0);
    for (Eigen::Index i = 0; i < c.rows(); ++i) c.row(i) *= std::exp(e(rng));
    double const k_subset = condition(select_rows(c, subset_select(c, 15).rows));
    double const k_rrqr = condition(select_rows(c, rrqr_select(c, 15).rows));
    if (k_subset <= k_rrqr) ++better;
  }
  MESSAGE("subset_select better conditioned in " << better << " of 100 trials");
  CHECK(better >= 50);

  Eigen::MatrixXd const square = gaussian(7, 7, 3);
  auto a = subset_select(square, 7).rows, b = rrqr_select(square, 7).rows;
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  CHECK(a == b);
}

TEST_CASE("augment picks the row outside the design's span") {
  Eigen::MatrixXd c(5, 3);
  c << 1, 0, 9,
       2, 0, 9,
       3, 0, 9,
       0, 1, 9,
       4, 0, 9;
  Design const d{{0}};
  auto const out = augment(d, c, {0, 1}, 1);
  CHECK(out.rows == IndexList{0, 3});
}

TEST_CASE("augment on a spanning design maximizes leverage, ties to the lowest index") {
  Eigen::MatrixXd c(6, 2);
  c << 1, 0,
       0, 1,
       1, 1,
       1, 1,
       3, 0,
       3, 0;
  Design const d{{0, 1}};
  // Leverage x^T x: row 2 and 3 give 2, rows 4 and 5 give 9.
  CHECK(augment(d, c, {0, 1}, 1).rows == IndexList{0, 1, 4});
  // After row 4 the Gram matrix is diag(10, 1): row 2 scores 1.1, row 5 only 0.9.
  CHECK(augment(d, c, {0, 1}, 3).rows == IndexList{0, 1, 4, 2, 5});

  Eigen::MatrixXd same = Eigen::MatrixXd::Ones(5, 1);
  CHECK(augment(Design{{2}}, same, {0}, 1).rows == IndexList{2, 0});
}

TEST_CASE("augment is append-only and never repeats a row") {
  std::mt19937_64 rng(77);
  for (int t = 0; t < 1000; ++t) {
    Eigen::MatrixXd const c = gaussian(20, 6, 10000 + t);
    std::uniform_int_distribution<int> size(1, 8), col(0, 5);
    Design d = rrqr_select(c, size(rng));
    std::set<Eigen::Index> support_set;
    int const k = std::uniform_int_distribution<int>(1, 4)(rng);
    while (static_cast<int>(support_set.size()) < k) support_set.insert(col(rng));
    IndexList const support(support_set.begin(), support_set.end());
    auto const out = augment(d, c, support, 3);
    REQUIRE(out.size() == d.size() + 3);
    CHECK(std::equal(d.rows.begin(), d.rows.end(), out.rows.begin()));
    CHECK(std::set<Eigen::Index>(out.rows.begin(), out.rows.end()).size() == out.rows.size());
  }
  Eigen::MatrixXd const c = gaussian(4, 2, 1);
  CHECK_THROWS_AS(augment(Design{{0, 1, 2}}, c, {0}, 2), std::invalid_argument);
  CHECK_THROWS_AS(augment(Design{{0}}, c, {}, 1), std::invalid_argument);
  CHECK_THROWS_AS(augment(Design{}, c, {0}, 1), std::invalid_argument);
}

TEST_CASE("det_ratio_check examples") {
  Eigen::MatrixXd a(2, 2);
  a << 2, 1, 0, 3;
  CHECK(det_ratio_check(a, Eigen::MatrixXd::Zero(2, 2), Eigen::MatrixXd::Zero(3, 2), 0, 1) == 0.0);

  Eigen::MatrixXd a1(1, 1), b1(1, 1), c1(1, 1);
  a1 << 2.0;
  b1 << 3.0;
  c1 << 4.0;
  CHECK(det_ratio_check(a1, b1, c1, 0, 0) == doctest::Approx(std::hypot(1.5, 2.0)).epsilon(1e-15));

  Eigen::MatrixXd sing = a;
  sing(1, 1) = 0.0;
  CHECK_THROWS_AS(det_ratio_check(sing, Eigen::MatrixXd::Ones(2, 2), Eigen::MatrixXd::Ones(1, 2), 0, 0),
                  std::invalid_argument);
}
