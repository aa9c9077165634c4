#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fracrot/fracpow.hpp"
#include "test_support.hpp"

using namespace fracrot;
using fracrot::testing::Gen;
using fracrot::testing::mat;
using fracrot::testing::max_abs_diff;

namespace {

constexpr double kPiD = std::numbers::pi;
const UnitAxis<double> kZ(0, 0, 1);
const Mat3d kQuarterZ = mat({0, -1, 0, 1, 0, 0, 0, 0, 1});

// Denman-Beavers iteration for the principal square root; shares nothing
// with the quadrature or eigendecomposition routes.
Mat3d denman_beavers_sqrt(const Mat3d& a) {
  Mat3d y = a, z = Mat3d::Identity();
  for (int k = 0; k < 60; ++k) {
    const Mat3d y_next = 0.5 * (y + z.inverse());
    const Mat3d z_next = 0.5 * (z + y.inverse());
    y = y_next;
    z = z_next;
  }
  return y;
}

// Positive definite by construction, so the principal root is unambiguous.
Mat3d random_spd(Gen& gen) {
  const Mat3d b = gen.matrix(1.0);
  return b * b.transpose() + 0.5 * Mat3d::Identity();
}

bool contains(const std::array<std::complex<double>, 3>& values, std::complex<double> z,
              double tol) {
  return std::any_of(values.begin(), values.end(),
                     [&](const auto& v) { return std::abs(v - z) < tol; });
}

}  // namespace

TEST_CASE("check_spectrum") {
  Gen gen(20);
  for (int i = 0; i < 5; ++i) {
    const auto s = check_spectrum(quarter_turn(gen.axis()).matrix());
    CHECK(s.admissible);
    CHECK(contains(s.eigenvalues, {1, 0}, 1e-12));
    CHECK(contains(s.eigenvalues, {0, 1}, 1e-12));
    CHECK(contains(s.eigenvalues, {0, -1}, 1e-12));
  }

  const auto neg = check_spectrum<double>(-Mat3d::Identity());
  CHECK_FALSE(neg.admissible);
  for (const auto& z : neg.eigenvalues) CHECK(std::abs(z + 1.0) < 1e-15);

  const auto diag = check_spectrum(mat({2, 0, 0, 0, 3, 0, 0, 0, 4}));
  CHECK(diag.admissible);
  CHECK(contains(diag.eigenvalues, {2, 0}, 1e-12));
  CHECK(contains(diag.eigenvalues, {4, 0}, 1e-12));

  // zero is excluded along with the negative ray
  CHECK_FALSE(check_spectrum(mat({1, 0, 0, 0, 2, 0, 0, 0, 0})).admissible);
  // half turn has eigenvalue -1 (double)
  CHECK_FALSE(check_spectrum(mat({-1, 0, 0, 0, -1, 0, 0, 0, 1})).admissible);

  SUBCASE("agrees with Eigen's eigensolver on random matrices") {
    for (int i = 0; i < 100; ++i) {
      const Mat3d m = gen.matrix(3.0);
      const auto s = check_spectrum(m);
      const Eigen::Matrix3d dense = m;
      const Eigen::Vector3cd ref = Eigen::EigenSolver<Eigen::Matrix3d>(dense, false).eigenvalues();
      for (int k = 0; k < 3; ++k) CHECK(contains(s.eigenvalues, ref(k), 1e-9));
    }
  }
}

TEST_CASE("balakrishnan_power") {
  const double h = std::sqrt(2.0) / 2;
  const Mat3d half = mat({h, -h, 0, h, h, 0, 0, 0, 1});
  CHECK((balakrishnan_power(kQuarterZ, 0.5) - half).norm() < 1e-10);
  CHECK((balakrishnan_power(kQuarterZ, 0.5) - frac_power_closed(kZ, 0.5).matrix()).norm() < 1e-10);

  const Mat3d two = 2 * Mat3d::Identity();
  CHECK(max_abs_diff(balakrishnan_power(two, 0.5), std::sqrt(2.0) * Mat3d::Identity()) < 1e-13);

  CHECK_THROWS_AS(balakrishnan_power(kQuarterZ, 1.5), DomainAlpha);
  CHECK_THROWS_AS(balakrishnan_power(kQuarterZ, 0.0), DomainAlpha);
  CHECK_THROWS_AS(balakrishnan_power(kQuarterZ, 1.0), DomainAlpha);
  CHECK_THROWS_AS(balakrishnan_power<double>(-Mat3d::Identity(), 0.5), InadmissibleSpectrum);
  CHECK_THROWS_AS(balakrishnan_power(mat({-1, 0, 0, 0, -1, 0, 0, 0, 1}), 0.5),
                  InadmissibleSpectrum);

  SUBCASE("coarse levels report non-convergence") {
    QuadratureConfig cfg;
    cfg.level = 2;
    CHECK_THROWS_AS(balakrishnan_power(kQuarterZ, 0.5, cfg), QuadratureNotConverged);
    cfg.abs_tolerance = 1.0;
    CHECK_NOTHROW(balakrishnan_power(kQuarterZ, 0.5, cfg));
  }

  SUBCASE("error estimate and node count are reported") {
    const auto r = balakrishnan_power_estimate(kQuarterZ, 0.3);
    CHECK(r.error_estimate < 1e-12);
    CHECK(r.nodes > 200);
    CHECK(r.nodes < 2000);
  }

  SUBCASE("square roots of SPD matrices match Denman-Beavers") {
    Gen gen(21);
    for (int i = 0; i < 20; ++i) {
      const Mat3d a = random_spd(gen);
      const Mat3d ref = denman_beavers_sqrt(a);
      CHECK((balakrishnan_power(a, 0.5) - ref).norm() < 1e-10 * ref.norm());
    }
  }

  SUBCASE("gauss-legendre-split rule") {
    QuadratureConfig cfg;
    cfg.method = QuadratureMethod::kGaussLegendreSplit;
    cfg.level = 64;
    // alpha = 1/2 turns both substitutions into polynomials in x
    CHECK((balakrishnan_power(kQuarterZ, 0.5, cfg) - half).norm() < 1e-13);
    cfg.abs_tolerance = 1e-6;
    CHECK((balakrishnan_power(kQuarterZ, 0.3, cfg) - frac_power_closed(kZ, 0.3).matrix()).norm() <
          1e-8);
  }

  SUBCASE("long double instantiation") {
    using Mat3l = Mat3<long double>;
    const Mat3l q = kQuarterZ.cast<long double>();
    const Mat3l r = balakrishnan_power(q, 0.5L);
    CHECK(static_cast<double>((r - half.cast<long double>()).norm()) < 1e-13);
  }
}

TEST_CASE("real_power") {
  Gen gen(22);
  const double c = -std::sqrt(2.0) / 2;
  // rotation by 5 pi / 4 about z
  const Mat3d five_eighths = mat({c, -c, 0, c, c, 0, 0, 0, 1});
  CHECK((real_power(kQuarterZ, 2.5) - five_eighths).norm() < 1e-9);
  CHECK((real_power(kQuarterZ, 2.5) - rodrigues(kZ, 5 * kPiD / 4).matrix()).norm() < 1e-9);

  const Mat3d m = random_spd(gen);
  CHECK(real_power(m, 3.0) == Mat3d(m * m * m));
  CHECK(real_power(m, 0.0) == Mat3d::Identity());
  CHECK(real_power(m, 1.0) == m);
  CHECK(max_abs_diff(real_power(m, -1.0), inverse3(m)) == 0.0);

  const Mat3d pos = real_power(kQuarterZ, 0.5);
  const Mat3d neg = real_power(kQuarterZ, -0.5);
  CHECK((pos * neg - Mat3d::Identity()).norm() < 1e-9);

  CHECK_THROWS_AS(real_power<double>(-Mat3d::Identity(), 2.0), InadmissibleSpectrum);
  CHECK_THROWS_AS(real_power(kQuarterZ, std::nan("")), DomainAlpha);
}

TEST_CASE("resolvent_quarter_turn") {
  CHECK(max_abs_diff(resolvent_quarter_turn(kZ, 1.0),
                     mat({0.5, 0.5, 0, -0.5, 0.5, 0, 0, 0, 0.5})) < 1e-16);
  CHECK(max_abs_diff(resolvent_quarter_turn(kZ, 1.0),
                     inverse3(Mat3d(Mat3d::Identity() + kQuarterZ))) < 1e-16);

  Gen gen(23);
  for (int i = 0; i < 10; ++i) {
    const auto axis = gen.axis();
    const Mat3d q = quarter_turn(axis).matrix();
    CHECK(max_abs_diff(resolvent_quarter_turn(axis, 0.0), Mat3d(q.transpose())) < 1e-15);
    for (double lambda : {0.0, 0.1, 1.0, 10.0, 1000.0}) {
      const Mat3d lhs = (lambda * Mat3d::Identity() + q) * resolvent_quarter_turn(axis, lambda);
      CHECK(max_abs_diff(lhs, Mat3d::Identity()) < 1e-12);
    }
  }
  CHECK_THROWS_AS(resolvent_quarter_turn(kZ, -0.5), std::invalid_argument);
}

TEST_CASE("eig_power_oracle") {
  CHECK(max_abs_diff(eig_power_oracle(mat({1, 0, 0, 0, 4, 0, 0, 0, 9}), 0.5),
                     mat({1, 0, 0, 0, 2, 0, 0, 0, 3})) < 1e-15);
  for (double alpha : {0.25, 0.5, 0.75}) {
    const auto r = eig_power_oracle_detailed(kQuarterZ, alpha);
    CHECK((r.value - rodrigues(kZ, alpha * kPiD / 2).matrix()).norm() < 1e-10);
    CHECK(r.imaginary_residue < 1e-10);
  }
  CHECK_THROWS_AS(eig_power_oracle<double>(-Mat3d::Identity(), 0.5), InadmissibleSpectrum);
  // Jordan block: eigenvectors collapse
  CHECK_THROWS_AS(eig_power_oracle(mat({1, 1, 0, 0, 1, 0, 0, 0, 2}), 0.5), DegenerateEigenbasis);
}

TEST_CASE("convergence_study") {
  const auto report = convergence_study(kQuarterZ, 0.5, {3, 4, 5, 6, 7, 8});
  REQUIRE(report.size() == 6);
  for (std::size_t i = 1; i < report.size(); ++i) CHECK(report[i].nodes > report[i - 1].nodes);
  CHECK(report.front().error > report.back().error);
  CHECK(report.back().error < 1e-10);

  const auto single = convergence_study(kQuarterZ, 0.5, {QuadratureConfig{}.level});
  REQUIRE(single.size() == 1);
  CHECK(single[0].error ==
        (balakrishnan_power(kQuarterZ, 0.5) - eig_power_oracle(kQuarterZ, 0.5)).norm());

  const auto identity = convergence_study<double>(Mat3d::Identity(), 0.5, {3, 4, 5, 6, 7, 8});
  for (const auto& row : identity) CHECK(row.error < 1e-14);

  CHECK_THROWS_AS(convergence_study(kQuarterZ, 0.5, {}), std::invalid_argument);
  CHECK_THROWS_AS(convergence_study(kQuarterZ, 0.5, {4, 3}), std::invalid_argument);
  CHECK_THROWS_AS(convergence_study(kQuarterZ, 0.5, {4, 4}), std::invalid_argument);
}
