#include <limits>

#include "doctest.h"
#include "oracles.hpp"
#include "secbf/matcore.hpp"

using namespace secbf;
using namespace secbf::testing;

TEST_CASE("hermitian_eig: identity and diagonal") {
  const auto eye = hermitian_eig(CMat::Identity(3, 3));
  CHECK((eye.eigenvalues - RVec::Ones(3)).norm() < 1e-14);
  CHECK((eye.eigenvectors.adjoint() * eye.eigenvectors - CMat::Identity(3, 3)).norm() < 1e-12);

  RVec d(3);
  d << 3, 1, 2;
  const auto diag = hermitian_eig(CMat(d.cast<cd>().asDiagonal()));
  CHECK(diag.eigenvalues(0) == doctest::Approx(1.0));
  CHECK(diag.eigenvalues(1) == doctest::Approx(2.0));
  CHECK(diag.eigenvalues(2) == doctest::Approx(3.0));
  CHECK(std::abs(diag.eigenvectors(1, 0)) == doctest::Approx(1.0));
  CHECK(std::abs(diag.eigenvectors(2, 1)) == doctest::Approx(1.0));
  CHECK(std::abs(diag.eigenvectors(0, 2)) == doctest::Approx(1.0));
}

TEST_CASE("hermitian_eig: reconstruction and orthonormality on random inputs") {
  Rng rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const CMat a = random_hermitian(8, rng);
    const auto e = hermitian_eig(a);
    const CMat rebuilt = e.eigenvectors * e.eigenvalues.cast<cd>().asDiagonal() * e.eigenvectors.adjoint();
    CHECK((a - rebuilt).norm() <= 1e-10 * std::max(1.0, a.norm()));
    CHECK((e.eigenvectors.adjoint() * e.eigenvectors - CMat::Identity(8, 8)).norm() <= 1e-10);
    for (Eigen::Index i = 1; i < 8; ++i) CHECK(e.eigenvalues(i - 1) <= e.eigenvalues(i));
  }
}

TEST_CASE("hermitian_eig: errors") {
  CHECK_THROWS_AS(hermitian_eig(CMat::Zero(2, 3)), DimensionError);
  CMat bad = CMat::Identity(2, 2);
  bad(0, 1) = cd(std::numeric_limits<double>::quiet_NaN(), 0);
  CHECK_THROWS_AS(hermitian_eig(bad), DataError);
}

TEST_CASE("solve_hpd") {
  Rng rng(11);
  const CMat b = random_cmat(3, 2, rng);
  CHECK((solve_hpd(CMat::Identity(3, 3), b) - b).norm() < 1e-14);
  CHECK((solve_hpd(CMat(2.0 * CMat::Identity(3, 3)), CMat::Identity(3, 3)) - 0.5 * CMat::Identity(3, 3)).norm() <
        1e-14);
  for (int trial = 0; trial < 20; ++trial) {
    const CMat a = random_pd(6, rng);
    const CMat rhs = random_cmat(6, 3, rng);
    const CMat x = solve_hpd(a, rhs);
    const Eigen::JacobiSVD<CMat> svd(a);
    const double cond = svd.singularValues()(0) / svd.singularValues()(5);
    CHECK((a * x - rhs).norm() <= 1e-10 * rhs.norm() * std::max(1.0, cond * 1e-3));
  }
  CMat indefinite = CMat::Identity(2, 2);
  indefinite(1, 1) = -1;
  CHECK_THROWS_AS(solve_hpd(indefinite, b.topRows(2)), SingularityError);
}

TEST_CASE("logdet_hpd") {
  CHECK(logdet_hpd(CMat::Identity(4, 4)) == doctest::Approx(0.0));
  CMat d = CMat::Zero(2, 2);
  d(0, 0) = std::exp(1.0);
  d(1, 1) = std::exp(2.0);
  CHECK(logdet_hpd(d) == doctest::Approx(3.0).epsilon(1e-14));
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const CMat a = random_pd(5, rng);
    const double by_eig = hermitian_eig(a).eigenvalues.array().log().sum();
    CHECK(std::abs(logdet_hpd(a) - by_eig) <= 1e-10 * std::max(1.0, std::abs(by_eig)));
    // Agreement with solve_hpd: log det A = -log det A^{-1}.
    CHECK(std::abs(logdet_hpd(a) + logdet_hpd(hermitian_part(solve_hpd(a, CMat::Identity(5, 5))))) <= 1e-8);
  }
  CHECK_THROWS_AS(logdet_hpd(CMat::Zero(2, 2)), SingularityError);
}

TEST_CASE("min_rayleigh_vec: analytic cases") {
  const auto same = min_rayleigh_vec(CMat::Identity(3, 3), CMat::Identity(3, 3));
  CHECK(same.ratio == doctest::Approx(1.0));
  CHECK(same.vector.norm() == doctest::Approx(1.0));

  CMat a = CMat::Zero(2, 2);
  a(0, 0) = 1;
  a(1, 1) = 4;
  const auto diag = min_rayleigh_vec(a, CMat::Identity(2, 2));
  CHECK(diag.ratio == doctest::Approx(1.0));
  CHECK(std::abs(diag.vector(0)) == doctest::Approx(1.0));
  CHECK(std::abs(diag.vector(1)) < 1e-12);

  CHECK_THROWS_AS(min_rayleigh_vec(a, CMat::Zero(2, 2)), SingularityError);
}

TEST_CASE("min_rayleigh_vec: random pencils against random sampling") {
  Rng rng(5);
  for (int trial = 0; trial < 5; ++trial) {
    const CMat a = random_hermitian(3, rng);
    const CMat b = random_pd(3, rng);
    const auto res = min_rayleigh_vec(a, b);
    const CVec& u = res.vector;
    const double direct = std::real((u.adjoint() * a * u)(0, 0)) / std::real((u.adjoint() * b * u)(0, 0));
    CHECK(direct == doctest::Approx(res.ratio).epsilon(1e-10));
    double sampled = std::numeric_limits<double>::infinity();
    for (int s = 0; s < 100000; ++s) {
      const CVec x = random_cmat(3, 1, rng);
      sampled = std::min(sampled,
                         std::real((x.adjoint() * a * x)(0, 0)) / std::real((x.adjoint() * b * x)(0, 0)));
    }
    CHECK(res.ratio <= sampled + 1e-12);
    CHECK(sampled - res.ratio < 1e-2 * std::max(1.0, std::abs(res.ratio)));
  }
}

TEST_CASE("kernels instantiate at long double") {
  using LMat = Eigen::Matrix<std::complex<long double>, -1, -1>;
  LMat a = LMat::Identity(3, 3) * 2.0L;
  CHECK(static_cast<double>(logdet_hpd(a)) == doctest::Approx(3 * std::log(2.0)));
  CHECK(static_cast<double>(lambda_max(a)) == doctest::Approx(2.0));
}

TEST_CASE("numerical_rank and psd helpers") {
  Rng rng(21);
  const CMat x = random_psd_rank(5, 2, rng);
  CHECK(numerical_rank(x) == 2);
  const CMat f = psd_factor(x);
  CHECK((f * f.adjoint() - x).norm() < 1e-12 * x.norm());
  const CMat r = psd_sqrt(x);
  CHECK((r * r - x).norm() < 1e-10 * x.norm());
}
