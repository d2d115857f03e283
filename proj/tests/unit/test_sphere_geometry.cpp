#include "doctest.h"
#include "oracles.hpp"

#include "qcs/errors.hpp"
#include "qcs/sphere.hpp"

using namespace qcs;

TEST_SUITE("sphere_geometry") {

TEST_CASE("sphere points are validated") {
  CHECK_THROWS_AS(SpherePoint(Eigen::VectorXd::Ones(8)), DomainError);
  CHECK_THROWS_AS(SpherePoint(Eigen::VectorXd::Ones(7).normalized()), std::invalid_argument);
  CHECK_THROWS_AS(SpherePoint::normalized(Eigen::VectorXd::Zero(8)), DomainError);
  const SpherePoint p = SpherePoint::normalized(Eigen::VectorXd::Ones(8));
  CHECK(p.x().norm() == doctest::Approx(1.0));
  CHECK(p.n() == 1);
  CHECK(SpherePoint::north(2).x()[8] == 1.0);
}

TEST_CASE("vertical fields are -i zeta, -j zeta, -k zeta") {
  std::mt19937_64 rng(2);
  const Eigen::VectorXd z = oracle::random_unit(rng, 8);
  const auto v = vertical_fields(z);
  const Quaternion units[3] = {Quaternion::i(), Quaternion::j(), Quaternion::k()};
  for (int a = 0; a < 3; ++a) {
    for (int l = 0; l < 2; ++l) {
      const Quaternion e = -(units[a] * quat_at(z, l));
      CHECK((quat_at(v[a], l) - e).norm() < 1e-15);
    }
    CHECK(v[a].dot(z) == doctest::Approx(0.0).epsilon(1e-14));
  }
}

TEST_CASE("tangent frame is orthonormal and splits vertical from horizontal") {
  std::mt19937_64 rng(4);
  for (int s = 0; s < 20; ++s) {
    const Eigen::VectorXd z = oracle::random_unit(rng, 12);
    const TangentFrame f = tangent_frame(z);
    CHECK(f.horizontal.cols() == 8);
    Eigen::MatrixXd all(12, 12);
    all.col(0) = z;
    all.rightCols(11) = f.all();
    CHECK((all.transpose() * all - Eigen::MatrixXd::Identity(12, 12)).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("vertical derivative formula matches the flow") {
  std::mt19937_64 rng(6);
  const SphereFunction f = [](const Eigen::VectorXd& x) {
    return x[0] * x[5] - 0.4 * x[2] * x[2] + x[7] * x[1] * x[3];
  };
  for (int s = 0; s < 10; ++s) {
    const Eigen::VectorXd z = oracle::random_unit(rng, 8);
    for (Axis a : {Axis::i, Axis::j, Axis::k})
      CHECK(std::abs(vertical_derivative(f, z, a) - vertical_flow_derivative(f, z, a)) < 1e-6);
  }
}

TEST_CASE("horizontal gradient is the tangential gradient minus vertical parts") {
  std::mt19937_64 rng(8);
  const SphereFunction f = [](const Eigen::VectorXd& x) { return x[0] * x[1] + x[6]; };
  const Eigen::VectorXd z = oracle::random_unit(rng, 8);
  const Eigen::VectorXd tg = tangential_gradient(f, z);
  const Eigen::VectorXd hg = horizontal_gradient(f, z);
  CHECK(std::abs(tg.dot(z)) < 1e-8);
  for (const auto& v : vertical_fields(z)) CHECK(std::abs(hg.dot(v)) < 1e-8);
  Eigen::VectorXd vert = tg - hg;
  double sq = 0.0;
  for (const auto& v : vertical_fields(z)) sq += std::pow(tg.dot(v), 2);
  CHECK(vert.squaredNorm() == doctest::Approx(sq).epsilon(1e-6));
}

TEST_CASE("laplacian eigenvalues -k(k+6) on S^7") {
  for (int k = 0; k <= 3; ++k) {
    Exponent e(8, 0);
    for (int v = 0; v < k; ++v) e[v] = 1;
    const EigenCheck c = laplacian_eigen_check(RealPolynomial::monomial(e), {100, 1, 64});
    CHECK(c.expected == -k * (k + 6.0));
    CHECK(std::abs(c.eigenvalue - c.expected) < 1e-6);
  }
  // x1^2 - x2^2 is harmonic of degree 2.
  RealPolynomial h = RealPolynomial::monomial({2, 0, 0, 0, 0, 0, 0, 0}) -
                     RealPolynomial::monomial({0, 2, 0, 0, 0, 0, 0, 0});
  CHECK(std::abs(laplacian_eigen_check(h, {100, 2, 64}).eigenvalue + 16.0) < 1e-6);
}

TEST_CASE("non-harmonic input is rejected") {
  CHECK_THROWS_AS(laplacian_eigen_check(RealPolynomial::monomial({2, 0, 0, 0, 0, 0, 0, 0}), {10, 1, 64}),
                  ValidationError);
}

}
