#include "doctest.h"
#include "oracles.hpp"

#include "qcs/conformal.hpp"
#include "qcs/errors.hpp"
#include "qcs/quadrature.hpp"

using namespace qcs;

namespace {

GroupPoint random_group(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> g;
  QVector q(n);
  for (int i = 0; i < 4 * n; ++i) q.coords()[i] = g(rng);
  return GroupPoint(q, Quaternion{0.0, g(rng), g(rng), g(rng)});
}

double group_dist(const GroupPoint& a, const GroupPoint& b) {
  return (a.q().coords() - b.q().coords()).norm() + (a.omega() - b.omega()).norm();
}

}  // namespace

TEST_SUITE("conformal_maps") {

TEST_CASE("cayley lands on the sphere and inverts") {
  std::mt19937_64 rng(1);
  for (int n : {1, 2}) {
    for (int s = 0; s < 500; ++s) {
      const GroupPoint g = random_group(rng, n);
      const SpherePoint z = cayley(g);
      CHECK(z.x().norm() == doctest::Approx(1.0).epsilon(1e-14));
      CHECK(group_dist(cayley_inv(z), g) < 1e-10);
    }
  }
  // Origin goes to N.
  const SpherePoint o = cayley(GroupPoint(QVector(1), Quaternion{}));
  CHECK((o.x() - SpherePoint::north(1).x()).norm() < 1e-15);
}

TEST_CASE("cayley inverse rejects the pole and real omega") {
  Eigen::VectorXd s = Eigen::VectorXd::Zero(8);
  s[4] = -1.0;
  CHECK_THROWS_AS(cayley_inv(SpherePoint(s)), PoleError);
  CHECK_THROWS_AS(GroupPoint(QVector(1), Quaternion{1.0, 0, 0, 0}), DomainError);
  CHECK_THROWS_AS(dilate(0.0, GroupPoint(QVector(1), Quaternion{})), ValidationError);
}

TEST_CASE("gamma_north matches the closed-form oracle and the conjugated dilation") {
  std::mt19937_64 rng(2);
  for (int s = 0; s < 200; ++s) {
    const Eigen::VectorXd z = oracle::random_unit(rng, 8);
    const double lambda = 0.1 + 0.02 * s;
    CHECK((gamma_north(lambda, z) - oracle::gamma_north(lambda, z)).norm() < 1e-12);
    if (z[4] > -0.9) {
      const SpherePoint viaGroup = cayley(dilate(lambda, cayley_inv(SpherePoint(z))));
      CHECK((gamma_north(lambda, z) - viaGroup.x()).norm() < 1e-10);
    }
  }
}

TEST_CASE("rotations to the north pole lie in Sp(n+1)") {
  std::mt19937_64 rng(3);
  for (int s = 0; s < 20; ++s) {
    const SpherePoint xi(oracle::random_unit(rng, 12));
    const Rotation a = rotation_to_north(xi);
    CHECK((a.apply(xi.x()) - SpherePoint::north(2).x()).norm() < 1e-12);
    const Eigen::VectorXd u = oracle::random_unit(rng, 12), v = oracle::random_unit(rng, 12);
    CHECK((hermitian(a.apply(u), a.apply(v)) - hermitian(u, v)).norm() < 1e-12);
  }
  CHECK((rotation_to_north(SpherePoint::north(1)).matrix() - Eigen::MatrixXd::Identity(8, 8)).norm() <
        1e-15);
  const Rotation b = north_stabilizer(2, 5);
  CHECK((b.apply(SpherePoint::north(2).x()) - SpherePoint::north(2).x()).norm() < 1e-14);
}

TEST_CASE("dilation group law, fixed points and inverse") {
  std::mt19937_64 rng(4);
  for (int s = 0; s < 50; ++s) {
    const SpherePoint xi(oracle::random_unit(rng, 8));
    const Eigen::VectorXd z = oracle::random_unit(rng, 8);
    const auto a = Automorphism::dilation(0.5, xi);
    const auto b = Automorphism::dilation(0.25, xi);
    CHECK((a.apply(b.apply(z)) - Automorphism::dilation(0.125, xi).apply(z)).norm() < 1e-10);
    CHECK((a.apply(xi.x()) - xi.x()).norm() < 1e-10);
    CHECK((a.apply(-xi.x()) + xi.x()).norm() < 1e-10);
    CHECK((a.inverse().apply(a.apply(z)) - z).norm() < 1e-10);
    CHECK(a.apply(z).norm() == doctest::Approx(1.0).epsilon(1e-13));
  }
  CHECK_THROWS_AS(Automorphism::dilation(-1.0, SpherePoint::north(1)), ValidationError);
}

TEST_CASE("composition and serialization") {
  std::mt19937_64 rng(5);
  const SpherePoint xi(oracle::random_unit(rng, 8));
  const auto a = Automorphism::dilation(0.3, xi);
  const auto r = Automorphism::rotation(rotation_to_north(xi));
  const auto c = Automorphism::compose(r, a);
  const Eigen::VectorXd z = oracle::random_unit(rng, 8);
  CHECK((c.apply(z) - r.apply(a.apply(z))).norm() < 1e-14);
  CHECK((c.inverse().apply(c.apply(z)) - z).norm() < 1e-10);
  const auto back = Automorphism::from_json(c.to_json());
  CHECK((back.apply(z) - c.apply(z)).norm() < 1e-14);
  CHECK(Automorphism::identity(1).is_identity());
  CHECK(Automorphism::dilation(1.0, xi).is_identity());
}

TEST_CASE("finite-difference Jacobian matches the closed form and the cocycle") {
  std::mt19937_64 rng(6);
  for (int s = 0; s < 20; ++s) {
    const SpherePoint xi(oracle::random_unit(rng, 8)), eta(oracle::random_unit(rng, 8));
    const Eigen::VectorXd z = oracle::random_unit(rng, 8);
    const auto a = Automorphism::dilation(0.4, xi);
    const auto b = Automorphism::dilation(1.7, eta);
    const double closed = a.conformal_jacobian(z);
    CHECK(std::abs(jacobian(a, z) - closed) / closed < 1e-6);
    const double lhs = jacobian(Automorphism::compose(b, a), z);
    const double rhs = jacobian(b, a.apply(z)) * jacobian(a, z);
    CHECK(std::abs(lhs - rhs) / rhs < 1e-6);
    // Closed form at N: (2 lambda / |D|)^{Q}.
    const double t = z[4];
    const double lam = 0.4;
    const double d2 = std::pow(1 + t + lam * lam * (1 - t), 2) +
                      std::pow(1 - lam * lam, 2) * (z[5] * z[5] + z[6] * z[6] + z[7] * z[7]);
    CHECK(gamma_north_jacobian(lam, z) == doctest::Approx(std::pow(2 * lam / std::sqrt(d2), 10)));
  }
}

TEST_CASE("the Jacobian integrates to the sphere area") {
  const auto g = Automorphism::dilation(0.5, SpherePoint::north(1));
  const McEstimate e = integrate_mc([&g](const Eigen::VectorXd& z) { return g.conformal_jacobian(z); },
                                    {200'000, 3, 4096}, 8);
  CHECK(std::abs(e.value - sphere_area_qc(1)) < 4 * e.std_error);
}

TEST_CASE("pullback preserves the L^r norm") {
  const SphereFunction u = [](const Eigen::VectorXd& x) { return 1.0 + 0.5 * x[0] + x[4] * x[4]; };
  const double r = 2.5;
  const auto phi = Automorphism::dilation(0.6, SpherePoint::north(1));
  const SphereFunction v = pullback(u, phi, r);
  const QuadratureSpec spec{200'000, 9, 4096};
  const McEstimate a = integrate_mc([&](const Eigen::VectorXd& z) { return std::pow(std::abs(u(z)), r); },
                                    spec, 8);
  const McEstimate b = integrate_mc([&](const Eigen::VectorXd& z) { return std::pow(std::abs(v(z)), r); },
                                    spec, 8);
  CHECK(std::abs(a.value - b.value) < 4 * std::hypot(a.std_error, b.std_error));
  CHECK_THROWS_AS(pullback(u, phi, 0.0), ValidationError);
}

TEST_CASE("pushforward mixture samples carry inverse-density weights") {
  const PushforwardMixture mix({{0.3, SpherePoint::north(1).x(), 0.6},
                                {0.3, -SpherePoint::north(1).x(), 0.4}});
  // Weighted integral of 1 is the area; of the density itself is 1.
  const McEstimate one =
      integrate_mc([](const Eigen::VectorXd&) { return 1.0; }, {100'000, 2, 4096}, 8, mix.transform());
  CHECK(std::abs(one.value - sphere_area_qc(1)) < 4 * one.std_error + 1e-9);
  const McEstimate dens = integrate_mc([&](const Eigen::VectorXd& z) { return mix.density(z); },
                                       {100'000, 2, 4096}, 8, mix.transform());
  CHECK(dens.value == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("dependence of Gamma on the choice of A_xi") {
  std::mt19937_64 rng(7);
  double worst = 0.0;
  for (int s = 0; s < 20; ++s) {
    const SpherePoint xi(oracle::random_unit(rng, 8));
    const Rotation a = rotation_to_north(xi);
    const Rotation a2 = a.then(north_stabilizer(1, 100 + s));
    const Eigen::VectorXd z = oracle::random_unit(rng, 8);
    const Eigen::VectorXd p = Automorphism::dilation(0.5, xi, a).apply(z);
    const Eigen::VectorXd q = Automorphism::dilation(0.5, xi, a2).apply(z);
    worst = std::max(worst, (p - q).norm());
    CHECK(std::isfinite(worst));
  }
  MESSAGE("max |Gamma(A) - Gamma(B A)| over 20 random xi: " << worst);
}

}
