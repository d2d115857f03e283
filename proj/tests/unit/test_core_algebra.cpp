#include "doctest.h"
#include "oracles.hpp"

#include "qcs/errors.hpp"
#include "qcs/measure.hpp"
#include "qcs/polynomial.hpp"
#include "qcs/quaternion.hpp"

#include <random>

using namespace qcs;

namespace {

Quaternion random_q(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  return {g(rng), g(rng), g(rng), g(rng)};
}

double dist(Quaternion p, Quaternion q) { return (p - q).norm(); }

}  // namespace

TEST_SUITE("core_algebra") {

TEST_CASE("unit table ij = k, jk = i, ki = j, i^2 = -1") {
  const auto i = Quaternion::i(), j = Quaternion::j(), k = Quaternion::k();
  CHECK(i * j == k);
  CHECK(j * k == i);
  CHECK(k * i == j);
  CHECK(j * i == -k);
  CHECK(i * i == -Quaternion::one());
  CHECK(i * j * k == -Quaternion::one());
}

TEST_CASE("product agrees with the left-multiplication matrix oracle") {
  std::mt19937_64 rng(3);
  for (int s = 0; s < 200; ++s) {
    const Quaternion p = random_q(rng), q = random_q(rng);
    const auto o = oracle::mul({p.a, p.b, p.c, p.d}, {q.a, q.b, q.c, q.d});
    CHECK(dist(p * q, {o[0], o[1], o[2], o[3]}) < 1e-13);
  }
}

TEST_CASE("norm is multiplicative and conjugation reverses products") {
  std::mt19937_64 rng(5);
  for (int s = 0; s < 100; ++s) {
    const Quaternion p = random_q(rng), q = random_q(rng);
    CHECK((p * q).norm() == doctest::Approx(p.norm() * q.norm()).epsilon(1e-13));
    CHECK(dist((p * q).conj(), q.conj() * p.conj()) < 1e-13);
  }
}

TEST_CASE("right division is p q^{-1}") {
  std::mt19937_64 rng(9);
  for (int s = 0; s < 100; ++s) {
    const Quaternion p = random_q(rng), q = random_q(rng);
    CHECK(dist(right_div(p, q) * q, p) < 1e-12);
  }
  CHECK_THROWS_AS(qinv(Quaternion{}), DomainError);
}

TEST_CASE("exp of an imaginary unit stays on the unit sphere") {
  const Quaternion u = Quaternion::j();
  const Quaternion e = exp_imag(0.7, u);
  CHECK(e.norm() == doctest::Approx(1.0));
  CHECK(e.a == doctest::Approx(std::cos(0.7)));
  CHECK(e.c == doctest::Approx(std::sin(0.7)));
}

TEST_CASE("hermitian product and complex split") {
  std::mt19937_64 rng(11);
  QVector z(2), w(2);
  for (int l = 0; l < 2; ++l) {
    z.set(l, random_q(rng));
    w.set(l, random_q(rng));
  }
  Quaternion h{};
  for (int l = 0; l < 2; ++l) h = h + z[l] * w[l].conj();
  CHECK(dist(hermitian(z, w), h) < 1e-13);
  CHECK(hermitian(z, z).a == doctest::Approx(z.norm() * z.norm()));

  const auto zw = z.to_complex();
  REQUIRE(zw.size() == 4);
  CHECK(zw[0].real() == z[0].a);
  CHECK(zw[0].imag() == z[0].b);
  CHECK(zw[2].real() == z[0].c);
  CHECK(zw[2].imag() == z[0].d);
  const QVector back = QVector::from_complex(zw);
  CHECK((back.coords() - z.coords()).norm() == 0.0);
}

TEST_CASE("log gamma against frozen values") {
  CHECK(log_gamma(2.5) == doctest::Approx(0.284682870472919160).epsilon(1e-14));
  CHECK(log_gamma(50.0) == doctest::Approx(144.565743946344886).epsilon(1e-14));
  CHECK(log_gamma(0.5) == doctest::Approx(0.572364942924700087).epsilon(1e-14));
  CHECK_THROWS_AS(log_gamma(0.0), DomainError);
}

TEST_CASE("polynomial calculus") {
  const RealPolynomial x = RealPolynomial::variable(3, 0);
  const RealPolynomial y = RealPolynomial::variable(3, 1);
  const RealPolynomial p = x * x * y + y * 3.0;
  Eigen::Vector3d v(2.0, -1.0, 0.5);
  CHECK(p.evaluate(v) == doctest::Approx(-7.0));
  CHECK(p.derivative(0).evaluate(v) == doctest::Approx(-4.0));
  CHECK(p.degree() == 3);
  CHECK_FALSE(p.is_homogeneous());
  // x^2 y has Laplacian 2y.
  CHECK(p.laplacian().evaluate(v) == doctest::Approx(-2.0));
  CHECK((p - p).is_zero());
}

TEST_CASE("monomial table values and gradients") {
  const std::vector<Exponent> e = exponents_up_to(4, 2);
  CHECK(e.size() == 15);
  const MonomialTable t(e);
  Eigen::Vector4d x(0.3, -0.2, 0.5, 0.1);
  Eigen::VectorXd vals(t.size());
  Eigen::MatrixXd grads(t.size(), 4);
  t.values(x, vals);
  t.gradients(x, grads);
  for (int m = 0; m < t.size(); ++m) {
    const RealPolynomial p = RealPolynomial::monomial(e[m]);
    CHECK(vals[m] == doctest::Approx(p.evaluate(x)));
    for (int v = 0; v < 4; ++v) CHECK(grads(m, v) == doctest::Approx(p.derivative(v).evaluate(x)));
  }
}

TEST_CASE("atomic measures") {
  AtomicMeasure nu;
  nu.points = Eigen::MatrixXd::Identity(3, 3);
  nu.weights = Eigen::Vector3d(0.5, 0.5, 1e-15);
  CHECK(nu.is_probability());
  const AtomicMeasure p = nu.pruned(1e-12);
  CHECK(p.size() == 2);
  CHECK(p.total_mass() == doctest::Approx(1.0));
}

}
